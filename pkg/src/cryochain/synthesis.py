"""Local-oscillator synthesis: PLL loop dynamics, VCO law, LO filtering and
quadrature generation.

The PLL is analysed through its linearised detector, a first-order RC loop
filter 1/(1 + s*tau) and an integrating VCO, which gives the familiar
second-order closed loop

    H(s) = (Kd Kv / tau) / (s^2 + s/tau + Kd Kv / tau).
"""

from dataclasses import dataclass
import math

import numpy as np

from .constants import wrap_phase
from .errors import InputError, PreconditionError
from .signal import SampledSignal


@dataclass(frozen=True)
class PllConfig:
    """Loop constants.

    The defaults give omega_n ~= 7071 rad/s and zeta ~= 0.707 with the VCO
    gain of the default :class:`VcoConfig` (2*pi*1 MHz/V).
    """

    kd: float = 5.0e3 / (2.0 * math.pi * 1.0e6)  # V/rad
    kv: float = 2.0 * math.pi * 1.0e6  # rad/s/V
    tau: float = 1.0e-4  # s
    f_ref: float = 1.0e6  # Hz

    def __post_init__(self):
        for name in ("kd", "kv", "tau", "f_ref"):
            if not getattr(self, name) > 0:
                raise InputError(f"PllConfig.{name} must be positive")

    @property
    def omega_n(self):
        return math.sqrt(self.kd * self.kv / self.tau)

    @property
    def zeta(self):
        return 1.0 / (2.0 * self.omega_n * self.tau)

    @classmethod
    def from_dynamics(cls, omega_n, zeta, kv=2.0 * math.pi * 1.0e6, f_ref=1.0e6):
        """Pick tau and kd that realise a given natural frequency and damping."""
        tau = 1.0 / (2.0 * zeta * omega_n)
        kd = omega_n**2 * tau / kv
        return cls(kd=kd, kv=kv, tau=tau, f_ref=f_ref)


@dataclass(frozen=True)
class PllTrajectory:
    times: np.ndarray
    v_error: np.ndarray
    v_ctrl: np.ndarray
    phase_error: np.ndarray
    lock_time: float | None  # None: not locked within the simulated window

    @property
    def locked(self):
        return self.lock_time is not None

    def jitter_rms_deg(self, settle_fraction=0.5):
        """Steady-state RMS phase wander in degrees, or None if never locked.

        Measured about the mean over the tail of the post-lock window; the
        first ``settle_fraction`` of that window is skipped so the decaying
        acquisition transient is not counted as jitter.
        """
        if self.lock_time is None:
            return None
        t_start = self.lock_time + settle_fraction * (self.times[-1] - self.lock_time)
        post = self.phase_error[self.times >= t_start]
        if post.size == 0:
            return None
        return float(np.degrees(np.std(post)))


@dataclass(frozen=True)
class VcoConfig:
    r: float = 50e3
    c: float = 10e-12
    v_hyst: float = 0.5

    def __post_init__(self):
        for name in ("r", "c", "v_hyst"):
            if not getattr(self, name) > 0:
                raise InputError(f"VcoConfig.{name} must be positive")


@dataclass(frozen=True)
class PhaseNoiseProfile:
    offsets: np.ndarray  # Hz
    levels: np.ndarray  # dBc/Hz

    def __post_init__(self):
        offsets = np.asarray(self.offsets, dtype=float)
        levels = np.asarray(self.levels, dtype=float)
        if offsets.shape != levels.shape or offsets.ndim != 1:
            raise InputError("offsets and levels must be 1-D and of equal length")
        if offsets.size and (offsets[0] <= 0 or np.any(np.diff(offsets) <= 0)):
            raise InputError("offsets must be positive and strictly increasing")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "levels", levels)


def default_offset_grid(f_lo=1e3, f_hi=1e8, points_per_decade=10):
    decades = math.log10(f_hi / f_lo)
    n = int(round(decades * points_per_decade)) + 1
    return np.logspace(math.log10(f_lo), math.log10(f_hi), n)


def phase_detector_output(phi_ref, phi_fb, kd):
    """Linearised detector: kd * (phi_ref - phi_fb), difference wrapped to (-pi, pi]."""
    return kd * wrap_phase(np.subtract(phi_ref, phi_fb))


def natural_frequency_and_damping(cfg):
    return cfg.omega_n, cfg.zeta


def closed_loop_response(cfg, f_m):
    """Complex H(j*2*pi*f_m)."""
    s = 2j * np.pi * np.asarray(f_m, dtype=float)
    k = cfg.kd * cfg.kv / cfg.tau
    return k / (s * s + s / cfg.tau + k)


def closed_loop_magnitude(cfg, f_m):
    if np.any(np.asarray(f_m) < 0):
        raise InputError("offset frequency must be >= 0")
    mag = np.abs(closed_loop_response(cfg, f_m))
    return float(mag) if np.ndim(mag) == 0 else mag


def _loop_derivative(cfg, delta_omega, theta, v):
    # theta: phase error phi_ref - phi_vco (unwrapped), v: control voltage
    dtheta = delta_omega - cfg.kv * v
    dv = (cfg.kd * wrap_phase(theta) - v) / cfg.tau
    return dtheta, dv


def simulate_lock(cfg, f0_vco, dt=None, t_max=5e-3, lock_tol=math.radians(2.0),
                  initial_phase_error=0.0, initial_v_ctrl=0.0):
    """Time-step the loop from an unlocked start with fixed-step RK4.

    ``f0_vco`` is the free-running VCO frequency at zero control voltage;
    the VCO runs at ``f0_vco + kv * v_ctrl / (2*pi)``. ``lock_time`` is the
    first sample time after which ``|phase_error| < lock_tol`` holds until
    the end of the run.
    """
    omega_n = cfg.omega_n
    if dt is None:
        dt = 0.02 / omega_n
    if not dt > 0 or dt >= 0.1 / omega_n:
        raise PreconditionError(
            f"step dt={dt:g} s must satisfy 0 < dt < 0.1/omega_n = {0.1 / omega_n:g} s")
    if not t_max > 0:
        raise PreconditionError("t_max must be positive")

    n = int(math.floor(t_max / dt + 1e-9)) + 1
    delta_omega = 2.0 * math.pi * (cfg.f_ref - f0_vco)
    theta = np.empty(n)
    v = np.empty(n)
    theta[0] = initial_phase_error
    v[0] = initial_v_ctrl
    th, vc = float(initial_phase_error), float(initial_v_ctrl)
    half = 0.5 * dt
    for k in range(1, n):
        a1, b1 = _loop_derivative(cfg, delta_omega, th, vc)
        a2, b2 = _loop_derivative(cfg, delta_omega, th + half * a1, vc + half * b1)
        a3, b3 = _loop_derivative(cfg, delta_omega, th + half * a2, vc + half * b2)
        a4, b4 = _loop_derivative(cfg, delta_omega, th + dt * a3, vc + dt * b3)
        th += dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
        vc += dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
        theta[k] = th
        v[k] = vc

    times = np.arange(n) * dt
    phase_error = wrap_phase(theta)
    v_error = cfg.kd * phase_error

    outside = np.flatnonzero(np.abs(phase_error) >= lock_tol)
    if outside.size == 0:
        lock_time = 0.0
    elif outside[-1] == n - 1:
        lock_time = None
    else:
        lock_time = float(times[outside[-1] + 1])

    for arr in (times, v_error, v, phase_error):
        arr.setflags(write=False)
    return PllTrajectory(times, v_error, v, phase_error, lock_time)


def combine_phase_noise(ref, vco, cfg):
    """Output phase noise: reference shaped by |H|^2, VCO by |1 - H|^2."""
    if ref.offsets.shape != vco.offsets.shape or not np.allclose(
            ref.offsets, vco.offsets, rtol=1e-12, atol=0.0):
        raise InputError("reference and VCO profiles must share one offset grid")
    h = closed_loop_response(cfg, ref.offsets)
    lin = 10.0 ** (ref.levels / 10.0) * np.abs(h) ** 2 \
        + 10.0 ** (vco.levels / 10.0) * np.abs(1.0 - h) ** 2
    return PhaseNoiseProfile(ref.offsets.copy(), 10.0 * np.log10(lin))


def integrated_phase_jitter_deg(profile):
    """RMS phase jitter (degrees) from a single-sideband profile, trapezoid rule."""
    lin = 10.0 ** (profile.levels / 10.0)
    return math.degrees(math.sqrt(2.0 * np.trapezoid(lin, profile.offsets)))


def vco_frequency(cfg, v_ctrl):
    """Relaxation-oscillator law f = V_ctrl / (4 R C V_hyst)."""
    if np.any(np.asarray(v_ctrl) < 0):
        raise InputError("v_ctrl must be >= 0")
    return v_ctrl / (4.0 * cfg.r * cfg.c * cfg.v_hyst)


def vco_gain(cfg):
    """Kv = 2*pi / (4 R C V_hyst) in rad/s/V."""
    return 2.0 * math.pi / (4.0 * cfg.r * cfg.c * cfg.v_hyst)


def lpf3_response(rc, omega):
    """Three cascaded RC poles: magnitude and phase at ``omega``."""
    x = np.asarray(omega, dtype=float) * rc
    mag = (1.0 + x * x) ** -1.5
    phase = -3.0 * np.arctan(x)
    if np.ndim(x) == 0:
        return float(mag), float(phase)
    return mag, phase


def allpass_response(rc, omega):
    """First-order all-pass (1 - sRC)/(1 + sRC); unit gain, -2*atan(w*RC) phase."""
    x = np.asarray(omega, dtype=float) * rc
    phase = -2.0 * np.arctan(x)
    if np.ndim(x) == 0:
        return 1.0, float(phase)
    return np.ones_like(x), phase


def generate_quadrature_lo(f_lo, amplitude, sample_rate, duration, phase_error=0.0,
                           amp_imbalance_db=0.0, n_samples=None):
    """I = A cos(wt), Q = A*eps*sin(wt + phase_error), eps = 10^(dB/20)."""
    if not sample_rate > 10.0 * f_lo:
        raise PreconditionError(
            f"sample_rate {sample_rate:g} Hz must exceed 10 x f_lo = {10 * f_lo:g} Hz")
    if n_samples is None:
        n_samples = int(round(duration * sample_rate))
    t = np.arange(n_samples) / sample_rate
    eps = 10.0 ** (amp_imbalance_db / 20.0)
    w = 2.0 * np.pi * f_lo
    i_lo = amplitude * np.cos(w * t)
    q_lo = amplitude * eps * np.sin(w * t + phase_error)
    return SampledSignal(i_lo, sample_rate), SampledSignal(q_lo, sample_rate)


def _tone_phasor(x, f, sample_rate):
    # least-squares fit x ~ a cos(wt) + b sin(wt) + c; returns complex amplitude
    t = np.arange(x.size) / sample_rate
    w = 2.0 * np.pi * f
    basis = np.column_stack([np.cos(w * t), np.sin(w * t), np.ones_like(t)])
    (a, b, _), *_ = np.linalg.lstsq(basis, x, rcond=None)
    # a cos + b sin = |z| cos(wt + arg z) with z = a - jb
    return complex(a, -b)


def measure_quadrature(i_lo, q_lo, f_lo):
    """Estimate (phase_error_rad, amplitude_ratio) of a quadrature LO pair.

    The phase error is how far the Q channel leads an exact sine relative to
    the I cosine; it is zero for ideal quadrature.
    """
    zi = _tone_phasor(np.asarray(i_lo.samples), f_lo, i_lo.sample_rate)
    zq = _tone_phasor(np.asarray(q_lo.samples), f_lo, q_lo.sample_rate)
    phase_error = wrap_phase(np.angle(zq) - np.angle(zi) + np.pi / 2.0)
    return float(phase_error), float(abs(zq) / abs(zi))
