"""Transmon and dispersive-readout physics.

Frequencies of the transmon (E_J/h, E_C/h, g, Delta) are ordinary
frequencies in Hz. The readout SNR expression needs the dispersive shift as
an angular rate so that ``2 chi T_meas`` is dimensionless; ``ReadoutSpec.chi``
is therefore stored in rad/s.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .constants import H_PLANCK, K_B
from .errors import DomainError, InputError, UnsupportedPulseError


@dataclass(frozen=True)
class TransmonParams:
    ej_over_h: float = 16.9e9
    ec_over_h: float = 0.2e9
    g_over_2pi: float = 100e6
    delta_over_2pi: float = 1.0e9
    t1: float = 50e-6
    t2: float = 30e-6

    def __post_init__(self):
        if not self.ej_over_h > self.ec_over_h > 0:
            raise DomainError("transmon regime requires E_J > E_C > 0")
        if not (self.t1 > 0 and self.t2 > 0):
            raise DomainError("T1 and T2 must be positive")
        if self.t2 > 2.0 * self.t1:
            raise DomainError(f"T2 = {self.t2:g} s exceeds 2*T1 = {2 * self.t1:g} s")


@dataclass(frozen=True)
class BlochState:
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise DomainError(f"phi must lie in [0, 2pi), got {self.phi}")

    @classmethod
    def from_vector(cls, v):
        x, y, z = np.asarray(v, dtype=float) / np.linalg.norm(v)
        rho = math.hypot(x, y)
        theta = math.atan2(rho, z)  # better conditioned than acos near the poles
        if rho < 1e-15:
            return cls(theta, 0.0)  # azimuth undefined at the poles
        phi = math.atan2(y, x) % (2.0 * math.pi)
        if phi >= 2.0 * math.pi:
            phi = 0.0
        return cls(theta, phi)

    @classmethod
    def from_amplitudes(cls, psi):
        """State from a 2-vector (global phase removed)."""
        a, b = np.asarray(psi, dtype=complex) / np.linalg.norm(psi)
        x = 2.0 * (np.conj(a) * b).real
        y = 2.0 * (np.conj(a) * b).imag
        z = abs(a) ** 2 - abs(b) ** 2
        return cls.from_vector((x, y, z))

    @property
    def vector(self):
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def amplitudes(self):
        return np.array([math.cos(self.theta / 2.0),
                         np.exp(1j * self.phi) * math.sin(self.theta / 2.0)])


GROUND = BlochState(0.0, 0.0)
EXCITED = BlochState(math.pi, 0.0)


@dataclass(frozen=True)
class ReadoutSpec:
    chi: float = 2.0 * math.pi * 1.0e6  # rad/s
    n_bar: float = 5.0
    t_meas: float = 1.0e-6
    t_sys: float | None = None  # K, alternative power-based SNR only
    bandwidth: float | None = None  # Hz, idem

    def __post_init__(self):
        for name in ("chi", "t_meas"):
            if not getattr(self, name) > 0:
                raise InputError(f"ReadoutSpec.{name} must be positive")
        if not self.n_bar >= 0:
            raise InputError("ReadoutSpec.n_bar must be >= 0")


@dataclass(frozen=True)
class SnrResult:
    linear: float
    db: float
    meets_10db: bool


def transition_frequency(p):
    """f01 = sqrt(8 E_J E_C)/h - E_C/h, in Hz."""
    if not p.ej_over_h > p.ec_over_h > 0:
        raise DomainError("transmon regime requires E_J > E_C > 0")
    return math.sqrt(8.0 * p.ej_over_h * p.ec_over_h) - p.ec_over_h


def anharmonicity(p):
    return -p.ec_over_h


def dispersive_shift(p):
    """Signed chi = g^2 / Delta in Hz; the two resonator lines sit 2 chi apart."""
    if p.delta_over_2pi == 0:
        raise DomainError("dispersive shift undefined at zero detuning")
    return p.g_over_2pi**2 / p.delta_over_2pi


def readout_snr(spec):
    """4 chi^2 n T / (1 + (2 chi T)^2) with chi in rad/s, evaluated as written.

    The expression carries units of 1/s times photons, not a pure number;
    it is reported as-is and compared against the 10 (= 10 dB) target.
    """
    x = spec.chi * spec.t_meas
    snr = 4.0 * spec.chi**2 * spec.n_bar * spec.t_meas / (1.0 + 4.0 * x * x)
    db = 10.0 * math.log10(snr) if snr > 0 else -math.inf
    return SnrResult(snr, db, snr > 10.0)


def readout_snr_from_power(p_signal, t_sys, bandwidth):
    """P_signal / (k_B T_sys B)."""
    if not (t_sys > 0 and bandwidth > 0):
        raise InputError("t_sys and bandwidth must be positive")
    snr = p_signal / (K_B * t_sys * bandwidth)
    db = 10.0 * math.log10(snr) if snr > 0 else -math.inf
    return SnrResult(snr, db, snr > 10.0)


def thermal_occupancy_ok(f01, temperature, margin=5.0):
    """True when h f01 exceeds ``margin`` k_B T."""
    return H_PLANCK * f01 > margin * K_B * temperature


def apply_rotation(state, axis_phi, angle):
    """Rotate by ``angle`` about the equatorial axis (cos axis_phi, sin axis_phi, 0).

    Implemented on the Bloch vector with Rodrigues' formula; this is the
    SO(3) image of exp(-i angle n.sigma / 2).
    """
    v = state.vector
    n = np.array([math.cos(axis_phi), math.sin(axis_phi), 0.0])
    c, s = math.cos(angle), math.sin(angle)
    v_rot = v * c + np.cross(n, v) * s + n * np.dot(n, v) * (1.0 - c)
    return BlochState.from_vector(v_rot)


def pulse_to_rotation(env, rabi_rate_per_volt, phase_tol=1e-6):
    """Rotation (axis_phi, angle) produced by a constant-axis I/Q envelope.

    angle = rabi_rate * integral A(t) dt; axis_phi is the envelope phase,
    which must be constant wherever A exceeds 1 % of its peak.
    """
    amp = env.amplitude
    peak = float(amp.max()) if amp.size else 0.0
    if peak == 0.0:
        return 0.0, 0.0
    active = amp > 0.01 * peak
    z = env.complex[active]
    ref = np.angle(z[np.argmax(np.abs(z))])
    spread = np.abs(np.angle(z * np.exp(-1j * ref)))
    if spread.max() > phase_tol:
        raise UnsupportedPulseError(
            f"envelope phase varies by {spread.max():.3g} rad across the pulse")
    angle = rabi_rate_per_volt * np.trapezoid(amp, dx=1.0 / env.sample_rate)
    return float(ref % (2.0 * math.pi)), float(angle)


def coherence_envelope(p, t):
    """(population, coherence) = (exp(-t/T1), exp(-t/T2))."""
    if np.any(np.asarray(t) < 0):
        raise InputError("t must be >= 0")
    return np.exp(-np.asarray(t) / p.t1), np.exp(-np.asarray(t) / p.t2)


def gate_fidelity(sigma_phi, sigma_a):
    """Quadratic fidelity model 1 - sigma_phi^2/2 - sigma_A^2/2."""
    if sigma_phi < 0 or sigma_a < 0:
        raise InputError("RMS errors must be non-negative")
    if sigma_phi > 0.5 or sigma_a > 0.5:
        warnings.warn("RMS error above 0.5: outside the small-error fidelity model",
                      RuntimeWarning, stacklevel=2)
    return 1.0 - 0.5 * sigma_phi**2 - 0.5 * sigma_a**2
