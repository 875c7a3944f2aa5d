"""Control-path signal construction: DAC, pulse envelopes, I/Q up/down
conversion, image rejection and the power stage.

Sign convention: the modulator forms ``s = I cos(wt) - Q sin(wt)``, which
equals ``A cos(wt + phi)`` with ``A = |I + jQ|`` and ``phi = arg(I + jQ)``.
With the opposite sign on the Q term the recovered phase would come out
negated.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import InputError, PreconditionError
from .signal import SampledSignal

PULSE_SHAPES = ("gaussian", "drag", "cosine")
IRR_CAP_DB = 200.0


@dataclass(frozen=True)
class DacConfig:
    n_bits: int = 3
    v_ref: float = 1.0

    def __post_init__(self):
        if int(self.n_bits) != self.n_bits or self.n_bits < 1:
            raise InputError("DacConfig.n_bits must be an integer >= 1")
        if not self.v_ref > 0:
            raise InputError("DacConfig.v_ref must be positive")

    @property
    def n_codes(self):
        return 2 ** int(self.n_bits)

    @property
    def v_lsb(self):
        return self.v_ref / self.n_codes


@dataclass(frozen=True)
class PulseSpec:
    shape: str = "gaussian"
    duration: float = 40e-9
    sigma: float = 10e-9
    drag_coefficient: float = 0.0
    peak_amplitude: float = 1.0

    def __post_init__(self):
        if self.shape not in PULSE_SHAPES:
            raise InputError(f"PulseSpec.shape must be one of {PULSE_SHAPES}, got {self.shape!r}")
        if not self.duration > 0:
            raise InputError("PulseSpec.duration must be positive")
        if self.shape in ("gaussian", "drag") and not self.sigma > 0:
            raise InputError("PulseSpec.sigma must be positive")


@dataclass(frozen=True)
class IQEnvelope:
    i: SampledSignal
    q: SampledSignal

    def __post_init__(self):
        if len(self.i) != len(self.q) or self.i.sample_rate != self.q.sample_rate:
            raise InputError("I and Q envelopes must share length and sample rate")

    @classmethod
    def from_arrays(cls, i, q, sample_rate, start_time=0.0):
        return cls(SampledSignal(i, sample_rate, start_time),
                   SampledSignal(q, sample_rate, start_time))

    @property
    def sample_rate(self):
        return self.i.sample_rate

    @property
    def times(self):
        return self.i.times

    @property
    def complex(self):
        return self.i.samples + 1j * self.q.samples

    @property
    def amplitude(self):
        return np.hypot(self.i.samples, self.q.samples)

    @property
    def phase(self):
        return np.arctan2(self.q.samples, self.i.samples)


def dac_output(code, cfg):
    """Binary-weighted DAC: V_ref * code / 2^n."""
    if int(code) != code or not 0 <= code < cfg.n_codes:
        raise InputError(f"DAC code {code!r} outside [0, {cfg.n_codes - 1}]")
    return cfg.v_ref * int(code) / cfg.n_codes


def dac_levels(cfg, code_errors=None):
    """Output voltage of every code, optionally with per-code errors (V) added."""
    levels = cfg.v_lsb * np.arange(cfg.n_codes, dtype=float)
    if code_errors is not None:
        code_errors = np.asarray(code_errors, dtype=float)
        if code_errors.shape != levels.shape:
            raise InputError(f"expected {cfg.n_codes} code errors, got {code_errors.size}")
        levels = levels + code_errors
    return levels


def dac_linearity(measured_levels, cfg):
    """Per-code DNL and INL in LSB.

    ``dnl[k]`` describes the step from code k-1 to code k, so ``dnl[0]`` is
    zero by construction; ``inl`` is the running sum of ``dnl``.
    """
    levels = np.asarray(measured_levels, dtype=float)
    if levels.shape != (cfg.n_codes,):
        raise InputError(f"expected {cfg.n_codes} levels, got shape {levels.shape}")
    dnl = np.zeros(cfg.n_codes)
    dnl[1:] = (np.diff(levels) - cfg.v_lsb) / cfg.v_lsb
    return dnl, np.cumsum(dnl)


def make_envelope(spec, sample_rate):
    n_steps = int(round(spec.duration * sample_rate))
    if n_steps < 16:
        raise PreconditionError(
            f"pulse of {spec.duration:g} s at {sample_rate:g} Hz gives {n_steps} samples; need >= 16")
    t = np.arange(n_steps + 1) / sample_rate
    a = spec.peak_amplitude
    if spec.shape == "cosine":
        i = a * 0.5 * (1.0 - np.cos(2.0 * np.pi * t / spec.duration))
        q = np.zeros_like(t)
    else:
        u = (t - 0.5 * spec.duration) / spec.sigma
        i = a * np.exp(-0.5 * u * u)
        if spec.shape == "drag":
            # coefficient * sigma * dI/dt, so that max|Q| = coefficient * A / sqrt(e)
            q = -spec.drag_coefficient * u * i
        else:
            q = np.zeros_like(t)
    return IQEnvelope.from_arrays(i, q, sample_rate)


def _check_carrier(sample_rate, f_c):
    if not sample_rate > 4.0 * f_c:
        raise PreconditionError(
            f"sample rate {sample_rate:g} Hz must exceed 4 x carrier = {4 * f_c:g} Hz")


def iq_upconvert(env, f_c):
    """Ideal quadrature modulator: I cos(wt) - Q sin(wt)."""
    _check_carrier(env.sample_rate, f_c)
    w_t = 2.0 * np.pi * f_c * env.times
    s = env.i.samples * np.cos(w_t) - env.q.samples * np.sin(w_t)
    return SampledSignal(s, env.sample_rate, env.i.start_time)


def iq_modulate(env, i_lo, q_lo):
    """Modulator driven by an explicit (possibly imbalanced) LO pair.

    With the ideal pair ``(cos, sin)`` this reproduces :func:`iq_upconvert`.
    """
    if len(i_lo) < len(env.i) or len(q_lo) < len(env.q):
        raise InputError("LO waveforms shorter than the envelope")
    n = len(env.i)
    s = env.i.samples * i_lo.samples[:n] - env.q.samples * q_lo.samples[:n]
    return SampledSignal(s, env.sample_rate, env.i.start_time)


def _centered_boxcar(x, width):
    n = x.size
    if width <= 1 or n < width:
        return x.copy()
    c = np.concatenate(([0.0], np.cumsum(x)))
    valid = (c[width:] - c[:-width]) / width  # mean of x[j:j+width]
    j = np.clip(np.arange(n) - (width - 1) // 2, 0, n - width)
    return valid[j]


def iq_demodulate(signal, f_c):
    """Recover the complex envelope by mixing with the ideal LO.

    The double-frequency product is removed with a boxcar one carrier period
    long, which nulls it exactly when the sample rate is an integer multiple
    of the carrier. Edge samples reuse the nearest full window.
    """
    _check_carrier(signal.sample_rate, f_c)
    w_t = 2.0 * np.pi * f_c * signal.times
    x = np.asarray(signal.samples, dtype=float)
    width = int(round(signal.sample_rate / f_c))
    i = _centered_boxcar(2.0 * x * np.cos(w_t), width)
    q = _centered_boxcar(-2.0 * x * np.sin(w_t), width)
    return IQEnvelope.from_arrays(i, q, signal.sample_rate, signal.start_time)


def image_rejection_ratio(eps, phi_err):
    """Image rejection (dB) for amplitude ratio ``eps`` and phase error ``phi_err`` (rad).

    Returns :data:`IRR_CAP_DB` when the image term vanishes (perfect balance).
    """
    if not eps > 0:
        raise InputError("amplitude ratio must be positive")
    c = 2.0 * eps * math.cos(phi_err)
    num = 1.0 + c + eps * eps
    den = 1.0 - c + eps * eps
    if den <= 1e-20:
        return IRR_CAP_DB
    return min(10.0 * math.log10(num / den), IRR_CAP_DB)


def power_stage(signal, gain_db, v_clip):
    """Linear gain followed by a symmetric hard clip at +/- v_clip.

    The returned signal carries the fraction of clipped samples in
    ``clipped_fraction``.
    """
    if not v_clip > 0:
        raise InputError("v_clip must be positive")
    y = np.asarray(signal.samples) * 10.0 ** (gain_db / 20.0)
    clipped = np.abs(y) > v_clip
    y = np.clip(y, -v_clip, v_clip)
    frac = float(np.mean(clipped)) if y.size else 0.0
    return SampledSignal(y, signal.sample_rate, signal.start_time, clipped_fraction=frac)
