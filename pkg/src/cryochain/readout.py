"""Readout-path blocks: LNA, flash ADC, 8-PSK symbol decisions and SER."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import erfc
from scipy.stats import norm

from .constants import K_B
from .errors import DecisionError, InputError


@dataclass(frozen=True)
class LnaConfig:
    """Non-inverting op-amp LNA (LT1028-class noise by default)."""

    r_f: float = 4e3
    r_2: float = 1e3
    e_n: float = 0.9e-9  # V/sqrt(Hz)
    i_n: float = 1e-12  # A/sqrt(Hz)
    r_s: float = 50.0
    temperature: float = 4.0

    def __post_init__(self):
        for name in ("r_f", "e_n", "i_n"):
            if getattr(self, name) < 0:
                raise InputError(f"LnaConfig.{name} must be >= 0")
        for name in ("r_2", "r_s", "temperature"):
            if not getattr(self, name) > 0:
                raise InputError(f"LnaConfig.{name} must be positive")


def lna_gain(cfg):
    """Closed-loop gain 1 + R_f/R_2 as (linear, dB)."""
    g = 1.0 + cfg.r_f / cfg.r_2
    return g, 20.0 * math.log10(g)


def lna_noise_factor(cfg):
    excess = cfg.e_n**2 + (cfg.i_n * cfg.r_s) ** 2
    return 1.0 + excess / (4.0 * K_B * cfg.temperature * cfg.r_s)


def lna_noise_figure(cfg):
    return 10.0 * math.log10(lna_noise_factor(cfg))


# --- flash ADC ------------------------------------------------------------

@dataclass(frozen=True)
class AdcConfig:
    """Flash ADC. ``comparator_offsets`` defaults to all zeros."""

    n_bits: int = 3
    v_fs: float = 2.5
    comparator_offsets: tuple = None
    seed: int = 0

    def __post_init__(self):
        if int(self.n_bits) != self.n_bits or self.n_bits < 1:
            raise InputError("AdcConfig.n_bits must be an integer >= 1")
        if not self.v_fs > 0:
            raise InputError("AdcConfig.v_fs must be positive")
        n_comp = 2 ** int(self.n_bits) - 1
        offsets = self.comparator_offsets
        offsets = (0.0,) * n_comp if offsets is None else tuple(float(x) for x in offsets)
        if len(offsets) != n_comp:
            raise InputError(f"need {n_comp} comparator offsets, got {len(offsets)}")
        object.__setattr__(self, "comparator_offsets", offsets)

    @property
    def n_comparators(self):
        return 2 ** int(self.n_bits) - 1

    @property
    def v_lsb(self):
        return self.v_fs / 2 ** int(self.n_bits)

    def with_offset_sigma(self, sigma, seed=None):
        """Copy with comparator offsets drawn from N(0, sigma^2) volts."""
        seed = self.seed if seed is None else seed
        rng = np.random.default_rng(seed)
        draws = sigma * rng.standard_normal(self.n_comparators)
        return replace(self, comparator_offsets=tuple(draws.tolist()), seed=seed)


def adc_thresholds(cfg):
    k = np.arange(1, cfg.n_comparators + 1)
    return k * cfg.v_lsb + np.asarray(cfg.comparator_offsets)


def thermometer_encode(v_in, thresholds):
    """Comparator outputs D_k = v_in > threshold_k (trailing axis over k)."""
    v = np.asarray(v_in, dtype=float)
    return (v[..., None] > np.asarray(thresholds)).astype(np.uint8)


def thresholds_sorted(thresholds):
    """False when offsets reorder the ladder, so bubbles become possible."""
    return bool(np.all(np.diff(thresholds) > 0))


def priority_encode(d, mode="masked"):
    """Convert comparator outputs D_1..D_K to a binary code.

    ``masked`` first reduces the thermometer code to a one-hot word
    D_k AND NOT D_{k+1} (the top transition), then ORs the one-hot lines
    into each output bit, so a clean thermometer of weight w gives w.
    ``raw`` ORs the comparator lines directly, as in the textbook 3-bit
    equations Q0 = D1+D3+D5+D7 etc.; it is kept for fault studies and is
    only correct for one-hot inputs.
    """
    d = np.asarray(d).astype(bool)
    k_count = d.shape[-1]
    if mode == "masked":
        above = np.concatenate([d[..., 1:], np.zeros(d.shape[:-1] + (1,), bool)], axis=-1)
        lines = d & ~above
    elif mode == "raw":
        lines = d
    else:
        raise InputError(f"unknown priority-encoder mode {mode!r}")
    idx = np.arange(1, k_count + 1)
    n_bits = max(1, int(k_count).bit_length())
    code = np.zeros(d.shape[:-1], dtype=np.int64)
    for b in range(n_bits):
        sel = ((idx >> b) & 1).astype(bool)
        q_b = np.any(lines[..., sel], axis=-1)
        code |= q_b.astype(np.int64) << b
    if code.ndim == 0:
        return int(code)
    return code


def code_bits(code, n_bits=3):
    """Code as a bit string, MSB first (Q2 Q1 Q0 for 3 bits)."""
    return format(int(code), f"0{n_bits}b")


def digitize(v_in, cfg, mode="masked"):
    return priority_encode(thermometer_encode(v_in, adc_thresholds(cfg)), mode=mode)


def reconstruct(codes, cfg):
    """Mid-tread reconstruction voltage (code + 1/2) LSB."""
    return (np.asarray(codes, dtype=float) + 0.5) * cfg.v_lsb


def quantization_noise_rms(cfg):
    """RMS quantisation noise V_FS / (2^n sqrt(12))."""
    return cfg.v_fs / (2 ** int(cfg.n_bits) * math.sqrt(12.0))


def adc_enob(cfg, test_tone_amplitude=None, samples=8192, seed=0, cycles=1021,
             reference="fit"):
    """ENOB = (SINAD - 1.76) / 6.02 from a coherently sampled mid-scale sine.

    With ``reference="fit"`` the digitised record is compared against a
    least-squares sine fit at the known test frequency (amplitude, phase and
    offset free), the usual converter-test practice. ``reference="ideal"``
    compares against the exact input tone instead, which also charges the
    quantiser's small gain error to SINAD.
    """
    if samples < 4096:
        raise InputError("ENOB measurement needs at least 4096 samples")
    if math.gcd(cycles, samples) != 1:
        raise InputError("cycles and samples must be coprime for coherent sampling")
    amp = 0.5 * cfg.v_fs if test_tone_amplitude is None else test_tone_amplitude
    phase0 = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi)
    w = 2.0 * np.pi * cycles * np.arange(samples) / samples + phase0
    v = 0.5 * cfg.v_fs + amp * np.sin(w)
    y = reconstruct(digitize(v, cfg), cfg)
    if reference == "fit":
        basis = np.column_stack([np.cos(w), np.sin(w), np.ones_like(w)])
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        err = y - basis @ coef
        signal_power = 0.5 * (coef[0] ** 2 + coef[1] ** 2)
    elif reference == "ideal":
        err = y - v
        err = err - err.mean()
        signal_power = 0.5 * amp * amp
    else:
        raise InputError(f"unknown ENOB reference {reference!r}")
    sinad_db = 10.0 * math.log10(signal_power / np.mean(err * err))
    return (sinad_db - 1.76) / 6.02


def calibrate_offset_sigma(target_enob=2.8, n_bits=3, v_fs=2.5, seeds=range(32)):
    """Comparator-offset sigma (in LSB) whose seed-averaged ENOB hits ``target_enob``."""
    base = AdcConfig(n_bits=n_bits, v_fs=v_fs)
    seeds = list(seeds)

    def mean_enob(sigma_lsb):
        return np.mean([adc_enob(base.with_offset_sigma(sigma_lsb * base.v_lsb, seed=s))
                        for s in seeds])

    return brentq(lambda s: mean_enob(s) - target_enob, 1e-4, 2.0, xtol=1e-4)


# --- 8-PSK ----------------------------------------------------------------

@dataclass(frozen=True)
class PskConstellation:
    """Natural-binary labels counter-clockwise from angle 0."""

    order: int = 8
    amplitude: float = 1.0
    labels: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if self.order != 8:
            raise InputError("only 8-PSK is supported")
        if not self.amplitude > 0:
            raise InputError("amplitude must be positive")
        object.__setattr__(self, "labels", tuple(format(k, "03b") for k in range(8)))

    @property
    def step(self):
        return 2.0 * math.pi / self.order

    @property
    def angles(self):
        return self.step * np.arange(self.order)

    @property
    def points(self):
        return self.amplitude * np.exp(1j * self.angles)


def psk_modulate(symbol, c=PskConstellation()):
    if int(symbol) != symbol or not 0 <= symbol < c.order:
        raise InputError(f"symbol {symbol!r} outside [0, {c.order - 1}]")
    a = c.step * int(symbol)
    return c.amplitude * math.cos(a), c.amplitude * math.sin(a)


def psk_decide(z, c=PskConstellation()):
    """Vectorised nearest-angle decision on complex samples.

    A sample on a decision boundary (to within 1e-9 of a sector) goes to
    the lower index.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DecisionError("cannot decide a symbol at the origin")
    ang = np.mod(np.angle(z), 2.0 * np.pi)
    idx = np.ceil(ang / c.step - 0.5 - 1e-9).astype(np.int64) % c.order
    return idx


def psk_demodulate(i, q, c=PskConstellation()):
    return int(psk_decide(complex(i, q), c))


def q_function(x):
    return 0.5 * erfc(np.asarray(x) / math.sqrt(2.0))


def ser_analytic(es_n0_db):
    """Nearest-neighbour approximation 2 Q(sqrt(2 Es/N0) sin(pi/8)), capped at 1."""
    es_n0 = 0.0 if es_n0_db == -math.inf else 10.0 ** (es_n0_db / 10.0)
    return float(min(1.0, 2.0 * q_function(math.sqrt(2.0 * es_n0) * math.sin(math.pi / 8))))


def wilson_interval(errors, trials, z=None):
    """Wilson score interval for a binomial proportion (95 % by default)."""
    if z is None:
        z = float(norm.ppf(0.975))
    if errors == 0:
        return 0.0, z * z / (trials + z * z)
    p = errors / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class MonteCarloResult:
    ser: float
    ci95: tuple
    errors: int
    trials: int


def _noise_sigma(es_n0_db, amplitude):
    # per-component standard deviation sqrt(N0/2) for Es = amplitude^2
    if es_n0_db is None or es_n0_db == math.inf:
        return 0.0
    n0 = amplitude**2 / 10.0 ** (es_n0_db / 10.0)
    return math.sqrt(n0 / 2.0)


def count_symbol_errors(rng, n, es_n0_db, c=PskConstellation(), distortion=None,
                        block=1 << 18):
    """Send ``n`` uniform random symbols through AWGN and count decision errors.

    ``distortion`` is an optional real 2x2 matrix acting on (I, Q) before the
    noise, used to model modulator imbalance.
    """
    sigma = _noise_sigma(es_n0_db, c.amplitude)
    errors = 0
    done = 0
    while done < n:
        m = min(block, n - done)
        sym = rng.integers(0, c.order, size=m)
        z = c.points[sym]
        if distortion is not None:
            d = np.asarray(distortion, dtype=float)
            z = (d[0, 0] * z.real + d[0, 1] * z.imag) + 1j * (d[1, 0] * z.real + d[1, 1] * z.imag)
        if sigma > 0:
            noise = rng.standard_normal((2, m))
            z = z + sigma * (noise[0] + 1j * noise[1])
        errors += int(np.count_nonzero(psk_decide(z, c) != sym))
        done += m
    return errors


def partition_rngs(seed, partitions):
    return [np.random.default_rng(np.random.SeedSequence([int(seed), p]))
            for p in range(partitions)]


def ser_monte_carlo(es_n0_db, trials, seed=0, c=PskConstellation(), partitions=1,
                    workers=None, distortion=None):
    """Monte Carlo 8-PSK symbol error rate with a Wilson 95 % interval.

    Trials are split across ``partitions`` independent streams seeded from
    ``(seed, partition index)``; the result depends only on ``seed`` and
    ``partitions``, never on ``workers``.
    """
    if trials < 1000:
        raise InputError("Monte Carlo SER needs at least 1000 trials")
    sizes = [trials // partitions + (1 if p < trials % partitions else 0)
             for p in range(partitions)]
    rngs = partition_rngs(seed, partitions)

    def run(p):
        return count_symbol_errors(rngs[p], sizes[p], es_n0_db, c, distortion)

    if workers and workers > 1 and partitions > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, range(partitions)))
    else:
        counts = [run(p) for p in range(partitions)]
    errors = sum(counts)
    return MonteCarloResult(errors / trials, wilson_interval(errors, trials), errors, trials)
