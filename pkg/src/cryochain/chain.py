"""End-to-end composition of the control and readout paths.

Every run is a pure function of a :class:`ChainConfig`; random draws come
from generators seeded by ``(cfg.seed, stream id)`` so reports are
bit-identical for equal configs.
"""

from dataclasses import asdict, dataclass, field, replace
import json
import math

import numpy as np

from .constants import wrap_phase
from .device import DeviceEnvironment
from .errors import CryoChainError, InputError
from .modulation import (
    DacConfig, PulseSpec, dac_levels, dac_linearity, dac_output, image_rejection_ratio,
    iq_demodulate, iq_modulate, make_envelope, power_stage,
)
from .qubit import (
    GROUND, ReadoutSpec, TransmonParams, apply_rotation, dispersive_shift, gate_fidelity,
    pulse_to_rotation, readout_snr,
)
from .readout import (
    AdcConfig, LnaConfig, PskConstellation, adc_enob, digitize, lna_gain, lna_noise_factor,
    lna_noise_figure, psk_decide, reconstruct, ser_analytic, wilson_interval,
)
from .signal import SampledSignal
from .synthesis import PllConfig, VcoConfig, generate_quadrature_lo, measure_quadrature, simulate_lock

# state |0> and |1> land on the two highlighted constellation points
STATE_SYMBOLS = (0b001, 0b011)

# independent random streams derived from the config seed
_STREAM_LOOPBACK = 1
_STREAM_READOUT = 2


@dataclass(frozen=True)
class LoImpairments:
    phase_error_deg: float = 1.8
    amp_imbalance_db: float = 0.0
    amplitude: float = 1.0


@dataclass(frozen=True)
class PaConfig:
    gain_db: float = 0.0
    v_clip: float = 5.0


@dataclass(frozen=True)
class LockSimConfig:
    """Acquisition scenario for the PLL transient."""

    detuning_hz: float = 10.0
    initial_phase_error: float = math.pi / 2
    dt: float | None = None
    t_max: float = 5e-3
    lock_tol_deg: float = 2.0


@dataclass(frozen=True)
class PowerConfig:
    node_nm: float = 180.0
    vdd: float = 1.8
    steady_state_power_w: float = 0.1997
    scaled_node_nm: float = 65.0
    scaled_vdd: float = 1.2
    stage_budget_w: float = 1.0
    breakdown_w: dict | None = None


@dataclass(frozen=True)
class LinkConfig:
    es_n0_db: float | None = 19.1  # None: noiseless channel
    n_symbols: int = 10000
    readout_trials: int = 10000


@dataclass(frozen=True)
class ChainConfig:
    device: DeviceEnvironment = field(default_factory=DeviceEnvironment)
    pll: PllConfig = field(default_factory=PllConfig)
    vco: VcoConfig = field(default_factory=VcoConfig)
    dac: DacConfig = field(default_factory=DacConfig)
    pulse: PulseSpec = field(default_factory=PulseSpec)
    qubit: TransmonParams = field(default_factory=TransmonParams)
    readout_spec: ReadoutSpec = field(default_factory=ReadoutSpec)
    lna: LnaConfig = field(default_factory=LnaConfig)
    adc: AdcConfig = field(default_factory=AdcConfig)
    lo: LoImpairments = field(default_factory=LoImpairments)
    pa: PaConfig = field(default_factory=PaConfig)
    pll_sim: LockSimConfig = field(default_factory=LockSimConfig)
    power: PowerConfig = field(default_factory=PowerConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    carrier_hz: float = 5.0e9
    sample_rate: float = 100.0e9
    rabi_rate_per_volt: float = 1.5e8
    control_code: int = 0b111
    seed: int = 20240607

    def __post_init__(self):
        if not self.sample_rate > 10.0 * self.carrier_hz:
            raise InputError("sample_rate must exceed 10 x carrier_hz")

    def to_dict(self):
        return asdict(self)


def ideal_config(**overrides):
    """No LO imbalance, noiseless channel; everything else at defaults."""
    cfg = ChainConfig(lo=LoImpairments(phase_error_deg=0.0, amp_imbalance_db=0.0),
                      link=LinkConfig(es_n0_db=None))
    return replace(cfg, **overrides)


def nominal_config(**overrides):
    """1.8 degree LO phase error, 19.1 dB Es/N0 (the defaults)."""
    return replace(ChainConfig(), **overrides)


# --- power ----------------------------------------------------------------

@dataclass(frozen=True)
class PowerBudget:
    node: float
    vdd: float
    steady_state_power: float
    budget_fraction: float
    over_budget: bool = False


def power_scaling(p_ref, vdd_ref, vdd_new):
    """Dynamic power under supply scaling, P proportional to VDD^2."""
    for name, v in (("p_ref", p_ref), ("vdd_ref", vdd_ref), ("vdd_new", vdd_new)):
        if not v > 0:
            raise InputError(f"{name} must be positive")
    return p_ref * (vdd_new / vdd_ref) ** 2


def thermal_budget_fraction(power, stage_budget):
    if not (power > 0 and stage_budget > 0):
        raise InputError("power and stage budget must be positive")
    return power / stage_budget


def power_budget(node, vdd, power, stage_budget):
    frac = thermal_budget_fraction(power, stage_budget)
    return PowerBudget(node, vdd, power, min(frac, 1.0), frac > 1.0)


def power_budgets(pc):
    """(reference, scaled) budgets for a :class:`PowerConfig`."""
    ref = power_budget(pc.node_nm, pc.vdd, pc.steady_state_power_w, pc.stage_budget_w)
    p_new = power_scaling(pc.steady_state_power_w, pc.vdd, pc.scaled_vdd)
    return ref, power_budget(pc.scaled_node_nm, pc.scaled_vdd, p_new, pc.stage_budget_w)


# --- control path -----------------------------------------------------------

@dataclass(frozen=True)
class ControlMetrics:
    code: int
    amplitude_v: float
    iq_phase_error_deg: float
    amp_imbalance_db: float
    envelope_amp_rms: float  # fraction of peak
    envelope_phase_rms_deg: float
    sigma_phi: float  # rad
    sigma_a: float  # fractional
    fidelity: float
    clipped_fraction: float
    rotation_axis: float | None
    rotation_angle: float | None
    final_theta: float | None


def control_lo(cfg, n_samples):
    return generate_quadrature_lo(
        cfg.carrier_hz, cfg.lo.amplitude, cfg.sample_rate, None,
        phase_error=math.radians(cfg.lo.phase_error_deg),
        amp_imbalance_db=cfg.lo.amp_imbalance_db, n_samples=n_samples)


def run_control_path(cfg, code):
    """3-bit word -> DAC level -> shaped pulse -> I/Q modulator -> power stage.

    The output is demodulated with an ideal LO to measure envelope errors.
    sigma_phi combines the measured LO quadrature error with the RMS
    envelope phase error; sigma_A combines the LO amplitude ratio error with
    the RMS envelope amplitude error.
    """
    amp = dac_output(code, cfg.dac)
    env = make_envelope(replace(cfg.pulse, peak_amplitude=amp), cfg.sample_rate)
    i_lo, q_lo = control_lo(cfg, len(env.i))
    rf = iq_modulate(env, i_lo, q_lo)
    out = power_stage(rf, cfg.pa.gain_db, cfg.pa.v_clip)

    lo_phase, lo_ratio = measure_quadrature(i_lo, q_lo, cfg.carrier_hz)
    if amp == 0.0:
        return out, ControlMetrics(int(code), 0.0, math.degrees(lo_phase),
                                   20 * math.log10(lo_ratio), 0.0, 0.0, 0.0, 0.0, 1.0,
                                   out.clipped_fraction, 0.0, 0.0, 0.0)

    gain = 10.0 ** (cfg.pa.gain_db / 20.0)
    rec = iq_demodulate(out, cfg.carrier_hz).complex / gain
    ideal = env.complex
    active = np.abs(ideal) > 0.05 * np.abs(ideal).max()
    amp_err = (np.abs(rec) - np.abs(ideal))[active] / amp
    ph_err = wrap_phase(np.angle(rec[active]) - np.angle(ideal[active]))
    amp_rms = float(np.sqrt(np.mean(amp_err**2)))
    ph_rms = float(np.sqrt(np.mean(ph_err**2)))

    sigma_phi = math.hypot(lo_phase, ph_rms)
    sigma_a = math.hypot(lo_ratio - 1.0, amp_rms)
    try:
        axis, angle = pulse_to_rotation(env, cfg.rabi_rate_per_volt)
        theta = apply_rotation(GROUND, axis, angle).theta
    except CryoChainError:
        axis = angle = theta = None
    metrics = ControlMetrics(
        int(code), amp, math.degrees(lo_phase), 20.0 * math.log10(lo_ratio), amp_rms,
        math.degrees(ph_rms), sigma_phi, sigma_a, gate_fidelity(sigma_phi, sigma_a),
        out.clipped_fraction, axis, angle, theta)
    return out, metrics


# --- readout path -----------------------------------------------------------

@dataclass(frozen=True)
class ReadoutResult:
    state: int
    trials: int
    symbol_counts: tuple
    correct: int
    accuracy: float
    ci95: tuple
    snr_db: float  # dispersive-readout SNR of the readout spec
    effective_snr_db: float  # per-shot SNR after the LNA noise factor
    separation_rad: float


def readout_points(cfg):
    """I/Q phasors of |0> and |1> (unit amplitude) and their half separation.

    The dispersive phase +/- chi*T_meas is centred between the two state
    symbols and saturates at half their angular separation, where the
    states sit exactly on those symbols.
    """
    chi = 2.0 * math.pi * dispersive_shift(cfg.qubit)
    c = PskConstellation()
    s0, s1 = (c.angles[k] for k in STATE_SYMBOLS)
    centre = 0.5 * (s0 + s1)
    half = 0.5 * (s1 - s0)
    theta = math.copysign(min(abs(chi) * cfg.readout_spec.t_meas, half), chi)
    return np.exp(1j * (centre - theta)), np.exp(1j * (centre + theta)), theta


def assign_states(z, cfg):
    """Map received samples to qubit states via the 8-PSK decision.

    Symbols lying wholly on one side of the bisector between the two state
    points decide directly; the two symbols straddling it fall back to the
    side of the sample itself.
    """
    p0, p1, _ = readout_points(cfg)
    c = PskConstellation()
    axis = p0 - p1
    if abs(axis) < 1e-15:
        # coincident states: fixed orientation, so both states see the same rule
        c0 = c.points[STATE_SYMBOLS[0]]
        c1 = c.points[STATE_SYMBOLS[1]]
        axis = c0 - c1
    sym = psk_decide(z, c)
    sym_side = (np.conj(axis) * c.points[sym]).real
    smp_side = (np.conj(axis) * z).real
    side = np.where(np.abs(sym_side) > 1e-9, sym_side, smp_side)
    return np.where(side > 0, 0, 1), sym


def run_readout_path(cfg, qubit_state, trials, snr_db=None, seed=None):
    """Monte Carlo single-shot readout of a prepared |0> or |1>.

    Noise is referred to the LNA input: the per-shot SNR is the dispersive
    readout SNR of ``cfg.readout_spec`` (or ``snr_db`` when given) divided by the
    LNA noise factor. The LNA gain and a mid-scale AGC feed the flash ADC,
    which digitises I and Q; the recovered point goes through the 8-PSK
    decision.
    """
    if qubit_state not in (0, 1):
        raise InputError("qubit_state must be 0 or 1")
    if trials < 1:
        raise InputError("trials must be >= 1")
    snr = readout_snr(cfg.readout_spec)
    snr_in_db = snr.db if snr_db is None else snr_db
    eff_db = snr_in_db - 10.0 * math.log10(lna_noise_factor(cfg.lna))
    p0, p1, theta = readout_points(cfg)
    point = p0 if qubit_state == 0 else p1

    seed = cfg.seed if seed is None else seed
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), _STREAM_READOUT, qubit_state]))
    z = np.full(trials, point, dtype=complex)
    if eff_db != math.inf:
        sigma = math.sqrt(0.5 / 10.0 ** (eff_db / 10.0))
        noise = rng.standard_normal((2, trials))
        z = z + sigma * (noise[0] + 1j * noise[1])

    g, _ = lna_gain(cfg.lna)
    z = z * g
    # AGC: unit-amplitude phasor spans 3/4 of the half range around mid-scale
    scale = 0.75 * 0.5 * cfg.adc.v_fs / g
    mid = 0.5 * cfg.adc.v_fs
    i_rec = reconstruct(digitize(mid + scale * z.real, cfg.adc), cfg.adc) - mid
    q_rec = reconstruct(digitize(mid + scale * z.imag, cfg.adc), cfg.adc) - mid
    states, sym = assign_states(i_rec + 1j * q_rec, cfg)

    correct = int(np.count_nonzero(states == qubit_state))
    counts = tuple(int(x) for x in np.bincount(sym, minlength=8))
    return ReadoutResult(qubit_state, trials, counts, correct, correct / trials,
                         wilson_interval(correct, trials), snr.db, eff_db, theta)


# --- loopback ---------------------------------------------------------------

@dataclass(frozen=True)
class ChainReport:
    iq_phase_error: float | None = None  # deg
    amp_imbalance: float | None = None  # dB
    irr: float | None = None  # dB
    pll_lock_time: float | None = None  # s
    pll_jitter_rms: float | None = None  # deg
    lna_gain: float | None = None  # dB
    lna_noise_figure: float | None = None  # dB
    es_n0_db: float | None = None
    ser_analytic: float | None = None
    ser_mc: float | None = None
    ser_mc_ci95: tuple | None = None
    symbols: int = 0
    symbol_errors: int | None = None
    snr: float | None = None  # dB
    readout_assignment_error: float | None = None
    fidelity: float | None = None
    enob: float | None = None
    dac_max_dnl: float | None = None
    power: PowerBudget | None = None
    power_scaled: PowerBudget | None = None
    skipped: tuple = ()

    def to_dict(self):
        d = asdict(self)
        d["ser_mc_ci95"] = None if self.ser_mc_ci95 is None else list(self.ser_mc_ci95)
        d["skipped"] = list(self.skipped)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("power", "power_scaled"):
            if d.get(key) is not None:
                d[key] = PowerBudget(**d[key])
        if d.get("ser_mc_ci95") is not None:
            d["ser_mc_ci95"] = tuple(d["ser_mc_ci95"])
        d["skipped"] = tuple(d.get("skipped", ()))
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


REPORT_CSV_FIELDS = (
    "iq_phase_error_deg", "amp_imbalance_db", "irr_db", "pll_lock_time_s",
    "pll_jitter_rms_deg", "lna_gain_db", "lna_noise_figure_db", "es_n0_db",
    "ser_analytic", "ser_mc", "ser_mc_ci_lo", "ser_mc_ci_hi", "symbols", "symbol_errors",
    "snr_db", "readout_assignment_error", "fidelity", "enob", "dac_max_dnl",
    "power_w", "power_fraction", "power_scaled_w", "power_scaled_fraction", "skipped",
)


def report_csv_row(r):
    ci = r.ser_mc_ci95 or (None, None)
    p = r.power
    ps = r.power_scaled
    return (
        r.iq_phase_error, r.amp_imbalance, r.irr, r.pll_lock_time, r.pll_jitter_rms,
        r.lna_gain, r.lna_noise_figure, r.es_n0_db, r.ser_analytic, r.ser_mc, ci[0], ci[1],
        r.symbols, r.symbol_errors, r.snr, r.readout_assignment_error, r.fidelity, r.enob,
        r.dac_max_dnl, p and p.steady_state_power, p and p.budget_fraction,
        ps and ps.steady_state_power, ps and ps.budget_fraction, ";".join(r.skipped),
    )


def modulator_distortion(phase_error, ratio):
    """Baseband matrix of an imbalanced modulator seen by an ideal demodulator.

    With I-LO cos(wt) and Q-LO ratio*sin(wt + phase_error):
    I' = I - ratio*sin(phase_error)*Q, Q' = ratio*cos(phase_error)*Q.
    """
    return np.array([[1.0, -ratio * math.sin(phase_error)],
                     [0.0, ratio * math.cos(phase_error)]])


def run_loopback(cfg, symbols):
    """Push ``symbols`` through the modelled chain and collect every metric.

    Blocks that raise a model error leave their fields as None and are
    listed in ``skipped``.
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    if symbols.size == 0:
        raise InputError("need at least one symbol")
    if np.any((symbols < 0) | (symbols > 7)):
        raise InputError("symbols must be 3-bit words")
    out = {"symbols": int(symbols.size), "es_n0_db": cfg.link.es_n0_db}
    skipped = []

    def stage(name, fn):
        try:
            fn()
        except CryoChainError:
            skipped.append(name)

    def control():
        _, m = run_control_path(cfg, cfg.control_code)
        out["iq_phase_error"] = m.iq_phase_error_deg
        out["amp_imbalance"] = m.amp_imbalance_db
        out["fidelity"] = m.fidelity
        ratio = 10.0 ** (m.amp_imbalance_db / 20.0)
        out["irr"] = image_rejection_ratio(ratio, math.radians(m.iq_phase_error_deg))

    def pll():
        ps = cfg.pll_sim
        tr = simulate_lock(cfg.pll, cfg.pll.f_ref - ps.detuning_hz, dt=ps.dt, t_max=ps.t_max,
                           lock_tol=math.radians(ps.lock_tol_deg),
                           initial_phase_error=ps.initial_phase_error)
        out["pll_lock_time"] = tr.lock_time
        out["pll_jitter_rms"] = tr.jitter_rms_deg()

    def lna():
        out["lna_gain"] = lna_gain(cfg.lna)[1]
        out["lna_noise_figure"] = lna_noise_figure(cfg.lna)

    def link():
        es = cfg.link.es_n0_db
        out["ser_analytic"] = 0.0 if es is None else ser_analytic(es)
        ratio = 10.0 ** (cfg.lo.amp_imbalance_db / 20.0)
        dist = modulator_distortion(math.radians(cfg.lo.phase_error_deg), ratio)
        c = PskConstellation()
        z = c.points[symbols]
        z = (dist[0, 0] * z.real + dist[0, 1] * z.imag) \
            + 1j * (dist[1, 0] * z.real + dist[1, 1] * z.imag)
        if es is not None:
            rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), _STREAM_LOOPBACK]))
            sigma = math.sqrt(0.5 / 10.0 ** (es / 10.0)) * c.amplitude
            noise = rng.standard_normal((2, symbols.size))
            z = z + sigma * (noise[0] + 1j * noise[1])
        errors = int(np.count_nonzero(psk_decide(z, c) != symbols))
        out["symbol_errors"] = errors
        out["ser_mc"] = errors / symbols.size
        out["ser_mc_ci95"] = wilson_interval(errors, symbols.size)

    def readout():
        out["snr"] = readout_snr(cfg.readout_spec).db
        n = cfg.link.readout_trials
        r0 = run_readout_path(cfg, 0, n)
        r1 = run_readout_path(cfg, 1, n)
        out["readout_assignment_error"] = 1.0 - 0.5 * (r0.accuracy + r1.accuracy)

    def adc():
        out["enob"] = adc_enob(cfg.adc)
        dnl, _ = dac_linearity(dac_levels(cfg.dac), cfg.dac)
        out["dac_max_dnl"] = float(np.max(np.abs(dnl)))

    def power():
        out["power"], out["power_scaled"] = power_budgets(cfg.power)

    for name, fn in (("control", control), ("pll", pll), ("lna", lna), ("link", link),
                     ("readout", readout), ("adc", adc), ("power", power)):
        stage(name, fn)
    return ChainReport(**out, skipped=tuple(skipped))


def loopback_symbols(cfg):
    """Uniform random symbol stream of length ``cfg.link.n_symbols``."""
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 0]))
    return rng.integers(0, 8, size=cfg.link.n_symbols)


__all__ = [
    "ChainConfig", "ChainReport", "ControlMetrics", "LinkConfig", "LoImpairments",
    "LockSimConfig", "PaConfig", "PowerBudget", "PowerConfig", "ReadoutResult",
    "ideal_config", "loopback_symbols", "modulator_distortion", "nominal_config",
    "power_budget", "power_budgets", "power_scaling", "readout_points", "run_control_path",
    "run_loopback", "run_readout_path", "thermal_budget_fraction", "SampledSignal",
]
