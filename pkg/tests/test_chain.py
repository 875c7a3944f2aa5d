import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import poisson

from cryochain.chain import (
    STATE_SYMBOLS, ChainConfig, ChainReport, LinkConfig, LoImpairments, PowerConfig,
    assign_states, ideal_config, loopback_symbols, modulator_distortion, nominal_config,
    power_budget, power_budgets, power_scaling, readout_points, report_csv_row,
    REPORT_CSV_FIELDS, run_control_path, run_loopback, run_readout_path,
    thermal_budget_fraction,
)
from cryochain.errors import InputError
from cryochain.modulation import IRR_CAP_DB
from cryochain.qubit import TransmonParams
from cryochain.readout import LnaConfig, q_function, ser_monte_carlo


def test_power_scaling_examples():
    assert power_scaling(0.1997, 1.8, 1.2) * 1e3 == pytest.approx(88.76, abs=0.01)
    assert power_scaling(0.1997, 1.8, 1.8) == 0.1997
    assert power_scaling(0.1, 2.0, 1.0) == pytest.approx(0.025)
    with pytest.raises(InputError):
        power_scaling(0.1, 0.0, 1.0)


def test_thermal_budget_fraction_examples():
    assert thermal_budget_fraction(0.1997, 1.0) == pytest.approx(0.1997)
    assert thermal_budget_fraction(0.08876, 1.0) == pytest.approx(0.0888, abs=5e-4)
    assert thermal_budget_fraction(1.0, 1.0) == 1.0


def test_power_budget_flags_overrun():
    b = power_budget(65, 1.2, 1.5, 1.0)
    assert b.over_budget and b.budget_fraction == 1.0


def test_power_budgets_default():
    ref, scaled = power_budgets(PowerConfig())
    assert ref.budget_fraction == pytest.approx(0.1997)
    assert scaled.steady_state_power == pytest.approx(0.0887556, rel=1e-6)
    assert scaled.node == 65


def test_control_path_code_zero():
    _, m = run_control_path(ideal_config(), 0)
    assert m.fidelity == 1.0 and m.amplitude_v == 0.0


def test_control_path_ideal_full_scale():
    cfg = ideal_config()
    _, m = run_control_path(cfg, 0b111)
    assert m.envelope_amp_rms < 0.01
    assert math.degrees(m.sigma_phi) < 0.1
    assert m.rotation_angle == pytest.approx(math.pi, rel=2e-3)
    assert m.final_theta == pytest.approx(math.pi, abs=3e-3)


def test_control_path_injected_phase_error():
    _, m = run_control_path(nominal_config(), 0b111)
    assert m.iq_phase_error_deg == pytest.approx(1.8, abs=0.1)
    assert math.degrees(m.sigma_phi) == pytest.approx(1.8, abs=0.1)
    assert m.fidelity == pytest.approx(0.99951, abs=2e-5)


def test_control_path_amplitude_imbalance_feeds_sigma_a():
    cfg = ideal_config(lo=LoImpairments(phase_error_deg=0.0, amp_imbalance_db=-0.3))
    _, m = run_control_path(cfg, 0b111)
    assert m.amp_imbalance_db == pytest.approx(-0.3, abs=1e-6)
    assert m.sigma_a >= 1 - 10 ** (-0.015)


def test_readout_points_saturate_on_state_symbols():
    p0, p1, theta = readout_points(ChainConfig())
    # symbols 001 and 011 sit at 45 and 135 degrees
    assert theta == pytest.approx(math.pi / 4)
    assert np.isclose(np.angle(p0), math.pi / 4) and np.isclose(np.angle(p1), 3 * math.pi / 4)


def test_readout_points_small_shift():
    cfg = ChainConfig(qubit=TransmonParams(g_over_2pi=5e6))  # chi = 25 kHz
    _, _, theta = readout_points(cfg)
    assert theta == pytest.approx(2 * math.pi * 25e3 * 1e-6)


def test_assign_states_on_noiseless_points():
    cfg = ChainConfig()
    p0, p1, _ = readout_points(cfg)
    states, sym = assign_states(np.array([p0, p1]), cfg)
    assert states.tolist() == [0, 1]
    assert sym.tolist() == list(STATE_SYMBOLS)


@pytest.mark.parametrize("state", [0, 1])
def test_readout_noiseless_is_perfect(state):
    r = run_readout_path(ChainConfig(), state, 2000, snr_db=math.inf)
    assert r.accuracy == 1.0


@pytest.mark.parametrize("state", [0, 1])
def test_readout_at_10db_matches_binary_oracle(state):
    cfg = ChainConfig(lna=LnaConfig(e_n=0.0, i_n=0.0))
    r = run_readout_path(cfg, state, 400_000, snr_db=10.0)
    p_err = float(q_function(math.sqrt(2 * 10.0) * math.sin(r.separation_rad)))
    lo, hi = r.ci95
    assert lo <= 1 - p_err <= hi


def test_readout_without_dispersive_shift_is_a_coin_flip():
    cfg = ChainConfig(qubit=TransmonParams(g_over_2pi=0.0))
    r0 = run_readout_path(cfg, 0, 20_000, snr_db=10.0)
    r1 = run_readout_path(cfg, 1, 20_000, snr_db=10.0)
    assert 0.5 * (r0.accuracy + r1.accuracy) == pytest.approx(0.5, abs=0.02)


def test_readout_rejects_bad_state():
    with pytest.raises(InputError):
        run_readout_path(ChainConfig(), 2, 10)


def test_modulator_distortion_identity():
    assert np.allclose(modulator_distortion(0.0, 1.0), np.eye(2))


def test_loopback_ideal():
    cfg = ideal_config()
    r = run_loopback(cfg, loopback_symbols(cfg))
    assert r.symbols == 10_000 and r.symbol_errors == 0 and r.ser_mc == 0.0
    assert r.irr == IRR_CAP_DB
    assert r.skipped == ()
    assert ChainReport.from_json(r.to_json()) == r


def test_loopback_nominal():
    cfg = nominal_config()
    r = run_loopback(cfg, loopback_symbols(cfg))
    assert r.irr == pytest.approx(36.1, abs=0.05)
    assert r.iq_phase_error < 2.0
    assert r.lna_gain == pytest.approx(13.98, abs=0.01)
    assert r.ser_analytic == pytest.approx(1.06e-6, rel=0.01)
    # expected error count is ~0.03 here, so judge the draw by its Poisson tail
    lam = r.symbols * ser_monte_carlo(19.1, 2_000_000, seed=3,
                                      distortion=modulator_distortion(math.radians(1.8), 1.0)).ser
    assert poisson.sf(r.symbol_errors - 1, lam) > 1e-3
    assert r.pll_lock_time < 2e-3 and r.pll_jitter_rms < 0.5
    assert r.power.steady_state_power == 0.1997
    assert r.power_scaled.steady_state_power * 1e3 == pytest.approx(88.76, abs=0.01)


def test_loopback_skips_failing_block():
    # a PLL step above the stability limit skips only the PLL block
    cfg = replace(nominal_config(), pll_sim=replace(ChainConfig().pll_sim, dt=1e-3))
    r = run_loopback(cfg, [0, 1, 2])
    assert r.skipped == ("pll",)
    assert r.pll_lock_time is None and r.irr is not None


def test_loopback_rejects_bad_symbols():
    with pytest.raises(InputError):
        run_loopback(ChainConfig(), [8])
    with pytest.raises(InputError):
        run_loopback(ChainConfig(), [])


def test_loopback_deterministic():
    cfg = ChainConfig(link=LinkConfig(es_n0_db=12.0, n_symbols=5000, readout_trials=2000))
    a = run_loopback(cfg, loopback_symbols(cfg)).to_json()
    b = run_loopback(cfg, loopback_symbols(cfg)).to_json()
    assert a == b


def test_report_csv_row_matches_header():
    cfg = ideal_config()
    r = run_loopback(cfg, [0, 3, 5])
    assert len(report_csv_row(r)) == len(REPORT_CSV_FIELDS)


def test_chain_config_sampling_precondition():
    with pytest.raises(InputError):
        ChainConfig(sample_rate=20e9)
