"""Command-line front end.

    python -m cryochain {device,pll,ser,chain,power} [--config PATH] [--seed N]
                        [--out DIR] [--trials N] [--format {json,csv,both}]

Exit codes: 0 success, 2 usage or configuration error, 3 numerical
precondition violated. Every invocation writes ``run_manifest.json`` into
the output directory.
"""

import argparse
import csv
from dataclasses import replace
import datetime as _dt
import json
import math
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .chain import ChainConfig, loopback_symbols, power_budget, power_scaling, run_loopback
from .config import load_config
from .device import parameter_table
from .errors import ConfigError, InputError, PreconditionError
from .readout import ser_analytic, ser_monte_carlo
from .synthesis import simulate_lock

DEFAULT_SEED = 20240607

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

PLL_CSV_HEADER = ("time_s", "v_error", "v_ctrl", "phase_error_rad")
SER_CSV_HEADER = ("es_n0_db", "ser_analytic", "ser_mc", "ci_lo", "ci_hi")
POWER_CSV_HEADER = ("parameter", "current", "projected")


class UsageError(Exception):
    pass


def device_csv_header(temperatures):
    return ("parameter", "unit") + tuple(f"T_{t:g}K" for t in temperatures)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def _load(args):
    cfg = load_config(args.config) if args.config else ChainConfig()
    seed = DEFAULT_SEED if args.seed is None else args.seed
    return replace(cfg, seed=seed)


def _want(args, kind):
    return args.format in (kind, "both")


# --- subcommands ------------------------------------------------------------

def cmd_device(args, out):
    cfg = _load(args)
    temps = args.temperatures
    rows = parameter_table(cfg.device, temps)
    width = max(len(r[0]) for r in rows)
    print(f"{'Parameter':<{width}}  {'Unit':<12}" + "".join(f"{t:>12g} K" for t in temps))
    for label, unit, values in rows:
        print(f"{label:<{width}}  {unit:<12}" + "".join(f"{v:>14.4g}" for v in values))
    if _want(args, "csv"):
        _write_csv(out / "device_table.csv", device_csv_header(temps),
                   [(label, unit, *values) for label, unit, values in rows])
    if _want(args, "json"):
        _write_json(out / "device_table.json",
                    {"temperatures_k": list(temps),
                     "rows": [{"parameter": l, "unit": u, "values": v} for l, u, v in rows]})
    return EXIT_OK


def cmd_pll(args, out):
    cfg = _load(args)
    ps = cfg.pll_sim
    dt = args.dt if args.dt is not None else ps.dt
    limit = 0.1 / cfg.pll.omega_n
    if dt is not None and not 0 < dt < limit:
        raise UsageError(f"pll_sim.dt = {dt:g} s must lie in (0, {limit:g}) s for this loop")
    tr = simulate_lock(cfg.pll, cfg.pll.f_ref - ps.detuning_hz, dt=dt, t_max=ps.t_max,
                       lock_tol=math.radians(ps.lock_tol_deg),
                       initial_phase_error=ps.initial_phase_error)
    _write_csv(out / "pll_trajectory.csv", PLL_CSV_HEADER,
               zip(tr.times.tolist(), tr.v_error.tolist(), tr.v_ctrl.tolist(),
                   tr.phase_error.tolist()))
    summary = {
        "omega_n_rad_s": cfg.pll.omega_n,
        "zeta": cfg.pll.zeta,
        "lock_time_s": tr.lock_time,
        "jitter_rms_deg": tr.jitter_rms_deg(),
        "final_v_ctrl": float(tr.v_ctrl[-1]),
    }
    _write_json(out / "pll_summary.json", summary)
    print(f"omega_n = {summary['omega_n_rad_s']:.1f} rad/s, zeta = {summary['zeta']:.4f}")
    if tr.lock_time is None:
        print("warning: loop did not lock within the simulated window", file=sys.stderr)
        print("lock_time = null")
    else:
        print(f"lock_time = {tr.lock_time * 1e3:.4f} ms")
        print(f"jitter_rms = {summary['jitter_rms_deg']:.3g} deg")
    return EXIT_OK


def cmd_ser(args, out):
    cfg = _load(args)
    start, stop, step = args.sweep
    if step <= 0 or stop < start:
        raise UsageError("empty sweep: need STOP >= START and STEP > 0")
    points = np.round(np.arange(start, stop + 0.5 * step, step), 10)
    if points.size == 0:
        raise UsageError("empty sweep range")
    trials = args.trials or 100_000
    rows = []
    for k, es in enumerate(points.tolist()):
        seed_k = int(np.random.SeedSequence([cfg.seed, k]).generate_state(1)[0])
        mc = ser_monte_carlo(es, trials, seed=seed_k, partitions=args.partitions)
        rows.append((es, ser_analytic(es), mc.ser, mc.ci95[0], mc.ci95[1]))
        print(f"{es:7.2f} dB  analytic {rows[-1][1]:.3e}  mc {mc.ser:.3e}"
              f"  [{mc.ci95[0]:.3e}, {mc.ci95[1]:.3e}]")
    _write_csv(out / "ser_sweep.csv", SER_CSV_HEADER, rows)
    return EXIT_OK


# row labels follow the performance-comparison table
_SUMMARY_ROWS = (
    ("Temperature", lambda r, c: f"{c.device.temperature:g} K"),
    ("DAC/ADC Bits", lambda r, c: f"{c.dac.n_bits}/{c.adc.n_bits}"),
    ("I/Q Phase Error", lambda r, c: _fmt(r.iq_phase_error, "{:.3f}°")),
    ("LNA Gain", lambda r, c: _fmt(r.lna_gain, "{:.2f} dB")),
    ("Image Rejection", lambda r, c: _fmt(r.irr, "{:.2f} dB")),
    ("Amplitude Imbalance", lambda r, c: _fmt(r.amp_imbalance, "{:.3f} dB")),
    ("PLL Lock Time", lambda r, c: _fmt(r.pll_lock_time and r.pll_lock_time * 1e3, "{:.3f} ms")),
    ("PLL Jitter", lambda r, c: _fmt(r.pll_jitter_rms, "{:.3g}° RMS")),
    ("Symbol Error Rate", lambda r, c: f"{_fmt(r.ser_analytic, '{:.3g}')} analytic, "
                                       f"{_fmt(r.ser_mc, '{:.3g}')} MC"),
    ("Readout SNR", lambda r, c: _fmt(r.snr, "{:.2f} dB")),
    ("Gate Fidelity", lambda r, c: _fmt(r.fidelity, "{:.6f}")),
    ("ADC ENOB", lambda r, c: _fmt(r.enob, "{:.3f} bits")),
    ("Steady-State Power", lambda r, c: f"{r.power.steady_state_power * 1e3:.1f} mW -> "
                                        f"{r.power_scaled.steady_state_power * 1e3:.1f} mW"
                                        if r.power and r.power_scaled else "skipped"),
    ("Thermal Budget Use", lambda r, c: f"{r.power.budget_fraction:.1%} -> "
                                        f"{r.power_scaled.budget_fraction:.1%}"
                                        if r.power and r.power_scaled else "skipped"),
)


def _fmt(v, spec):
    return "skipped" if v is None else spec.format(v)


def cmd_chain(args, out):
    from .chain import REPORT_CSV_FIELDS, report_csv_row

    cfg = _load(args)
    if args.trials:
        cfg = replace(cfg, link=replace(cfg.link, n_symbols=args.trials))
    report = run_loopback(cfg, loopback_symbols(cfg))
    if _want(args, "json"):
        (out / "chain_report.json").write_text(report.to_json())
    if _want(args, "csv"):
        _write_csv(out / "chain_report.csv", REPORT_CSV_FIELDS, [report_csv_row(report)])
    for label, fn in _SUMMARY_ROWS:
        print(f"{label:<20} {fn(report, cfg)}")
    if report.skipped:
        print(f"skipped blocks: {', '.join(report.skipped)}", file=sys.stderr)
    return EXIT_OK


def cmd_power(args, out):
    p_new = power_scaling(args.p_mw * 1e-3, args.vdd_from, args.vdd_to)
    ref = power_budget(None, args.vdd_from, args.p_mw * 1e-3, args.budget_w)
    new = power_budget(None, args.vdd_to, p_new, args.budget_w)
    rows = [
        ("Supply Voltage (V)", args.vdd_from, args.vdd_to),
        ("Steady-State Power (mW)", args.p_mw, p_new * 1e3),
        ("Thermal Budget Use (%)", 100 * ref.budget_fraction, 100 * new.budget_fraction),
    ]
    print(f"{'Parameter':<26}{'Current':>12}{'Projected':>12}")
    for label, a, b in rows:
        print(f"{label:<26}{a:>12.2f}{b:>12.2f}")
    if new.over_budget or ref.over_budget:
        print("warning: power exceeds the stage budget", file=sys.stderr)
    _write_csv(out / "power.csv", POWER_CSV_HEADER, rows)
    return EXIT_OK


COMMANDS = {"device": cmd_device, "pll": cmd_pll, "ser": cmd_ser, "chain": cmd_chain,
            "power": cmd_power}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config document")
    common.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--out", metavar="DIR", default="cryochain_out",
                        help="output directory (default ./cryochain_out)")
    common.add_argument("--trials", type=int, default=None,
                        help="Monte Carlo trials (ser) or loopback symbols (chain)")
    common.add_argument("--format", choices=("json", "csv", "both"), default="both")

    parser = argparse.ArgumentParser(prog="cryochain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("device", parents=[common], help="cryogenic device parameter table")
    p.add_argument("--temperatures", type=float, nargs="+", default=[300.0, 4.0],
                   metavar="K")

    p = sub.add_parser("pll", parents=[common], help="PLL lock transient")
    p.add_argument("--dt", type=float, default=None, help="integration step override (s)")

    p = sub.add_parser("ser", parents=[common], help="8-PSK SER sweep")
    p.add_argument("--sweep", type=float, nargs=3, metavar=("START", "STOP", "STEP"),
                   default=[0.0, 20.0, 1.0])
    p.add_argument("--partitions", type=int, default=1)

    sub.add_parser("chain", parents=[common], help="end-to-end loopback report")

    p = sub.add_parser("power", parents=[common], help="supply-scaling power projection")
    p.add_argument("--p-mw", type=float, default=199.7)
    p.add_argument("--vdd-from", type=float, default=1.8)
    p.add_argument("--vdd-to", type=float, default=1.2)
    p.add_argument("--budget-w", type=float, default=1.0)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    out = Path(args.out)
    manifest = {
        "subcommand": args.command,
        "config": args.config,
        "seed": DEFAULT_SEED if args.seed is None else args.seed,
        "out": str(out),
        "version": __version__,
        "started": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    try:
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "run_manifest.json", manifest)
        return COMMANDS[args.command](args, out)
    except (UsageError, ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"error: numerical precondition violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
