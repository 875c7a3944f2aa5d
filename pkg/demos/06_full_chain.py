"""
End to end: control pulse out, readout symbols back
===================================================

Compare a perfectly balanced chain with one carrying the nominal LO skew,
then project the power at a lower supply.
"""

from cryochain import ideal_config, nominal_config, power_scaling, run_loopback
from cryochain.chain import loopback_symbols

for name, cfg in (("ideal", ideal_config()), ("nominal", nominal_config())):
    r = run_loopback(cfg, loopback_symbols(cfg))
    print(f"[{name}] IRR {r.irr:.1f} dB, I/Q error {r.iq_phase_error:.2f} deg, "
          f"SER {r.ser_mc:.1e} over {r.symbols} symbols, gate fidelity {r.fidelity:.5f}")

p = power_scaling(199.7e-3, 1.8, 1.2)
print(f"\nsteady-state power 199.7 mW at 1.8 V -> {p * 1e3:.1f} mW at 1.2 V "
      f"({100 * p:.1f} % of a 1 W stage budget)")
