"""
What changes when a CMOS transistor is cooled from 300 K to 4 K
================================================================

Mobility climbs (until it saturates), the threshold voltage rises, the
subthreshold swing shrinks with kT/q, and Johnson noise power falls in
proportion to temperature.
"""

import numpy as np

from cryochain import DeviceEnvironment, mobility_factor, parameter_table, subthreshold_swing

env = DeviceEnvironment()

# The default side-by-side table: room temperature against liquid helium
for label, unit, values in parameter_table(env):
    cells = "  ".join(f"{v:10.4g}" for v in values)
    print(f"{label:24s} {unit:12s} {cells}")

# Mobility follows a power law in T but is clamped at a finite ceiling;
# the sweep shows where the clamp takes over.
print()
temps = np.array([300, 200, 150, 100, 77, 40, 10, 4], dtype=float)
for t in temps:
    print(f"T = {t:5.0f} K   mobility x{mobility_factor(env.at(t)):6.3f}")

# An ideal MOSFET cannot beat kT/q * ln(10) per decade
print()
print("SS at 300 K: %.2f mV/dec, at 4 K: %.3f mV/dec"
      % (1e3 * subthreshold_swing(300.0), 1e3 * subthreshold_swing(4.0)))
