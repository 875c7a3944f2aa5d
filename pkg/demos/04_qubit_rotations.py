"""
A transmon, a pulse, and a rotation on the Bloch sphere
=======================================================
"""

import math

import numpy as np

from cryochain import (
    GROUND, PulseSpec, TransmonParams, anharmonicity, apply_rotation, dispersive_shift,
    gate_fidelity, make_envelope, pulse_to_rotation, transition_frequency,
)

q = TransmonParams(ej_over_h=16.9e9, ec_over_h=0.2e9, g_over_2pi=100e6,
                   delta_over_2pi=1e9, t1=50e-6, t2=30e-6)
print(f"f01 = {transition_frequency(q) / 1e9:.4f} GHz, "
      f"alpha = {anharmonicity(q) / 1e6:.0f} MHz, chi = {dispersive_shift(q) / 1e6:.1f} MHz")

# A 40 ns Gaussian pulse whose area is tuned to give a pi rotation
env = make_envelope(PulseSpec(duration=40e-9, sigma=10e-9), sample_rate=5e9)
area = np.trapezoid(env.amplitude, dx=1 / env.sample_rate)
axis, angle = pulse_to_rotation(env, math.pi / area)
final = apply_rotation(GROUND, axis, angle)
print(f"pulse area {area * 1e9:.3f} V ns -> rotation {math.degrees(angle):.2f} deg, "
      f"final theta {math.degrees(final.theta):.2f} deg")

# Half-pi steps walk the state around the equator and back to the pole
state = GROUND
for step in range(4):
    state = apply_rotation(state, 0.0, math.pi / 2)
    x, y, z = state.vector
    print(f"after {step + 1} x X(pi/2): ({x:+.3f}, {y:+.3f}, {z:+.3f})")

print()
for deg in (0.5, 1.0, 2.0, 5.0):
    print(f"fidelity with {deg} deg RMS phase error: {gate_fidelity(math.radians(deg), 0.0):.6f}")
