"""
Quadrature LO imbalance and image rejection
===========================================

Build an LO pair with a deliberate 1.8 degree skew, measure the skew back
from the waveforms, and see what it costs in image rejection.
"""

import math

import numpy as np

from cryochain import generate_quadrature_lo, image_rejection_ratio
from cryochain.synthesis import measure_quadrature

f_lo, fs = 100e6, 2e9
i_lo, q_lo = generate_quadrature_lo(f_lo, 1.0, fs, 2e-6, phase_error=math.radians(1.8),
                                    amp_imbalance_db=-0.3)
phase, ratio = measure_quadrature(i_lo, q_lo, f_lo)
print(f"measured skew {math.degrees(phase):.4f} deg, amplitude ratio "
      f"{20 * math.log10(ratio):.4f} dB")

print(f"IRR with the skew alone:       {image_rejection_ratio(1.0, math.radians(1.8)):.2f} dB")
print(f"IRR with skew and 0.3 dB gain: {image_rejection_ratio(ratio, phase):.2f} dB")

# Rejection grid: phase error along rows, amplitude imbalance along columns
print()
imbalances_db = [0.0, 0.1, 0.3, 1.0]
print("phase \\ dB " + "".join(f"{d:9.1f}" for d in imbalances_db))
for deg in (0.5, 1.0, 1.8, 3.0, 5.0):
    row = [image_rejection_ratio(10 ** (-d / 20), math.radians(deg)) for d in imbalances_db]
    print(f"{deg:8.1f}   " + "".join(f"{x:9.2f}" for x in row))
