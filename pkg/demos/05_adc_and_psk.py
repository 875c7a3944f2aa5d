"""
Flash ADC and 8-PSK on the readout side
=======================================
"""

import numpy as np

from cryochain import AdcConfig, adc_enob, quantization_noise_rms, ser_analytic, ser_monte_carlo
from cryochain.readout import code_bits, digitize

cfg = AdcConfig(n_bits=3, v_fs=2.5)
print(f"LSB {cfg.v_lsb * 1e3:.1f} mV, quantization noise {quantization_noise_rms(cfg) * 1e3:.1f} mV RMS")

v = np.array([0.1, 0.5, 1.0, 1.6, 2.2, 2.49])
for x, c in zip(v, digitize(v, cfg)):
    print(f"  {x:4.2f} V -> {code_bits(int(c))}")

# Comparator offsets cost effective bits; average a few mismatch draws
print(f"\nideal ENOB {adc_enob(cfg):.3f}")
for sigma in (0.1, 0.2, 0.4):
    e = np.mean([adc_enob(cfg.with_offset_sigma(sigma * cfg.v_lsb, seed=s)) for s in range(8)])
    print(f"  offset sigma {sigma:.1f} LSB -> ENOB {e:.3f}")

print("\nEs/N0 (dB)  analytic SER   Monte Carlo (2e5 trials)")
for es in (6.0, 8.0, 10.0, 12.0, 14.0):
    mc = ser_monte_carlo(es, 200_000, seed=int(es))
    print(f"{es:8.1f}    {ser_analytic(es):.4e}    {mc.ser:.4e}  "
          f"[{mc.ci95[0]:.4e}, {mc.ci95[1]:.4e}]")
print(f"{19.1:8.1f}    {ser_analytic(19.1):.4e}")
