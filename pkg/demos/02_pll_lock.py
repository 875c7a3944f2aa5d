"""
Locking the local-oscillator PLL
================================

A type-1 second-order loop starting a quarter cycle out of phase and
10 Hz off frequency. We look at the loop constants, the lock time, the
residual wander, and how the closed-loop gain rolls off.
"""

import math

import numpy as np

from cryochain import PllConfig, closed_loop_magnitude, natural_frequency_and_damping, simulate_lock

cfg = PllConfig()
wn, zeta = natural_frequency_and_damping(cfg)
print(f"omega_n = {wn:.1f} rad/s, zeta = {zeta:.4f}")

traj = simulate_lock(cfg, cfg.f_ref - 10.0, t_max=5e-3, initial_phase_error=math.pi / 2)
print(f"locked after {1e3 * traj.lock_time:.3f} ms, residual wander "
      f"{traj.jitter_rms_deg():.2e} deg RMS")

# a coarse look at the phase error settling
for t in (0.0, 0.2e-3, 0.4e-3, 0.8e-3, 1.6e-3, 3.2e-3):
    k = int(np.searchsorted(traj.times, t))
    print(f"  t = {1e3 * traj.times[k]:5.2f} ms   phase error {math.degrees(traj.phase_error[k]):8.3f} deg")

# Unity at DC, low-pass above the natural frequency
print()
for f in (0.0, 100.0, 1e3, 1e4, 1e5):
    print(f"|H| at {f:8.0f} Hz = {closed_loop_magnitude(cfg, f):.4f}")
