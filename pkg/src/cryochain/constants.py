"""Physical constants (CODATA 2018 exact values) and unit helpers."""

import math

import numpy as np

K_B = 1.380649e-23  # J/K
Q_E = 1.602176634e-19  # C
H_PLANCK = 6.62607015e-34  # J*s

T_REF = 300.0  # K, reference temperature for device scaling


def db10(x):
    return 10.0 * math.log10(x)


def db20(x):
    return 20.0 * math.log10(x)


def from_db10(db):
    return 10.0 ** (db / 10.0)


def from_db20(db):
    return 10.0 ** (db / 20.0)


def wrap_phase(phi):
    """Wrap an angle (scalar or array) to the half-open interval (-pi, pi]."""
    wrapped = np.mod(-np.asarray(phi, dtype=float) + np.pi, 2.0 * np.pi)
    out = np.pi - wrapped
    if np.ndim(out) == 0:
        return float(out)
    return out
