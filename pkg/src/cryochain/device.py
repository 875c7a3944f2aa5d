"""Temperature-dependent MOSFET and noise parameters for the 4 K stage.

All functions are pure and return SI units (V, V/decade, V/sqrt(Hz));
conversion to mV/dec or nV/sqrt(Hz) is left to the reporting layer.
"""

from dataclasses import dataclass, replace
import math

from .constants import K_B, Q_E, T_REF
from .errors import DomainError


@dataclass(frozen=True)
class DeviceEnvironment:
    """Device parameters at one operating temperature.

    ``phi_F`` is the Fermi potential at ``temperature``; it is taken as a
    direct input rather than derived from a doping profile.
    """

    temperature: float = 4.0
    mu_300K: float = 1.0
    alpha: float = 1.5
    vth_300K: float = 0.45
    gamma: float = 0.3
    phi_F: float = 0.25
    mobility_cap: float = 5.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"temperature must be > 0 K, got {self.temperature}")
        if not 1.5 <= self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in [1.5, 2.0], got {self.alpha}")
        if not 3.0 <= self.mobility_cap <= 5.0:
            raise DomainError(f"mobility_cap must lie in [3, 5], got {self.mobility_cap}")

    def at(self, temperature, phi_F=None):
        """Copy of this environment at another temperature."""
        kw = {"temperature": temperature}
        if phi_F is not None:
            kw["phi_F"] = phi_F
        return replace(self, **kw)


@dataclass(frozen=True)
class NoiseDensity:
    voltage_density: float  # V/sqrt(Hz)
    current_density: float  # A/sqrt(Hz)

    def __post_init__(self):
        if self.voltage_density < 0 or self.current_density < 0:
            raise DomainError("noise densities must be non-negative")


def _require_positive(name, value):
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value}")


def mobility_factor(env):
    """Mobility enhancement mu(T)/mu(300 K), clamped to ``env.mobility_cap``.

    The bare power law (T/300)^-alpha overshoots wildly at 4 K (~650x for
    alpha = 1.5); freeze-out and surface scattering limit the real gain to
    a few times, hence the clamp.
    """
    _require_positive("temperature", env.temperature)
    raw = (env.temperature / T_REF) ** (-env.alpha)
    return min(raw, env.mobility_cap)


def mobility(env):
    return env.mu_300K * mobility_factor(env)


def threshold_voltage(env):
    """V_th0 + gamma * sqrt(phi_F)."""
    if env.phi_F < 0:
        raise DomainError(f"phi_F must be >= 0, got {env.phi_F}")
    return env.vth_300K + env.gamma * math.sqrt(env.phi_F)


def subthreshold_swing(temperature):
    """Thermionic limit of the subthreshold swing, in V/decade."""
    _require_positive("temperature", temperature)
    return K_B * temperature / Q_E * math.log(10.0)


def thermal_noise_density(temperature, resistance):
    """Johnson noise voltage density sqrt(4 k T R), V/sqrt(Hz)."""
    _require_positive("temperature", temperature)
    if resistance < 0:
        raise DomainError(f"resistance must be >= 0, got {resistance}")
    return math.sqrt(4.0 * K_B * temperature * resistance)


def noise_power_reduction(t_hot, t_cold):
    """Thermal noise power ratio between two temperatures at fixed R and B."""
    _require_positive("t_hot", t_hot)
    _require_positive("t_cold", t_cold)
    return t_hot / t_cold


def parameter_table(env, temperatures=(T_REF, 4.0), resistance=50.0):
    """Table of device parameters at each temperature.

    Returns a list of ``(row label, unit, values)`` rows with one value per
    temperature. The threshold shift is zero at the 300 K reference (that
    is what V_th0 means) and uses ``env.phi_F`` at every other temperature.
    """
    temps = [float(t) for t in temperatures]
    envs = [env.at(t, phi_F=0.0 if t == T_REF else None) for t in temps]
    rows = [
        ("Carrier Mobility", "x mu_0", [mobility_factor(e) for e in envs]),
        ("Threshold Voltage", "V", [threshold_voltage(e) for e in envs]),
        ("Threshold Shift", "mV", [1e3 * (threshold_voltage(e) - e.vth_300K) for e in envs]),
        ("Subthreshold Swing", "mV/dec", [1e3 * subthreshold_swing(t) for t in temps]),
        ("Thermal Noise Density", "nV/rtHz",
         [1e9 * thermal_noise_density(t, resistance) for t in temps]),
        ("Thermal Noise", "x reduction", [noise_power_reduction(T_REF, t) for t in temps]),
    ]
    return rows
