"""Behavioral models of a cryogenic CMOS control and readout chain for
superconducting qubits."""

__version__ = "0.1.0"

from .errors import (
    ConfigError, CryoChainError, DecisionError, DomainError, InputError, PreconditionError,
    UnsupportedPulseError,
)
from .signal import SampledSignal
from .device import (
    DeviceEnvironment, mobility, mobility_factor, noise_power_reduction, parameter_table,
    subthreshold_swing, thermal_noise_density, threshold_voltage,
)
from .synthesis import (
    PllConfig, PllTrajectory, VcoConfig, closed_loop_magnitude, closed_loop_response,
    generate_quadrature_lo, measure_quadrature, natural_frequency_and_damping, simulate_lock,
    vco_frequency,
)
from .modulation import (
    DacConfig, IQEnvelope, PulseSpec, dac_linearity, dac_output, image_rejection_ratio,
    iq_demodulate, iq_modulate, iq_upconvert, make_envelope,
)
from .qubit import (
    EXCITED, GROUND, BlochState, ReadoutSpec, TransmonParams, anharmonicity, apply_rotation,
    coherence_envelope, dispersive_shift, gate_fidelity, pulse_to_rotation, readout_snr,
    transition_frequency,
)
from .readout import (
    AdcConfig, LnaConfig, PskConstellation, adc_enob, lna_gain, lna_noise_figure,
    priority_encode, psk_decide, quantization_noise_rms, ser_analytic, ser_monte_carlo,
    thermometer_encode,
)
from .chain import (
    ChainConfig, ChainReport, ideal_config, nominal_config, power_budget, power_scaling,
    run_loopback,
)
from .config import dump_config, load_config
