from modules.noise.channels import (
    PhysicalityError, amplitude_damping_channel, dephasing_time, depolarizing_channel, lambda_amplitude,
    lambda_phase, phase_damping_channel, reset_channel, thermal_error_rate, thermal_relaxation_channel,
    two_qubit_depolarizing_channel
)
from modules.noise.device import (
    DeviceConfig, GateProperties, QubitProperties, SchemaError, dump_device_config, intra_node_pairs,
    load_device_config, parse_device_config, uniform_device_config
)
from modules.noise.model import NoiseModel, build_noise_model, is_noiseless, residual_depolarizing
from modules.noise.rates import ERROR_TYPES, ErrorRates, estimate_error_rates
