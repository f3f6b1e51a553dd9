import itertools

import numpy as np

from modules.densmat.channel import QuantumChannel, reset_kraus
from modules.densmat.gates import I2, PAULIS, X, Y, Z
from modules.densmat.state import DomainError


class PhysicalityError(ValueError):
    pass


def _check_probability(name: str, p: float):
    if not 0. <= p <= 1.:
        raise DomainError(f'{name} must lie in [0, 1], got {p}.')


def lambda_amplitude(t: float, t1: float) -> float:
    if t1 <= 0:
        raise DomainError(f'T1 must be positive, got {t1}.')
    if t < 0:
        raise DomainError(f'Duration must be non-negative, got {t}.')
    if np.isinf(t1):
        return 0.
    return float(-np.expm1(-t / t1))


def dephasing_time(t1: float, t2: float) -> float:
    """
    T_phi = T1 T2 / (2 T1 - T2); infinite when T2 = 2 T1.
    """
    if t1 <= 0 or t2 <= 0:
        raise DomainError(f'T1 and T2 must be positive, got T1={t1}, T2={t2}.')
    if np.isinf(t2):
        return np.inf
    if np.isinf(t1):
        return t2 / 2.
    if t2 > 2. * t1 * (1. + 1e-12):
        raise PhysicalityError(f'T2={t2} exceeds 2*T1={2. * t1}.')
    denom = 2. * t1 - t2
    if denom <= 0.:
        return np.inf
    return t1 * t2 / denom


def lambda_phase(t: float, t1: float, t2: float) -> float:
    t_phi = dephasing_time(t1, t2)
    if t < 0:
        raise DomainError(f'Duration must be non-negative, got {t}.')
    if np.isinf(t_phi):
        return 0.
    return float(-np.expm1(-t / t_phi))


def depolarizing_channel(p: float) -> QuantumChannel:
    _check_probability('Depolarizing probability', p)
    return QuantumChannel([
        np.sqrt(1. - 3. * p / 4.) * I2,
        np.sqrt(p / 4.) * X,
        np.sqrt(p / 4.) * Y,
        np.sqrt(p / 4.) * Z,
    ], name=f'depolarizing({p:.4g})')


def two_qubit_depolarizing_channel(p: float) -> QuantumChannel:
    """
    Sixteen two-qubit Paulis; identity weight 1 - 15p/16, the others p/16.
    """
    _check_probability('Depolarizing probability', p)
    ops = []
    for a, b in itertools.product(PAULIS, PAULIS):
        weight = 1. - 15. * p / 16. if not ops else p / 16.
        ops.append(np.sqrt(weight) * np.kron(a, b))
    return QuantumChannel(ops, name=f'depolarizing2({p:.4g})')


def amplitude_damping_channel(lam: float) -> QuantumChannel:
    _check_probability('Amplitude damping parameter', lam)
    return QuantumChannel([
        np.array([[1, 0], [0, np.sqrt(1. - lam)]], dtype=np.complex128),
        np.array([[0, np.sqrt(lam)], [0, 0]], dtype=np.complex128),
    ], name=f'amplitude_damping({lam:.4g})')


def phase_damping_channel(lam: float) -> QuantumChannel:
    _check_probability('Phase damping parameter', lam)
    return QuantumChannel([
        np.sqrt(1. - lam / 2.) * I2,
        np.sqrt(lam / 2.) * Z,
    ], name=f'phase_damping({lam:.4g})')


def thermal_relaxation_channel(t: float, t1: float, t2: float) -> QuantumChannel:
    """
    Amplitude damping over t followed by phase damping over t.
    """
    amp = amplitude_damping_channel(lambda_amplitude(t, t1))
    phase = phase_damping_channel(lambda_phase(t, t1, t2))
    channel = phase.compose(amp)
    channel.name = f'thermal(t={t:.4g})'
    return channel


def reset_channel(p: float) -> QuantumChannel:
    _check_probability('Reset error probability', p)
    return QuantumChannel(reset_kraus(p), name=f'reset({p:.4g})')


def thermal_error_rate(t: float, t1: float, t2: float) -> float:
    return thermal_relaxation_channel(t, t1, t2).error_rate()
