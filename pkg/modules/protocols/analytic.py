from typing import Tuple

from modules.densmat.state import DomainError
from modules.protocols.registry import ProtocolSpec

Coefficients = Tuple[float, float, float, float]


def _check_fidelity(f: float):
    if not 0.25 - 1e-12 <= f <= 1. + 1e-12:
        raise DomainError(f'Fidelity must lie in [0.25, 1], got {f}.')


def _check_coefficients(coefficients):
    if min(coefficients) < 0 or abs(sum(coefficients) - 1.) > 1e-12:
        raise DomainError(f'Invalid Bell-diagonal coefficients {tuple(coefficients)}.')


def analytic_bbpssw(f: float) -> float:
    _check_fidelity(f)
    t = (1. - f) / 3.
    return (f * f + t * t) / (f * f + 2. * f * (1. - f) / 3. + 5. * t * t)


def bbpssw_success(f: float) -> float:
    _check_fidelity(f)
    t = (1. - f) / 3.
    return f * f + 2. * f * (1. - f) / 3. + 5. * t * t


def analytic_dejmps(a: float, b: float, c: float, d: float) -> Tuple[float, float]:
    """
    :return: output fidelity (a^2 + b^2) / N and success probability N = (a + b)^2 + (c + d)^2
    """
    _check_coefficients((a, b, c, d))
    n = (a + b) ** 2 + (c + d) ** 2
    return (a * a + b * b) / n, n


def nested_oracle(spec: ProtocolSpec, coefficients: Coefficients) -> Tuple[float, float]:
    """
    Noiseless output fidelity and overall success probability of a nested protocol fed with identical
    Bell-diagonal pairs. Every round consumes `copies` outputs of the round below, each of which had to succeed.
    """
    _check_coefficients(coefficients)
    protocol = spec.build()
    success = 1.
    for _ in range(spec.rounds):
        coefficients, n = protocol.analytic_round(coefficients)
        success = success ** spec.copies * n
    return coefficients[0], success
