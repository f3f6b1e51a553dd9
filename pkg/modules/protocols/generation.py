import math
from typing import Dict, List, Sequence, Tuple

from scipy.optimize import brentq

from modules.densmat.gates import GateOp, hadamard_sequence
from modules.densmat.state import (
    DensityMatrix, apply_channel, apply_unitary, fidelity_to_bell, new_ground_state, product_state
)

CALIBRATION_TOL = 1e-6
MAX_DOUBLINGS = 200


class CalibrationRangeError(ValueError):
    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class EPSource:
    """
    Raw EP supply: every tau seconds a generation cycle delivers throughput_n EPs.

    :param tau: seconds per cycle (1 / rate)
    :param throughput_n: EPs per cycle
    """

    def __init__(self, tau: float, throughput_n: int = 1):
        if tau < 0:
            raise ValueError(f'Generation time tau must be non-negative, got {tau}.')
        if int(throughput_n) != throughput_n or throughput_n < 1:
            raise ValueError(f'Throughput must be a positive integer, got {throughput_n}.')
        self.tau = float(tau)
        self.throughput_n = int(throughput_n)

    def arrival_time(self, k: int) -> float:
        """
        The k-th EP (1-based) arrives with cycle ceil(k / n).
        """
        assert k >= 1, f'EP index is 1-based, got {k}.'
        return math.ceil(k / self.throughput_n) * self.tau

    @property
    def per_ep_wait(self) -> float:
        return self.tau / self.throughput_n

    def to_dict(self) -> dict:
        return {'tau': self.tau, 'throughput_n': self.throughput_n}

    def __repr__(self):
        return f'EPSource(tau={self.tau:.4g}, n={self.throughput_n})'


def fragment_ops(qubits: Tuple[int, int], start: float, delay: float) -> List[GateOp]:
    """
    Ideal |phi+> preparation (H as RZ SX RZ, then CNOT) and the tuning Delay on both qubits.
    Only the Delay is noisy, so the raw pair carries the thermal damping of its qubits.
    """
    a, b = qubits
    ops = [GateOp(kind, [a], start, param=param, ideal=True, tag='generate') for kind, param in hadamard_sequence()]
    ops.append(GateOp('cx', [a, b], start, ideal=True, tag='generate'))
    if delay > 0:
        ops += [GateOp('delay', [q], start, param=delay, tag='generate') for q in (a, b)]
    return ops


def _initial_state(noise, qubits: Sequence[int], reused: bool) -> DensityMatrix:
    if not reused or noise is None:
        return new_ground_state(2)
    return product_state([(1. - noise.reset_error(q), noise.reset_error(q)) for q in qubits])


def raw_ep_state(delay_t: float, noise=None, qubits: Tuple[int, int] = (0, 1), reused: bool = False) -> DensityMatrix:
    """
    :param noise: NoiseModel for the idle channels; None for a noiseless fragment
    :param qubits: device qubits hosting the pair
    :param reused: start from the reset state instead of |00>
    """
    if delay_t < 0:
        raise ValueError(f'Delay must be non-negative, got {delay_t}.')
    state = _initial_state(noise, qubits, reused)
    local = {qubits[0]: 0, qubits[1]: 1}
    for op in fragment_ops(tuple(qubits), 0., delay_t):
        targets = [local[q] for q in op.targets]
        if op.kind == 'delay':
            if noise is not None:
                state = apply_channel(state, noise.idle_channel(op.targets[0], op.duration), targets)
        else:
            state = apply_unitary(state, GateOp(op.kind, targets, param=op.param))
    return state


def raw_ep_fidelity(delay_t: float, noise=None, qubits: Tuple[int, int] = (0, 1), reused: bool = False) -> float:
    return fidelity_to_bell(raw_ep_state(delay_t, noise, qubits, reused))


def calibrate_delay_for_fidelity(
        f_target: float, noise, qubits: Tuple[int, int] = (0, 1), reused: bool = False,
        tol: float = CALIBRATION_TOL
) -> float:
    """
    Delay t with raw_ep_fidelity(t) = f_target, by doubling a bracket from zero delay and a root search inside it.
    Raises CalibrationRangeError naming the achievable interval when f_target is out of reach.
    """
    def fid(t):
        return raw_ep_fidelity(t, noise, qubits, reused)

    f_max = fid(0.)
    if f_target > f_max + tol:
        raise CalibrationRangeError(
            f'Raw EP fidelity {f_target:.6g} is out of reach on qubits {tuple(qubits)}: '
            f'the maximum is {f_max:.6g} at zero delay.', lower=float('nan'), upper=f_max
        )
    if f_target >= f_max - tol:
        return 0.
    if noise is None or not noise.has_thermal(qubits):
        raise CalibrationRangeError(
            f'Raw EP fidelity is {f_max:.6g} for every delay on qubits {tuple(qubits)} '
            f'(no thermal relaxation), cannot reach {f_target:.6g}.', lower=f_max, upper=f_max
        )
    times = [noise.config.qubit(q).t1 for q in qubits] + [noise.config.qubit(q).t2 for q in qubits]
    hi = min(t for t in times if math.isfinite(t)) * 1e-3
    f_hi = fid(hi)
    for _ in range(MAX_DOUBLINGS):
        if f_hi < f_target:
            break
        hi *= 2.
        f_hi = fid(hi)
    else:
        raise CalibrationRangeError(
            f'Raw EP fidelity {f_target:.6g} is out of reach on qubits {tuple(qubits)}: '
            f'achievable range is ({f_hi:.6g}, {f_max:.6g}].', lower=f_hi, upper=f_max
        )
    return float(brentq(lambda t: fid(t) - f_target, 0., hi, xtol=1e-18, rtol=1e-12))


class DelayCalibrator:
    """
    Memoized calibration keyed by the physical parameters of the slot qubits,
    so identical qubits share one root search.
    """

    def __init__(self, noise, tol: float = CALIBRATION_TOL):
        self.noise = noise
        self.tol = tol
        self._cache: Dict[tuple, float] = {}

    def _key(self, qubits, reused, f_target):
        params = []
        for q in qubits:
            props = self.noise.config.qubit(q)
            params += [props.t1, props.t2, self.noise.reset_error(q) if reused else 0.]
        return tuple(params) + (reused, round(f_target, 12))

    def __call__(self, qubits: Tuple[int, int], reused: bool, f_target: float) -> float:
        key = self._key(qubits, reused, f_target)
        if key not in self._cache:
            self._cache[key] = calibrate_delay_for_fidelity(f_target, self.noise, qubits, reused, tol=self.tol)
        return self._cache[key]
