"""
Dense density matrices over qubits. Qubit 0 is the most significant bit of the basis index.
Operators act on the (2,) * 2n tensor view: row axes 0..n-1, column axes n..2n-1.
"""
from typing import Dict, Sequence, Tuple

import numpy as np

from modules.densmat.channel import QuantumChannel, reset_kraus
from modules.densmat.gates import GateOp

MAX_QUBITS = 12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
DEGENERATE_PROB = 1e-12


class CapacityError(Exception):
    pass


class DomainError(ValueError):
    pass


class DegenerateBranchError(Exception):
    pass


def set_max_qubits(cap: int):
    global MAX_QUBITS
    assert cap >= 1, f'Qubit cap must be positive, got {cap}.'
    MAX_QUBITS = int(cap)


def _check_capacity(num_qubits: int):
    if num_qubits > MAX_QUBITS:
        raise CapacityError(f'{num_qubits} qubits exceed the dense simulation cap of {MAX_QUBITS} qubits.')


class DensityMatrix:
    """
    Immutable from the caller's view: every operation returns a new instance.

    :param data: 2**n x 2**n complex matrix
    :param check: verify Hermiticity
    """

    def __init__(self, data: np.ndarray, check: bool = True):
        data = np.asarray(data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DomainError(f'Density matrix must be square, got shape {data.shape}.')
        num_qubits = int(round(np.log2(data.shape[0])))
        if num_qubits < 1 or 2 ** num_qubits != data.shape[0]:
            raise DomainError(f'Dimension {data.shape[0]} is not a power of two >= 2.')
        _check_capacity(num_qubits)
        if check and not np.allclose(data, data.conj().T, rtol=0., atol=HERMITIAN_TOL * max(1, data.shape[0])):
            raise DomainError('Density matrix is not Hermitian.')
        self.data = data
        self.num_qubits = num_qubits

    @classmethod
    def from_tensor(cls, tensor: np.ndarray, check: bool = False) -> 'DensityMatrix':
        dim = int(np.sqrt(tensor.size))
        return cls(tensor.reshape(dim, dim), check=check)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def tensor(self) -> np.ndarray:
        return self.data.reshape((2,) * (2 * self.num_qubits))

    @property
    def trace_weight(self) -> float:
        return float(np.trace(self.data).real)

    def normalized(self) -> 'DensityMatrix':
        w = self.trace_weight
        if w < DEGENERATE_PROB:
            raise DegenerateBranchError(f'Cannot normalize a branch of weight {w:.3e}.')
        return DensityMatrix(self.data / w, check=False)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T)).min())

    def is_physical(self, tol: float = TRACE_TOL) -> bool:
        """
        Hermitian, unit trace and PSD. Test paths only.
        """
        return (
            np.allclose(self.data, self.data.conj().T, rtol=0., atol=tol)
            and abs(self.trace_weight - 1.) < tol
            and self.min_eigenvalue() >= PSD_FLOOR
        )

    def __repr__(self):
        return f'DensityMatrix(num_qubits={self.num_qubits}, trace={self.trace_weight:.6g})'


BELL_VECTORS = {
    'phi+': np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2),
    'phi-': np.array([1, 0, 0, -1], dtype=np.complex128) / np.sqrt(2),
    'psi+': np.array([0, 1, 1, 0], dtype=np.complex128) / np.sqrt(2),
    'psi-': np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2),
}


def new_ground_state(num_qubits: int) -> DensityMatrix:
    if num_qubits < 1:
        raise DomainError(f'Need at least one qubit, got {num_qubits}.')
    _check_capacity(num_qubits)
    data = np.zeros((2 ** num_qubits, 2 ** num_qubits), dtype=np.complex128)
    data[0, 0] = 1.
    return DensityMatrix(data, check=False)


def product_state(diagonals: Sequence[Tuple[float, float]]) -> DensityMatrix:
    data = np.ones((1, 1), dtype=np.complex128)
    for p0, p1 in diagonals:
        data = np.kron(data, np.diag([p0, p1]).astype(np.complex128))
    return DensityMatrix(data, check=False)


def make_bell_diagonal(a: float, b: float, c: float, d: float) -> DensityMatrix:
    """
    a|phi+><phi+| + b|phi-><phi-| + c|psi+><psi+| + d|psi-><psi-|
    """
    coeffs = (a, b, c, d)
    if min(coeffs) < 0:
        raise DomainError(f'Bell-diagonal coefficients must be non-negative, got {coeffs}.')
    if abs(sum(coeffs) - 1.) > 1e-12:
        raise DomainError(f'Bell-diagonal coefficients must sum to 1, got {sum(coeffs):.12g}.')
    data = sum(
        w * np.outer(v, v.conj())
        for w, v in zip(coeffs, BELL_VECTORS.values())
    )
    return DensityMatrix(data, check=False)


def make_werner(fidelity: float) -> DensityMatrix:
    if not 0.25 - 1e-12 <= fidelity <= 1. + 1e-12:
        raise DomainError(f'Werner fidelity must lie in [0.25, 1], got {fidelity}.')
    fidelity = min(max(fidelity, 0.25), 1.)
    tail = (1. - fidelity) / 3.
    data = fidelity * np.outer(BELL_VECTORS['phi+'], BELL_VECTORS['phi+'].conj()) \
        + tail * (np.eye(4, dtype=np.complex128) - np.outer(BELL_VECTORS['phi+'], BELL_VECTORS['phi+'].conj()))
    return DensityMatrix(data, check=False)


def _check_targets(state: DensityMatrix, targets: Sequence[int]):
    for t in targets:
        if not 0 <= t < state.num_qubits:
            raise IndexError(f'Qubit {t} out of range for a {state.num_qubits}-qubit state.')
    if len(set(targets)) != len(targets):
        raise DomainError(f'Repeated qubit in {tuple(targets)}.')


def _restore_axes(res: np.ndarray, moved: Sequence[int], num_qubits: int, offset: int) -> np.ndarray:
    return np.moveaxis(res, list(range(len(moved))), [offset + t for t in moved])


def _left(tensor: np.ndarray, op: np.ndarray, targets: Sequence[int], num_qubits: int) -> np.ndarray:
    k = len(targets)
    op_t = op.reshape((2,) * (2 * k))
    res = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), list(targets)))
    return _restore_axes(res, targets, num_qubits, 0)


def _right_adjoint(tensor: np.ndarray, op: np.ndarray, targets: Sequence[int], num_qubits: int) -> np.ndarray:
    k = len(targets)
    op_t = op.conj().reshape((2,) * (2 * k))
    res = np.tensordot(op_t, tensor, axes=(list(range(k, 2 * k)), [num_qubits + t for t in targets]))
    return _restore_axes(res, targets, num_qubits, num_qubits)


def apply_operator(state: DensityMatrix, op: np.ndarray, targets: Sequence[int]) -> DensityMatrix:
    """
    rho -> K rho K^dag with K embedded on targets.
    """
    targets = tuple(targets)
    _check_targets(state, targets)
    n = state.num_qubits
    tensor = _left(state.tensor, op, targets, n)
    tensor = _right_adjoint(tensor, op, targets, n)
    return DensityMatrix.from_tensor(tensor)


def apply_unitary(state: DensityMatrix, gate: GateOp) -> DensityMatrix:
    if not gate.is_unitary:
        raise DomainError(f'Gate \'{gate.kind}\' is not unitary.')
    return apply_operator(state, gate.matrix(), gate.targets)


def apply_channel(state: DensityMatrix, channel: QuantumChannel, targets: Sequence[int]) -> DensityMatrix:
    targets = tuple(targets)
    if len(targets) != channel.arity:
        raise DomainError(f'Channel \'{channel.name}\' acts on {channel.arity} qubit(s), got targets {targets}.')
    _check_targets(state, targets)
    n, k = state.num_qubits, channel.arity
    in_axes = list(range(2 * k, 4 * k))
    res = np.tensordot(
        channel.superoperator(), state.tensor,
        axes=(in_axes, list(targets) + [n + t for t in targets])
    )
    res = np.moveaxis(res, list(range(2 * k)), list(targets) + [n + t for t in targets])
    return DensityMatrix.from_tensor(res)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    _check_capacity(a.num_qubits + b.num_qubits)
    return DensityMatrix(np.kron(a.data, b.data), check=False)


def _kept_qubits(state: DensityMatrix, discard: Sequence[int]):
    discard = set(discard)
    return [q for q in range(state.num_qubits) if q not in discard]


def partial_trace(state: DensityMatrix, discard: Sequence[int]) -> DensityMatrix:
    discard = tuple(discard)
    if len(discard) == 0:
        raise DomainError('Nothing to trace out.')
    _check_targets(state, discard)
    kept = _kept_qubits(state, discard)
    if not kept:
        raise DomainError('Cannot trace out every qubit.')
    n = state.num_qubits
    labels = list(range(n)) + [n + q if q in kept else q for q in range(n)]
    out = kept + [n + q for q in kept]
    reduced = np.einsum(state.tensor, labels, out)
    return DensityMatrix.from_tensor(reduced)


def reduce_to(state: DensityMatrix, qubits: Sequence[int]) -> DensityMatrix:
    """
    Reduced state on qubits, in the given order.
    """
    qubits = tuple(qubits)
    _check_targets(state, qubits)
    n = state.num_qubits
    labels = list(range(n)) + [n + q if q in qubits else q for q in range(n)]
    out = list(qubits) + [n + q for q in qubits]
    return DensityMatrix.from_tensor(np.einsum(state.tensor, labels, out))


def fidelity_to_bell(state: DensityMatrix, pair: Sequence[int] = (0, 1)) -> float:
    qa, qb = pair
    if qa == qb:
        raise DomainError(f'Fidelity needs two distinct qubits, got {tuple(pair)}.')
    rho = reduce_to(state, (qa, qb)).data
    phi = BELL_VECTORS['phi+']
    f = float((phi.conj() @ rho @ phi).real)
    return min(max(f, 0.), 1.)


def _outcome_weights(confusion: Tuple[float, float]) -> np.ndarray:
    """
    e[o, x] = P(read o | prepared x) with confusion (p01, p10) = (P(1|0), P(0|1)).
    """
    p01, p10 = confusion
    return np.array([[1. - p01, p10], [p01, 1. - p10]])


def coincidence_branch(
        state: DensityMatrix, pairs: Sequence[Tuple[int, int]],
        confusion: Dict[int, Tuple[float, float]] = None, accept: bool = True
) -> np.ndarray:
    """
    Unnormalized reduced matrix on the unmeasured qubits for the branch where every pair's
    two Z readouts coincide (accept=True) or the complement (accept=False).
    """
    confusion = confusion or {}
    measured = [q for pair in pairs for q in pair]
    _check_targets(state, measured)
    for q in measured:
        p01, p10 = confusion.get(q, (0., 0.))
        if not (0. <= p01 <= 1. and 0. <= p10 <= 1.):
            raise DomainError(f'Confusion probabilities of qubit {q} must lie in [0, 1], got {(p01, p10)}.')
    kept = _kept_qubits(state, measured)
    n = state.num_qubits
    labels = list(range(n)) + [n + q if q in kept else q for q in range(n)]
    operands = [state.tensor, labels]
    for qa, qb in pairs:
        ea = _outcome_weights(confusion.get(qa, (0., 0.)))
        eb = _outcome_weights(confusion.get(qb, (0., 0.)))
        # w[xa, xb] = sum_o e_a(o | xa) e_b(o | xb)
        operands += [np.einsum('oa,ob->ab', ea, eb), [qa, qb]]
    out = kept + [n + q for q in kept]
    branch = np.einsum(*operands, out)
    dim = 2 ** len(kept)
    branch = np.asarray(branch).reshape(dim, dim)
    if not accept:
        unconditioned = partial_trace(state, measured).data if kept else np.array([[state.trace_weight]])
        branch = unconditioned - branch
    return branch


def measure_zz_coincidence(
        state: DensityMatrix, pairs: Sequence[Tuple[int, int]],
        confusion: Dict[int, Tuple[float, float]] = None
) -> Tuple[DensityMatrix, float]:
    """
    Noisy Z readout of every measured pair, keeping the branch where the two results of each pair agree.

    :param pairs: measured (qubit, qubit) pairs
    :param confusion: qubit -> (p01, p10); missing qubits read out perfectly
    :return: renormalized state on the unmeasured qubits (ascending order), acceptance probability
    """
    if len(_kept_qubits(state, [q for pair in pairs for q in pair])) == 0:
        raise DomainError('At least one qubit must stay unmeasured.')
    branch = coincidence_branch(state, pairs, confusion, accept=True)
    weight = state.trace_weight
    prob = float(np.trace(branch).real) / weight if weight > 0 else 0.
    if prob < DEGENERATE_PROB:
        raise DegenerateBranchError(f'Coincidence branch probability {prob:.3e} is degenerate.')
    return DensityMatrix(branch / np.trace(branch).real, check=False), min(prob, 1.)


def reset_qubits(state: DensityMatrix, targets: Sequence[int], reset_error_p: float) -> DensityMatrix:
    if not 0. <= reset_error_p <= 1.:
        raise DomainError(f'Reset error probability must lie in [0, 1], got {reset_error_p}.')
    channel = QuantumChannel(reset_kraus(reset_error_p), name='reset')
    for t in targets:
        state = apply_channel(state, channel, [t])
    return state
