from functools import reduce
from typing import List, Sequence

import numpy as np

from modules.densmat.gates import I2, PAULIS, X, Y, Z

COMPLETENESS_TOL = 1e-10


class ChannelValidationError(ValueError):
    pass


class QuantumChannel:
    """
    A CPTP map given by its Kraus operators, acting on 1 or 2 qubits.

    :param kraus_ops: square matrices of identical dimension 2**arity
    :param name: label shown in diagnostics
    :param tol: completeness tolerance on max|sum(E^dag E) - I|
    """

    def __init__(self, kraus_ops: Sequence[np.ndarray], name: str = 'channel', tol: float = COMPLETENESS_TOL):
        if len(kraus_ops) == 0:
            raise ChannelValidationError(f'Channel \'{name}\' has no Kraus operators.')
        ops = [np.asarray(k, dtype=np.complex128) for k in kraus_ops]
        dim = ops[0].shape[0]
        for k in ops:
            if k.shape != (dim, dim):
                raise ChannelValidationError(
                    f'Channel \'{name}\': Kraus shapes differ ({k.shape} vs {(dim, dim)}).'
                )
        arity = int(round(np.log2(dim)))
        if 2 ** arity != dim or arity not in (1, 2):
            raise ChannelValidationError(f'Channel \'{name}\' must act on 1 or 2 qubits, got dimension {dim}.')
        deviation = completeness_deviation(ops)
        if deviation > tol:
            raise ChannelValidationError(
                f'Channel \'{name}\' is not trace preserving: max|sum(E^dag E) - I| = {deviation:.3e}.'
            )
        self.kraus_ops: List[np.ndarray] = ops
        self.arity = arity
        self.dim = dim
        self.name = name
        self._superop = None

    def __len__(self):
        return len(self.kraus_ops)

    def __repr__(self):
        return f'QuantumChannel({self.name}, arity={self.arity}, kraus={len(self.kraus_ops)})'

    def superoperator(self) -> np.ndarray:
        """
        S[o_r, o_c, i_r, i_c] = sum_k E_k[o_r, i_r] conj(E_k[o_c, i_c]), reshaped to (2,) * (4 * arity).
        """
        if self._superop is None:
            ks = np.stack(self.kraus_ops)
            sup = np.einsum('kai,kbj->abij', ks, ks.conj())
            self._superop = sup.reshape((2,) * (4 * self.arity))
        return self._superop

    def liouville(self) -> np.ndarray:
        """
        Row-major vectorized form: vec(E(rho)) = L @ vec(rho).
        """
        return sum(np.kron(k, k.conj()) for k in self.kraus_ops)

    def process_fidelity(self) -> float:
        return float(sum(abs(np.trace(k)) ** 2 for k in self.kraus_ops).real) / self.dim ** 2

    def average_gate_fidelity(self) -> float:
        return (self.dim * self.process_fidelity() + 1) / (self.dim + 1)

    def error_rate(self) -> float:
        """
        1 - average gate fidelity to the identity.
        """
        return 1. - self.average_gate_fidelity()

    def compose(self, first: 'QuantumChannel') -> 'QuantumChannel':
        """
        self after first.
        """
        assert first.dim == self.dim, f'Cannot compose channels of dimension {first.dim} and {self.dim}.'
        ops = [b @ a for b in self.kraus_ops for a in first.kraus_ops]
        return QuantumChannel(_drop_zero_ops(ops), name=f'{self.name}*{first.name}')

    def tensor(self, other: 'QuantumChannel') -> 'QuantumChannel':
        assert self.arity + other.arity <= 2, 'Only channels up to two qubits are supported.'
        ops = [np.kron(a, b) for a in self.kraus_ops for b in other.kraus_ops]
        return QuantumChannel(_drop_zero_ops(ops), name=f'{self.name}(x){other.name}')

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.kraus_ops)


def completeness_deviation(kraus_ops: Sequence[np.ndarray]) -> float:
    dim = kraus_ops[0].shape[0]
    total = sum(k.conj().T @ k for k in kraus_ops)
    return float(np.max(np.abs(total - np.eye(dim))))


def _drop_zero_ops(ops):
    kept = [k for k in ops if np.max(np.abs(k)) > 0.]
    return kept if kept else ops[:1]


def identity_channel(arity: int = 1) -> QuantumChannel:
    return QuantumChannel([np.eye(2 ** arity, dtype=np.complex128)], name='identity')


def reset_kraus(p: float) -> List[np.ndarray]:
    """
    Trace-preserving reset to diag(1 - p, p) regardless of the input.
    """
    a, b = np.sqrt(1. - p), np.sqrt(p)
    return [
        np.array([[a, 0], [0, 0]], dtype=np.complex128),
        np.array([[0, a], [0, 0]], dtype=np.complex128),
        np.array([[0, 0], [b, 0]], dtype=np.complex128),
        np.array([[0, 0], [0, b]], dtype=np.complex128),
    ]


# cycles X -> Y -> Z under conjugation
CYCLE_CLIFFORD = 0.5 * (I2 - 1j * (X + Y + Z))


def twirl_channel() -> QuantumChannel:
    """
    Bilateral twirl mapping any two-qubit state to the Werner state with the same |phi+> overlap.
    Kraus operators (C^k P) (x) (C^k P)^* / sqrt(12).
    """
    ops = []
    for k in range(3):
        ck = reduce(np.matmul, [CYCLE_CLIFFORD] * k, I2)
        for p in PAULIS:
            u = ck @ p
            ops.append(np.kron(u, u.conj()) / np.sqrt(12.))
    return QuantumChannel(ops, name='twirl')
