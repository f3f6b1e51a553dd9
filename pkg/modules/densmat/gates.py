from typing import Tuple

import numpy as np

UNITARY_KINDS = ('rz', 'sx', 'x', 's', 'sdg', 'cx')
NON_UNITARY_KINDS = ('delay', 'reset', 'measure', 'twirl')
GATE_KINDS = UNITARY_KINDS + NON_UNITARY_KINDS

GATE_ARITY = {
    'rz': 1, 'sx': 1, 'x': 1, 's': 1, 'sdg': 1, 'cx': 2,
    'delay': 1, 'reset': 1, 'measure': 2, 'twirl': 2,
}

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (I2, X, Y, Z)

SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=np.complex128)
S = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
SDG = S.conj().T
# control is the first (more significant) target
CX = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=np.complex128)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=np.complex128)


class GateOp:
    """
    One scheduled operation of a timed circuit.

    :param kind: one of GATE_KINDS
    :param targets: qubit indices; for 'cx' the control comes first, 'measure' and 'twirl' take the two halves of a pair
    :param start_time: seconds
    :param duration: seconds
    :param param: rotation angle for 'rz', idle time for 'delay'
    :param ideal: skip the noise model for this op
    :param tag: free-form marker, e.g. 'generate' for raw EP fragments
    """

    def __init__(
            self, kind: str, targets, start_time: float = 0., duration: float = 0., param: float = None,
            ideal: bool = False, tag: str = None
    ):
        if kind not in GATE_KINDS:
            raise ValueError(f'Invalid gate kind: {kind}')
        targets = tuple(int(t) for t in targets)
        assert len(targets) == GATE_ARITY[kind], \
            f'Gate \'{kind}\' acts on {GATE_ARITY[kind]} qubit(s), got targets {targets}.'
        assert len(set(targets)) == len(targets), f'Repeated target in {targets}.'
        if kind == 'rz' and param is None:
            raise ValueError('RZ needs a rotation angle.')
        if kind == 'delay':
            if param is None:
                param = duration
            if param < 0:
                raise ValueError(f'Delay duration must be non-negative, got {param}.')
            duration = param
        self.kind = kind
        self.targets = targets
        self.start_time = float(start_time)
        self.duration = float(duration)
        self.param = param
        self.ideal = ideal
        self.tag = tag

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    @property
    def is_unitary(self) -> bool:
        return self.kind in UNITARY_KINDS

    def matrix(self) -> np.ndarray:
        if self.kind == 'rz':
            return rz(self.param)
        elif self.kind == 'sx':
            return SX
        elif self.kind == 'x':
            return X
        elif self.kind == 's':
            return S
        elif self.kind == 'sdg':
            return SDG
        elif self.kind == 'cx':
            return CX
        raise ValueError(f'Gate \'{self.kind}\' has no unitary matrix.')

    def label(self) -> str:
        if self.kind == 'rz':
            return f'rz({self.param:.6g})'
        if self.kind == 'delay':
            return f'delay({self.param:.6g})'
        return self.kind

    def __repr__(self):
        return f'GateOp({self.label()}, targets={self.targets}, t={self.start_time:.6g})'


def hadamard_sequence() -> Tuple[Tuple[str, float], ...]:
    """
    H = RZ(pi/2) SX RZ(pi/2) up to a global phase.
    """
    return ('rz', np.pi / 2), ('sx', None), ('rz', np.pi / 2)
