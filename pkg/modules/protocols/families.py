import pathlib
from functools import lru_cache
from typing import List, Tuple

import numpy as np
import yaml

from basics.base_protocol import BaseProtocol, Pair
from modules.protocols.registry import ConstructionError, register_protocol

EXPEDIENT_SEQUENCE = pathlib.Path(__file__).resolve().parents[2] / 'fixtures' / 'expedient.yaml'


def _bilateral_round(coefficients):
    """
    Bilateral CNOT plus Z coincidence on Bell-diagonal inputs (phi+, phi-, psi+, psi-).
    """
    a, b, c, d = coefficients
    n = (a + b) ** 2 + (c + d) ** 2
    return ((a * a + b * b) / n, 2 * a * b / n, (c * c + d * d) / n, 2 * c * d / n), n


@register_protocol
class BBPSSW(BaseProtocol):
    """
    Bilateral CNOT, ZZ coincidence on the target pair; the kept pair is twirled back to
    Werner form before the next round.
    """
    copies = 2
    rounds = (1, 2, 3)
    reuse_rounds = (2, 3)

    def apply_round(self, builder, kept: Pair, ancillas: List[Pair], last_round: bool):
        aux = ancillas[0]
        builder.bilateral('cx', kept, aux)
        builder.measure(aux)
        if not last_round:
            builder.add('twirl', kept, ideal=True)

    def analytic_round(self, coefficients):
        (a, b, c, d), n = _bilateral_round(coefficients)
        tail = (1. - a) / 3.
        return (a, tail, tail, tail), n


@register_protocol
class DEJMPS(BaseProtocol):
    """
    S on node A, S^dag on node B, bilateral CNOT, ZZ coincidence. Between nested rounds the kept
    pair gets SX on node A and SX^dag on node B, which swaps the phi- and psi- weights.
    """
    copies = 2
    rounds = (1, 2, 3)
    reuse_rounds = (2, 3)

    def apply_round(self, builder, kept: Pair, ancillas: List[Pair], last_round: bool):
        aux = ancillas[0]
        for pair in (kept, aux):
            builder.add('s', [pair[0]])
            builder.add('sdg', [pair[1]])
        builder.bilateral('cx', kept, aux)
        builder.measure(aux)
        if not last_round:
            builder.add('sx', [kept[0]])
            # X SX = SX^dag
            builder.add('sx', [kept[1]])
            builder.add('x', [kept[1]])

    def analytic_round(self, coefficients):
        (a, b, c, d), n = _bilateral_round(coefficients)
        return (a, d, c, b), n


@lru_cache(maxsize=4)
def load_expedient_sequence(path: str = str(EXPEDIENT_SEQUENCE)) -> Tuple[int, Tuple[tuple, ...]]:
    """
    :return: number of pairs, steps as ('cx', control, target) | ('h', pair) | ('measure', pair)
    """
    with open(path, 'r', encoding='utf8') as f:
        doc = yaml.safe_load(f)
    num_pairs = int(doc['pairs'])
    steps = []
    for i, step in enumerate(doc['steps']):
        gate = step.get('gate')
        if gate == 'cx':
            entry = ('cx', int(step['control']), int(step['target']))
        elif gate in ('h', 'measure'):
            entry = (gate, int(step['pair']))
        else:
            raise ConstructionError(f'{path}: step {i} has unknown gate \'{gate}\'.')
        for p in entry[1:]:
            if not 0 <= p < num_pairs:
                raise ConstructionError(f'{path}: step {i} refers to pair {p} of {num_pairs}.')
        if 0 in entry[1:] and gate == 'measure':
            raise ConstructionError(f'{path}: step {i} measures the kept pair.')
        steps.append(entry)
    return num_pairs, tuple(steps)


@register_protocol
class EXPEDIENT(BaseProtocol):
    """
    Double selection against bit flips, then against phase flips: one kept pair and four ancilla
    pairs per round. The gate sequence is read from fixtures/expedient.yaml.
    """
    copies = 5
    rounds = (1, 2)
    reuse_rounds = ()

    def __init__(self, sequence_path: str = str(EXPEDIENT_SEQUENCE)):
        num_pairs, self.steps = load_expedient_sequence(sequence_path)
        assert num_pairs == self.copies, f'EXPEDIENT sequence uses {num_pairs} pairs, expected {self.copies}.'

    def apply_round(self, builder, kept: Pair, ancillas: List[Pair], last_round: bool):
        pairs = [kept] + list(ancillas)
        for step in self.steps:
            if step[0] == 'cx':
                builder.bilateral('cx', pairs[step[1]], pairs[step[2]])
            elif step[0] == 'h':
                for q in pairs[step[1]]:
                    builder.hadamard(q)
            else:
                builder.measure(pairs[step[1]])

    def analytic_round(self, coefficients):
        """
        Pauli-frame walk over all 4^5 error patterns of five Bell-diagonal pairs.
        """
        # (bit, phase) per Bell state: phi+, phi-, psi+, psi-
        frames = ((0, 0), (0, 1), (1, 0), (1, 1))
        probs = np.asarray(coefficients, dtype=float)
        out = np.zeros(4)
        for idx in np.ndindex(*(4,) * self.copies):
            weight = np.prod(probs[list(idx)])
            if weight == 0.:
                continue
            bits = [frames[i][0] for i in idx]
            phases = [frames[i][1] for i in idx]
            accepted = True
            for step in self.steps:
                if step[0] == 'cx':
                    c, t = step[1], step[2]
                    bits[t] ^= bits[c]
                    phases[c] ^= phases[t]
                elif step[0] == 'h':
                    p = step[1]
                    bits[p], phases[p] = phases[p], bits[p]
                else:
                    accepted = accepted and bits[step[1]] == 0
            if accepted:
                out[frames.index((bits[0], phases[0]))] += weight
        n = out.sum()
        return tuple(out / n), float(n)
