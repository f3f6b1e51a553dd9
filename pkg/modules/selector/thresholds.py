from utils import filter_kwargs

SORT_POLARITIES = ('standard', 'inverted')
V3_CLAUSES = ('any', 'idling')


class Thresholds:
    """
    Noise-pruning and sorting thresholds.

    :param v1: any error rate above it drops protocols with more than two rounds
    :param v2: all error rates below it drop the BBPSSW family
    :param v3: drops the EXPEDIENT family, see v3_clause
    :param f_b: fidelity boundary of the family sort
    :param sort_polarity: 'standard' puts DEJMPS first above f_b and EXPEDIENT first otherwise;
        'inverted' swaps the two
    :param v3_clause: 'any' tests every error type against v3, 'idling' only the idling error
    """

    def __init__(
            self, v1: float = 1e-4, v2: float = 1e-4, v3: float = 0.01, f_b: float = 0.58,
            sort_polarity: str = 'standard', v3_clause: str = 'any'
    ):
        for name, value in (('v1', v1), ('v2', v2), ('v3', v3), ('f_b', f_b)):
            if not 0. <= value <= 1.:
                raise ValueError(f'Threshold {name} must lie in [0, 1], got {value}.')
        if sort_polarity not in SORT_POLARITIES:
            raise ValueError(f'sort_polarity must be one of {SORT_POLARITIES}, got \'{sort_polarity}\'.')
        if v3_clause not in V3_CLAUSES:
            raise ValueError(f'v3_clause must be one of {V3_CLAUSES}, got \'{v3_clause}\'.')
        self.v1 = float(v1)
        self.v2 = float(v2)
        self.v3 = float(v3)
        self.f_b = float(f_b)
        self.sort_polarity = sort_polarity
        self.v3_clause = v3_clause

    @classmethod
    def from_dict(cls, doc: dict) -> 'Thresholds':
        return cls(**filter_kwargs({k: v for k, v in (doc or {}).items() if v is not None}, cls))

    def to_dict(self) -> dict:
        return {
            'v1': self.v1, 'v2': self.v2, 'v3': self.v3, 'f_b': self.f_b,
            'sort_polarity': self.sort_polarity, 'v3_clause': self.v3_clause,
        }

    def favored_family(self, f: float) -> str:
        high = f > self.f_b
        if self.sort_polarity == 'inverted':
            high = not high
        return 'DEJMPS' if high else 'EXPEDIENT'

    def __repr__(self):
        return 'Thresholds(' + ', '.join(f'{k}={v}' for k, v in self.to_dict().items()) + ')'
