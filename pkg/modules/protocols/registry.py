import importlib
from typing import List, Union

from basics.base_protocol import BaseProtocol

PROTOCOLS = {}
FAMILY_ORDER = []


class ConstructionError(ValueError):
    pass


def register_protocol(cls):
    PROTOCOLS[cls.__name__.lower()] = cls
    PROTOCOLS[cls.__name__] = cls
    FAMILY_ORDER.append(cls.__name__)
    return cls


def get_protocol_cls(family: str):
    if family in PROTOCOLS:
        return PROTOCOLS[family]
    pkg = '.'.join(family.split('.')[:-1])
    if not pkg:
        raise ConstructionError(f'Unknown protocol family: {family}')
    cls = getattr(importlib.import_module(pkg), family.split('.')[-1])
    assert issubclass(cls, BaseProtocol), f'{cls} is not a subclass of {BaseProtocol}.'
    return cls


def slots_needed(copies: int, rounds: int, reuse: bool) -> int:
    """
    Depth-first nesting holds one pending pair per level plus the incoming one when slots are reused.
    """
    if reuse:
        return (copies - 1) * rounds + 1
    return copies ** rounds


class ProtocolSpec:
    """
    One catalog entry: family x rounds x reuse.
    """

    def __init__(self, protocol_id: int, family: str, rounds: int, reuse: bool = False):
        cls = get_protocol_cls(family)
        if rounds < 1:
            raise ConstructionError(f'{family}: rounds must be >= 1, got {rounds}.')
        if reuse and rounds < 2:
            raise ConstructionError(f'{family}: qubit reuse needs at least two rounds.')
        self.id = int(protocol_id)
        self.family = cls.__name__
        self.rounds = int(rounds)
        self.reuse = bool(reuse)
        self.copies = cls.copies
        self.ep_demand = cls.copies ** self.rounds
        self.qubits_needed = 2 * slots_needed(cls.copies, self.rounds, self.reuse)

    @property
    def name(self) -> str:
        return f'{self.family}x{self.rounds}' + ('-reuse' if self.reuse else '')

    def build(self) -> BaseProtocol:
        return PROTOCOLS[self.family]()

    def key(self):
        return self.family, self.rounds, self.reuse

    def to_dict(self) -> dict:
        return {
            'id': self.id, 'name': self.name, 'family': self.family, 'rounds': self.rounds,
            'reuse': self.reuse, 'qubits_needed': self.qubits_needed, 'ep_demand': self.ep_demand,
        }

    def __eq__(self, other):
        return isinstance(other, ProtocolSpec) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f'ProtocolSpec(#{self.id} {self.name}, qubits={self.qubits_needed}, eps={self.ep_demand})'


def protocol_registry() -> List[ProtocolSpec]:
    """
    The fixed catalog with stable IDs, in family registration order:
    each rounds value, followed by its reuse variant when the family offers one.
    """
    import modules.protocols.families  # noqa: F401  registers the families

    catalog = []
    for family in FAMILY_ORDER:
        cls = PROTOCOLS[family]
        for rounds in cls.rounds:
            catalog.append(ProtocolSpec(len(catalog) + 1, family, rounds, reuse=False))
            if rounds in cls.reuse_rounds:
                catalog.append(ProtocolSpec(len(catalog) + 1, family, rounds, reuse=True))
    return catalog


def find_protocol(ref: Union[int, str], catalog: List[ProtocolSpec] = None) -> ProtocolSpec:
    """
    :param ref: catalog ID or name such as 'DEJMPSx2-reuse' (case-insensitive)
    """
    catalog = protocol_registry() if catalog is None else catalog
    for spec in catalog:
        if str(spec.id) == str(ref).strip() or spec.name.lower() == str(ref).strip().lower():
            return spec
    raise ConstructionError(f'Unknown protocol: {ref}')
