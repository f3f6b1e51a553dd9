from typing import List, Tuple

Pair = Tuple[int, int]


class BaseProtocol:
    """
        Base class for purification families.
        1. *copies*:
            pairs consumed by one round (the kept pair included);
        2. *rounds*, *reuse_rounds*:
            nesting depths offered in the catalog, and those that also get a qubit-reuse variant;
        3. *apply_round*:
            emit one round of gates onto a circuit builder;
        4. *analytic_round*:
            the noiseless one-round map on Bell-diagonal coefficients, used as an oracle.
    """
    copies = 2
    rounds = (1,)
    reuse_rounds = ()

    def apply_round(self, builder, kept: Pair, ancillas: List[Pair], last_round: bool):
        """

        :param builder: CircuitBuilder scheduling the ops as soon as possible
        :param kept: (node A qubit, node B qubit) of the pair that survives
        :param ancillas: pairs consumed and measured by this round
        :param last_round: no further round follows on the kept pair
        """
        raise NotImplementedError()

    def analytic_round(self, coefficients: Tuple[float, float, float, float]):
        """

        :param coefficients: (phi+, phi-, psi+, psi-) weights of every input pair
        :return: output coefficients, success probability
        """
        raise NotImplementedError()
