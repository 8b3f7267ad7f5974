"""
Basis conventions, single-atom operators and the isometries onto the invariant sectors.

Atom A is always the left tensor factor so the product index of |a b> is ``d·a + b``.
"""
from functools import cache

import numpy as np

from forge.statespace.exception import SectorError
from forge.statespace.model import Sector
from forge.types import ComplexArray

#: |0>, |1> and the two dipole-coupled Rydberg levels
FOUR_LEVEL_STATES: tuple[str, ...] = ("0", "1", "r1", "r2")
#: |0>, |1> and a single Rydberg level
BLOCKADE_STATES: tuple[str, ...] = ("0", "1", "r")
#: |0>, |1>, the intermediate level of a two-photon ladder and the two Rydberg levels
TWO_PHOTON_STATES: tuple[str, ...] = ("0", "1", "e", "r1", "r2")


def product_labels(states: tuple[str, ...] = FOUR_LEVEL_STATES) -> tuple[str, ...]:
    """Labels of the two-atom product basis in index order"""
    return tuple(a + b for a in states for b in states)


def transition(states: tuple[str, ...], upper: str, lower: str) -> ComplexArray:
    """The single-atom operator |upper><lower|"""
    op = np.zeros((len(states), len(states)), dtype=complex)
    op[states.index(upper), states.index(lower)] = 1
    return op


def projector(states: tuple[str, ...], *levels: str) -> ComplexArray:
    """The single-atom projector onto ``levels``"""
    return sum((transition(states, level, level) for level in levels), np.zeros((len(states),) * 2, dtype=complex))


def on_both(op: ComplexArray) -> ComplexArray:
    """Lift a single-atom operator to the two-atom space as op ⊗ 1 + 1 ⊗ op"""
    identity = np.eye(op.shape[0])
    return np.kron(op, identity) + np.kron(identity, op)


def pair_projector(states: tuple[str, ...], a: str, b: str) -> ComplexArray:
    """The two-atom projector |a b><a b|"""
    return np.kron(transition(states, a, a), transition(states, b, b))


def pair_transition(states: tuple[str, ...], upper: tuple[str, str], lower: tuple[str, str]) -> ComplexArray:
    """The two-atom operator |u_A u_B><l_A l_B|"""
    return np.kron(transition(states, upper[0], lower[0]), transition(states, upper[1], lower[1]))


def swap_operator(states: tuple[str, ...] = FOUR_LEVEL_STATES) -> ComplexArray:
    """The permutation exchanging atoms A and B"""
    dim = len(states)
    swap = np.zeros((dim * dim, dim * dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            swap[dim * b + a, dim * a + b] = 1
    return swap


@cache
def sector_isometry(
        sector: Sector, states: tuple[str, ...] = FOUR_LEVEL_STATES
) -> tuple[tuple[str, ...], ComplexArray]:
    """
    Get the labels and the isometry P (columns are the sector's basis kets in the product space)
    of a given ``sector``.

    The sector blocks are then P† H P. The ``11`` sector uses the exchange-symmetric kets
    over every level except |0>, ordered by level pairs (i <= j). Symmetric combinations of
    two different levels carry a trailing '+' in their label.

    :raise SectorError: When the sector is not supported.
    """
    dim = len(states)
    excited = states[1:]

    def ket(a: str, b: str) -> ComplexArray:
        vector = np.zeros(dim * dim, dtype=complex)
        vector[dim * states.index(a) + states.index(b)] = 1
        return vector

    match sector:
        case Sector.FULL:
            labels = product_labels(states)
            columns = list(np.eye(dim * dim, dtype=complex))
        case Sector.S01:
            labels = tuple(states[0] + s for s in excited)
            columns = [ket(states[0], s) for s in excited]
        case Sector.S10:
            labels = tuple(s + states[0] for s in excited)
            columns = [ket(s, states[0]) for s in excited]
        case Sector.S11:
            labels, columns = [], []
            for i, a in enumerate(excited):
                for b in excited[i:]:
                    if a == b:
                        labels.append(a + b)
                        columns.append(ket(a, b))
                    else:
                        labels.append(f"{a}{b}+")
                        columns.append((ket(a, b) + ket(b, a)) / np.sqrt(2))
        case _:
            raise SectorError(f"Unsupported sector: {sector!r}")

    isometry = np.stack(columns, axis=1)
    isometry.setflags(write=False)
    return tuple(labels), isometry
