"""Pencils whose invariants were derived by hand.

Each regular entry lists its finite eigenvalues with algebraic
multiplicity, the finite elementary divisors (one per Jordan block) and
the infinite block sizes. Several entries are a canonical pencil hit by
integer unimodular matrices on both sides, which leaves all of that
unchanged while scrambling the entries.
"""

from dataclasses import dataclass, field

import numpy as np
import sympy
from sympy import I, Rational

L3 = np.array([[1, 1, 0], [0, 1, 0], [0, 1, 1]])
R3 = np.array([[1, 0, 0], [1, 1, 0], [0, 2, 1]])
L4 = np.array([[1, 0, 2, 0], [0, 1, 0, 0], [1, 0, 3, 1], [0, 1, 0, 1]])  # det 1
R4 = np.array([[1, 1, 0, 0], [0, 1, 0, 0], [0, 1, 1, 0], [2, 0, 0, 1]])
L6 = np.eye(6, dtype=int) + np.eye(6, k=1, dtype=int)
R6 = np.eye(6, dtype=int) - np.eye(6, k=-2, dtype=int)


def _blk(*blocks):
    n = sum(np.atleast_2d(b).shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        b = np.atleast_2d(b)
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def _shift(n):
    return np.eye(n, k=1)


@dataclass
class Case:
    name: str
    F: np.ndarray
    G: np.ndarray
    regular: bool = True
    eigenvalues: list = field(default_factory=list)  # [(sympy value, multiplicity)]
    finite_divisors: list = field(default_factory=list)  # [(sympy value, block size)]
    infinite: list = field(default_factory=list)

    @property
    def p(self):
        return sum(k for _, k in self.eigenvalues)

    @property
    def q(self):
        return self.F.shape[0] - self.p

    @property
    def q_star(self):
        return max(self.infinite, default=0)


def _t(L, M, R):
    return (L @ M @ R).astype(float)


CASES = [
    Case("mixed_2x2", np.array([[1.0, 0], [0, 0]]), np.array([[-1.0, 0], [0, 1]]),
         eigenvalues=[(-1, 1)], finite_divisors=[(-1, 1)], infinite=[1]),
    Case("identity_jordan", np.eye(2), np.array([[1.0, 1], [0, 1]]),
         eigenvalues=[(1, 2)], finite_divisors=[(1, 2)]),
    Case("nilpotent_2", _shift(2), np.eye(2), infinite=[2]),
    Case("nilpotent_3", _shift(3), np.eye(3), infinite=[3]),
    Case("rotation", np.eye(2), np.array([[0.0, 1], [-1, 0]]),
         eigenvalues=[(-I, 1), (I, 1)], finite_divisors=[(-I, 1), (I, 1)]),
    Case("diag_distinct", np.eye(2), np.diag([1.0, 2.0]),
         eigenvalues=[(1, 1), (2, 1)], finite_divisors=[(1, 1), (2, 1)]),
    Case("semisimple_repeated", np.eye(3), np.diag([2.0, 2.0, 3.0]),
         eigenvalues=[(2, 2), (3, 1)], finite_divisors=[(2, 1), (2, 1), (3, 1)]),
    Case("index2_transformed", _t(L3, _blk(1, _shift(2)), R3), _t(L3, _blk(-0.5, np.eye(2)), R3),
         eigenvalues=[(Rational(-1, 2), 1)], finite_divisors=[(Rational(-1, 2), 1)], infinite=[2]),
    Case("zero_F", np.zeros((2, 2)), np.eye(2), infinite=[1, 1]),
    Case("jordan_and_nilpotent", _t(L4, _blk(np.eye(2), _shift(2)), R4),
         _t(L4, _blk(np.array([[1, 1], [0, 1]]), np.eye(2)), R4),
         eigenvalues=[(1, 2)], finite_divisors=[(1, 2)], infinite=[2]),
    Case("mixed_6x6", _t(L6, _blk(np.eye(3), _shift(2), 0), R6),
         _t(L6, _blk(np.array([[0, 1], [-4, 0]]), 3, np.eye(3)), R6),
         eigenvalues=[(-2 * I, 1), (2 * I, 1), (3, 1)],
         finite_divisors=[(-2 * I, 1), (2 * I, 1), (3, 1)], infinite=[2, 1]),
    Case("scalar_ratio", np.array([[2.0]]), np.array([[3.0]]),
         eigenvalues=[(Rational(3, 2), 1)], finite_divisors=[(Rational(3, 2), 1)]),
    Case("singular_shared_kernel", np.array([[1.0, 0], [0, 0]]), np.array([[1.0, 0], [0, 0]]), regular=False),
    Case("singular_rank_one", np.array([[1.0, 1], [1, 1]]), np.array([[2.0, 2], [2, 2]]), regular=False),
]

REGULAR = [c for c in CASES if c.regular]


def same_value(a, b) -> bool:
    return sympy.simplify(sympy.nsimplify(a) - sympy.nsimplify(b)) == 0
