"""Integral lattices: symmetric integer Gram matrices with exact arithmetic.

A lattice here is a free Z-module of finite rank carrying an integral
bilinear form, stored as its Gram matrix.  Signatures are computed by exact
symmetric congruence diagonalization over the rationals, so results like
(3, 19, 0) for the rank-22 lattice U^3 + E8(-1)^2 are decided without any
floating point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputError
from .exactlinalg import bilinear, determinant, inertia
from .ratmath import to_fraction


@dataclass(frozen=True)
class Signature:
    """Inertia counts of a symmetric form: positive, negative, zero squares."""

    n_plus: int
    n_minus: int
    n_zero: int = 0

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_minus, self.n_zero)

    @property
    def rank(self) -> int:
        return self.n_plus + self.n_minus + self.n_zero


@dataclass(frozen=True)
class IntegralLattice:
    """Rank-r lattice with an r x r symmetric integer Gram matrix.

    When ``nondegenerate`` is declared, the constructor verifies
    det(gram) != 0 and rejects the declaration otherwise.
    """

    gram: tuple[tuple[int, ...], ...]
    rank: int = field(default=0)
    nondegenerate: bool = True

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        r = len(gram)
        if any(len(row) != r for row in gram):
            raise InputError("gram matrix must be square")
        for i in range(r):
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise InputError(f"gram matrix not symmetric at ({i},{j})")
        if self.rank == 0:
            object.__setattr__(self, "rank", r)
        elif self.rank != r:
            raise InputError(f"declared rank {self.rank} != matrix dimension {r}")
        if self.nondegenerate and r > 0 and determinant(gram) == 0:
            raise InputError("lattice declared nondegenerate but det(gram) = 0")

    def __repr__(self):
        return f"IntegralLattice(rank={self.rank})"


def make_lattice(gram, nondegenerate: bool = True) -> IntegralLattice:
    return IntegralLattice(gram=tuple(tuple(row) for row in gram), nondegenerate=nondegenerate)


def _check_vector(lat: IntegralLattice, v) -> tuple[int, ...]:
    if len(v) != lat.rank:
        raise InputError(f"vector length {len(v)} != lattice rank {lat.rank}")
    return tuple(int(x) for x in v)


def evaluate(lat: IntegralLattice, v, w) -> int:
    """Bilinear value v^T * gram * w; evaluate(L, v, v) is the square q(v)."""
    v = _check_vector(lat, v)
    w = _check_vector(lat, w)
    return sum(v[i] * lat.gram[i][j] * w[j] for i in range(lat.rank) for j in range(lat.rank))


def signature(lat: IntegralLattice) -> Signature:
    """Sylvester inertia of the Gram matrix, computed exactly."""
    if lat.rank == 0:
        return Signature(0, 0, 0)
    return Signature(*inertia(lat.gram))


def lattice_determinant(lat: IntegralLattice) -> int:
    d = determinant(lat.gram)
    if d.denominator != 1:
        raise AssertionError("integer matrix produced a non-integer determinant")
    return d.numerator


def direct_sum(a: IntegralLattice, b: IntegralLattice) -> IntegralLattice:
    """Orthogonal (block diagonal) direct sum."""
    r = a.rank + b.rank
    gram = [[0] * r for _ in range(r)]
    for i in range(a.rank):
        for j in range(a.rank):
            gram[i][j] = a.gram[i][j]
    for i in range(b.rank):
        for j in range(b.rank):
            gram[a.rank + i][a.rank + j] = b.gram[i][j]
    return make_lattice(gram, nondegenerate=a.nondegenerate and b.nondegenerate)


def rescale(lat: IntegralLattice, m: int) -> IntegralLattice:
    """Entrywise scaling of the form: every bilinear value is multiplied by m."""
    m = int(m)
    if m == 0:
        raise InputError("rescale by zero would degenerate the lattice")
    gram = [[m * x for x in row] for row in lat.gram]
    return make_lattice(gram, nondegenerate=lat.nondegenerate)


def extend_by_rank_one(lat: IntegralLattice, square: int) -> IntegralLattice:
    """Adjoin one class orthogonally with the given self-intersection.

    Models adding an exceptional divisor class to a rank-r second-cohomology
    lattice; the square is never defaulted and must be supplied by the
    caller.  square == 0 yields a lattice flagged degenerate.
    """
    square = int(square)
    r = lat.rank + 1
    gram = [[0] * r for _ in range(r)]
    for i in range(lat.rank):
        for j in range(lat.rank):
            gram[i][j] = lat.gram[i][j]
    gram[r - 1][r - 1] = square
    return make_lattice(gram, nondegenerate=lat.nondegenerate and square != 0)


# --- standard constructions ------------------------------------------------

_E8_LINKS = ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4))


def _e8_cartan() -> list[list[int]]:
    a = [[0] * 8 for _ in range(8)]
    for i in range(8):
        a[i][i] = 2
    for u, v in _E8_LINKS:
        a[u - 1][v - 1] = a[v - 1][u - 1] = -1
    return a


def hyperbolic_plane() -> IntegralLattice:
    """U = [[0,1],[1,0]]: even, unimodular, signature (1,1)."""
    return make_lattice([[0, 1], [1, 0]])


def e8_minus() -> IntegralLattice:
    """Negative definite E8 lattice: even, det 1, signature (0, 8)."""
    gram = [[-x for x in row] for row in _e8_cartan()]
    lat = make_lattice(gram)
    # constructor-level verification by the lattice's own diagonalization
    sig = signature(lat).as_tuple()
    if sig != (0, 8, 0):
        raise AssertionError(f"E8(-1) construction has signature {sig}")
    if any(lat.gram[i][i] % 2 != 0 for i in range(8)):
        raise AssertionError("E8(-1) construction is not even")
    if lattice_determinant(lat) != 1:
        raise AssertionError("E8(-1) construction is not unimodular")
    return lat


def k3_lattice() -> IntegralLattice:
    """U + U + U + E8(-1) + E8(-1): rank 22, signature (3, 19)."""
    u = hyperbolic_plane()
    e8m = e8_minus()
    lat = direct_sum(direct_sum(direct_sum(u, u), direct_sum(u, e8m)), e8m)
    return lat


_STANDARD = {
    "U": hyperbolic_plane,
    "E8_minus": e8_minus,
    "K3": k3_lattice,
}


def standard_lattice(name: str) -> IntegralLattice:
    try:
        builder = _STANDARD[name]
    except KeyError:
        raise InputError(
            f"unknown standard lattice {name!r}; choose from {sorted(_STANDARD)}"
        ) from None
    return builder()


# --- JSON interchange -------------------------------------------------------

def to_json_dict(lat: IntegralLattice) -> dict:
    return {"rank": lat.rank, "gram": [list(row) for row in lat.gram]}


def from_json_dict(data: dict) -> IntegralLattice:
    try:
        gram = data["gram"]
    except (TypeError, KeyError):
        raise InputError("lattice JSON must be an object with a 'gram' field") from None
    lat = make_lattice(gram, nondegenerate=bool(data.get("nondegenerate", True)))
    if "rank" in data and int(data["rank"]) != lat.rank:
        raise InputError(f"declared rank {data['rank']} != gram dimension {lat.rank}")
    return lat


def dump_json(lat: IntegralLattice) -> str:
    return json.dumps(to_json_dict(lat), sort_keys=True)


def load_json(text: str) -> IntegralLattice:
    return from_json_dict(json.loads(text))


def gram_fractions(lat: IntegralLattice):
    """Gram matrix as Fractions, for modules doing rational arithmetic on it."""
    return [[to_fraction(x) for x in row] for row in lat.gram]


def bilinear_q(lat: IntegralLattice, u, v):
    """Bilinear value on rational vectors (exact Fraction arithmetic)."""
    if len(u) != lat.rank or len(v) != lat.rank:
        raise InputError("vector length does not match lattice rank")
    return bilinear(gram_fractions(lat), [to_fraction(x) for x in u], [to_fraction(x) for x in v])
