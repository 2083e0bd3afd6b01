"""Characteristic numbers, cohomology rank bookkeeping, and curve counting.

Surface Euler characteristics come from the degree-2 part of ch(F)*td(X)
with the standard Todd class (degree-1 term c1/2).  The counting side is
exact integer arithmetic: truncated integer power series for the product
formula giving Euler characteristics of point moduli, Euler numbers of
compactified linear-system fibers by stratification, and the enumeration of
K-trivial factor multisets compatible with a structure-sheaf Euler
characteristic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InconsistencyError, InputError
from .ratmath import to_fraction

# A nodal rational curve is a sphere with two points glued into one:
# e(P^1) - e(point) = 2 - 1.
NODAL_RATIONAL_CURVE_EULER = 2 - 1


# --- surface characteristic numbers ------------------------------------------

@dataclass(frozen=True)
class SurfaceChernData:
    """Chern numbers of a compact complex surface: c1^2 and c2 = e(X)."""

    c1_sq: int
    c2: int


@dataclass(frozen=True)
class BundleChernData:
    """Chern data of a bundle F on a surface, via its pairings with c1(X)."""

    rank: int
    c1_sq: int
    c1_dot_c1X: int
    c2: int

    def __post_init__(self):
        if self.rank < 1:
            raise InputError("bundle rank must be >= 1")


K3_SURFACE = SurfaceChernData(c1_sq=0, c2=24)

O_BUNDLE = BundleChernData(rank=1, c1_sq=0, c1_dot_c1X=0, c2=0)


def k3_cotangent_bundle() -> BundleChernData:
    """Chern data of the rank-2 cotangent bundle on a K3 surface."""
    return BundleChernData(rank=2, c1_sq=0, c1_dot_c1X=0, c2=K3_SURFACE.c2)


def hrr_chi_surface(X: SurfaceChernData, F: BundleChernData) -> int:
    """chi(X, F) = rank*(c1X^2 + c2X)/12 + c1F.c1X/2 + (c1F^2 - 2 c2F)/2.

    The value must come out an integer; a fractional result signals
    inconsistent Chern data and is raised as such.
    """
    chi = (
        Fraction(F.rank * (X.c1_sq + X.c2), 12)
        + Fraction(F.c1_dot_c1X, 2)
        + Fraction(F.c1_sq - 2 * F.c2, 2)
    )
    if chi.denominator != 1:
        raise InconsistencyError(f"chi = {chi} is not an integer: inconsistent Chern data")
    return chi.numerator


def solve_c2(chi_structure_sheaf: int, c1_sq: int) -> int:
    """Invert chi(O) = (c1^2 + c2)/12 for the Euler number c2."""
    return 12 * int(chi_structure_sheaf) - int(c1_sq)


def k3_hodge_diamond() -> dict[tuple[int, int], int]:
    """Hodge numbers of the K3 class, derived rather than tabulated.

    Inputs: chi(O) and chi(Omega^1) from hrr_chi_surface, b1 = 0, plus the
    conjugation and duality symmetries h^{p,q} = h^{q,p} = h^{2-p,2-q}.
    """
    chi_o = hrr_chi_surface(K3_SURFACE, O_BUNDLE)          # = 2
    chi_omega = hrr_chi_surface(K3_SURFACE, k3_cotangent_bundle())  # = -20
    h = {}
    h[(0, 0)] = 1                       # connected
    h[(1, 0)] = h[(0, 1)] = 0           # b1 = 0
    h[(0, 2)] = chi_o - h[(0, 0)] + h[(0, 1)]
    h[(2, 0)] = h[(0, 2)]               # conjugation
    h[(2, 1)] = h[(1, 2)] = h[(1, 0)]   # duality
    h[(2, 2)] = h[(0, 0)]
    # chi(Omega^1) = h^{1,0} - h^{1,1} + h^{1,2}
    h[(1, 1)] = h[(1, 0)] + h[(1, 2)] - chi_omega
    return h


def betti_from_diamond(h: dict[tuple[int, int], int], dim: int = 2) -> tuple[int, ...]:
    return tuple(
        sum(v for (p, q), v in h.items() if p + q == i) for i in range(2 * dim + 1)
    )


def euler_from_betti(betti) -> int:
    return sum((-1) ** i * b for i, b in enumerate(betti))


# --- second-cohomology rank formulas ------------------------------------------

def sym_power_h2_rank(b1: int, b2: int) -> int:
    """Rank of H^2 of a symmetric power of a surface: b2 + C(b1, 2)."""
    if b1 < 0 or b2 < 0:
        raise InputError("Betti numbers must be nonnegative")
    return b2 + math.comb(b1, 2)


def hilb_h2_rank(b1: int, b2: int) -> int:
    """Symmetric-power rank plus one exceptional class."""
    return sym_power_h2_rank(b1, b2) + 1


def kummer_b2(b2_abelian: int) -> int:
    """Second Betti number of the associated Kummer-type fiber: b2(A) + 1."""
    if b2_abelian < 0:
        raise InputError("Betti number must be nonnegative")
    return b2_abelian + 1


# --- truncated integer power series -------------------------------------------

class IntegerSeries:
    """Integer power series truncated at an explicit order.

    Arithmetic never silently extends the truncation: products truncate to
    the smaller order of the two factors.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(int(c) for c in coeffs)
        if not self.coeffs:
            raise InputError("a series needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> int:
        if not 0 <= i <= self.order:
            raise InputError(f"coefficient {i} beyond truncation order {self.order}")
        return self.coeffs[i]

    def truncate(self, order: int) -> "IntegerSeries":
        if order > self.order:
            raise InputError("cannot extend a truncated series")
        return IntegerSeries(self.coeffs[: order + 1])

    def __mul__(self, other: "IntegerSeries") -> "IntegerSeries":
        n = min(self.order, other.order)
        out = [0] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return IntegerSeries(out)

    def __eq__(self, other):
        return isinstance(other, IntegerSeries) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntegerSeries(order={self.order}, coeffs={list(self.coeffs)})"

    def to_json_dict(self) -> dict:
        return {"truncation": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @staticmethod
    def from_json_dict(data: dict) -> "IntegerSeries":
        return IntegerSeries([int(c) for c in data["coeffs"]])

    def dump_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _one_factor_inverse_power(k: int, e: int, order: int) -> IntegerSeries:
    """(1 - q^k)^(-e) truncated at the given order, any integer e."""
    coeffs = [0] * (order + 1)
    coeffs[0] = 1
    jmax = order // k
    if e >= 0:
        for j in range(1, jmax + 1):
            coeffs[j * k] = math.comb(e + j - 1, j)
    else:
        m = -e
        for j in range(1, min(jmax, m) + 1):
            coeffs[j * k] = (-1) ** j * math.comb(m, j)
    return IntegerSeries(coeffs)


def goettsche_series(e: int, order: int) -> IntegerSeries:
    """Product over k >= 1 of (1 - q^k)^(-e), truncated at the given order.

    The degree-g coefficient is the Euler characteristic of the rank-g point
    moduli of a surface with Euler number e; for e = 24 it is also the
    rational-curve count in the genus-g linear system.
    """
    if order < 0:
        raise InputError("truncation order must be >= 0")
    out = IntegerSeries([1] + [0] * order)
    for k in range(1, order + 1):
        out = out * _one_factor_inverse_power(k, e, order)
    return out


def hilb2_euler(e: int) -> int:
    """Euler number of the length-2 point moduli: (e^2 + 3e)/2.

    Blow up the diagonal of the symmetric square and replace it with a
    P^1-bundle: (e^2 - e)/2 off the diagonal plus 2e over it.
    """
    e = int(e)
    num = e * e + 3 * e  # e(e+3): one factor is always even
    if num % 2 != 0:
        raise InconsistencyError("e^2 + 3e must be even")
    return num // 2


def elliptic_fiber_count(e_total: int, e_singular_fiber: int) -> int:
    """Number of singular fibers in a genus-1 fibration over a sphere.

    Smooth genus-1 fibers have Euler number 0, so the total Euler number is
    carried entirely by the singular fibers: count = e_total / e_fiber.
    """
    e_total = int(e_total)
    e_singular_fiber = int(e_singular_fiber)
    if e_singular_fiber < 1:
        raise InputError("singular-fiber Euler number must be >= 1")
    if e_total % e_singular_fiber != 0:
        raise InconsistencyError(
            f"{e_singular_fiber} does not divide e(X) = {e_total}: "
            "fiber model inconsistent with the total space"
        )
    return e_total // e_singular_fiber


def jacobian_euler(normalization_genus: int, nodes: int) -> int:
    """Euler number of the compactified degree-g line-bundle moduli of an
    integral curve with the given normalization genus and node count.

    Positive normalization genus admits free finite cyclic actions of every
    order (torsion line bundles), forcing Euler number 0.  For a rational
    nodal curve the strata indexed by the set of non-locally-free points
    carry torus factors of Euler number 0, leaving the single deepest
    stratum: Euler number 1.
    """
    g, nodes = int(normalization_genus), int(nodes)
    if g < 0 or nodes < 0:
        raise InputError("genus and node count must be >= 0")
    return 0 if g >= 1 else 1


def jacobian_euler_stratified(nodes: int) -> int:
    """Stratification sum for the rational-curve case, written out.

    Sum over subsets S of the nodes of e((C*)^(nodes - |S|)); e(C*) = 0, so
    only the full subset survives.  Kept as the slow route against which
    jacobian_euler is checked.
    """
    nodes = int(nodes)
    euler_torus = lambda m: 0 if m >= 1 else 1  # e((C*)^m) = 0^m
    return sum(math.comb(nodes, k) * euler_torus(nodes - k) for k in range(nodes + 1))


def moduli_dims(m: int) -> tuple[int, int]:
    """(dim of length-m point moduli, dim of degree-m compactified line-bundle
    moduli) = (2m, 2m); the two spaces are birational for equal parameter."""
    m = int(m)
    if m < 0:
        raise InputError("parameter must be >= 0")
    return (2 * m, 2 * m)


# --- decomposition enumeration -------------------------------------------------

_FACTOR_KINDS = ("torus", "strict_cy", "hk")


@dataclass(frozen=True, order=True)
class DecompositionFactor:
    """One K-trivial factor: a torus, a strict Calabi-Yau, or a holomorphic
    symplectic piece.  The complex-dimension-2 non-torus case is canonically
    the K3 class, recorded as hk of dimension 2."""

    kind: str
    complex_dim: int

    def __post_init__(self):
        if self.kind not in _FACTOR_KINDS:
            raise InputError(f"unknown factor kind {self.kind!r}")
        d = self.complex_dim
        if self.kind == "torus" and d < 1:
            raise InputError("torus factors need dimension >= 1")
        if self.kind == "strict_cy" and d < 3:
            raise InputError("strict Calabi-Yau factors need dimension >= 3")
        if self.kind == "hk" and (d < 2 or d % 2 != 0):
            raise InputError("holomorphic symplectic factors need even dimension >= 2")

    @property
    def chi(self) -> int:
        if self.kind == "torus":
            return 0
        if self.kind == "strict_cy":
            return 1 + (-1) ** self.complex_dim
        return self.complex_dim // 2 + 1  # hk of dimension 2r: r + 1


def _factors_of_dim(d: int) -> list[DecompositionFactor]:
    out = [DecompositionFactor("torus", d)]
    if d >= 3:
        out.append(DecompositionFactor("strict_cy", d))
    if d >= 2 and d % 2 == 0:
        out.append(DecompositionFactor("hk", d))
    return out


def chi_decomposition_enumerate(complex_dim: int, chi: int) -> set[tuple[DecompositionFactor, ...]]:
    """All multisets of factors with total dimension complex_dim whose
    structure-sheaf Euler characteristics multiply to chi.

    chi is multiplicative over products, a torus factor contributes 0, and
    odd-dimensional strict Calabi-Yau factors also contribute 0; both kinds
    therefore appear only when chi = 0, where the enumeration is ambiguous
    by nature and reports every combination.
    """
    complex_dim = int(complex_dim)
    chi = int(chi)
    if complex_dim < 1:
        raise InputError("complex dimension must be >= 1")
    catalog = []
    for d in range(1, complex_dim + 1):
        catalog.extend(_factors_of_dim(d))
    catalog.sort()
    results: set[tuple[DecompositionFactor, ...]] = set()

    def recurse(start: int, dim_left: int, chi_prod: int, picked: tuple):
        if dim_left == 0:
            if picked and chi_prod == chi:
                results.add(picked)
            return
        for idx in range(start, len(catalog)):
            f = catalog[idx]
            if f.complex_dim > dim_left:
                continue
            if chi != 0 and f.chi == 0:
                continue  # a zero factor can never reach a nonzero product
            recurse(idx, dim_left - f.complex_dim, chi_prod * f.chi, picked + (f,))

    recurse(0, complex_dim, 1, ())
    return results


# --- slope stability -------------------------------------------------------------

def slope(deg, rank: int) -> Fraction:
    """Degree divided by rank; degree is caller-supplied data."""
    rank = int(rank)
    if rank < 1:
        raise InputError("rank must be >= 1")
    return to_fraction(deg) / rank


def is_stable(f_slope, sub_slopes, semistable: bool = False) -> bool:
    """Stable: every proper-subsheaf slope strictly below; semistable: <=."""
    f = to_fraction(f_slope)
    subs = [to_fraction(s) for s in sub_slopes]
    if semistable:
        return all(s <= f for s in subs)
    return all(s < f for s in subs)


# --- bitangents -----------------------------------------------------------------

def plane_curve_bitangents(d: int) -> int:
    """Bitangent count of a smooth plane curve of degree d: d(d-2)(d-3)(d+3)/2."""
    d = int(d)
    if d < 4:
        raise InputError("bitangent count needs degree >= 4")
    num = d * (d - 2) * (d - 3) * (d + 3)
    if num % 2 != 0:
        raise InconsistencyError("bitangent formula produced an odd numerator")
    return num // 2


def bitangent_count_sextic() -> int:
    """Bitangents of a very general plane sextic: the genus-2 curve count.

    Route one: coefficient q^2 of the e = 24 product series.  Route two:
    the classical plane-curve formula at d = 6.  The two must agree; a
    mismatch is an internal inconsistency.
    """
    via_series = goettsche_series(24, 2).coeff(2)
    via_pluecker = plane_curve_bitangents(6)
    if via_series != via_pluecker:
        raise InconsistencyError(
            f"series route gives {via_series}, plane-curve route gives {via_pluecker}"
        )
    return via_series
