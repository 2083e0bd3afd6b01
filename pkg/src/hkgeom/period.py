"""Period-domain geometry over an integral lattice.

A period point is a projective class x + iy in the complexified lattice; it
lies in the domain when q(x) = q(y), b(x, y) = 0 and q(x) > 0, all decided
exactly on rational coordinates.  Positive 3-planes cut conics out of the
domain; points of such a conic are emitted from right-handed orthonormal
frames of the plane.  Orthonormalization can introduce square roots, so the
conic and path-search code runs exactly whenever the roots are rational and
falls back to floats (verified against a residual tolerance) when not.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError
from .exactlinalg import (
    kernel_basis,
    leading_principal_minors,
    matrix_rank,
    rref,
    solve_in_span,
    vec_scale,
    vec_sub,
)
from .lattice import IntegralLattice, bilinear_q, signature
from .ratmath import ComplexRational, format_fraction, frac_vector, sqrt_exact, to_fraction

CONIC_RESIDUAL_TOL = 1e-10


# --- period points -----------------------------------------------------------

@dataclass(frozen=True)
class PeriodPoint:
    """Projective class x + iy with exact rational coordinate vectors."""

    re: tuple[Fraction, ...]
    im: tuple[Fraction, ...]

    def __post_init__(self):
        re = frac_vector(self.re)
        im = frac_vector(self.im)
        if len(re) != len(im):
            raise InputError("re and im parts must have equal length")
        if all(x == 0 for x in re) and all(y == 0 for y in im):
            raise InputError("the zero vector is not a projective point")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @property
    def dim(self) -> int:
        return len(self.re)

    def scale(self, z) -> "PeriodPoint":
        """Multiply by a nonzero complex rational scalar."""
        z = ComplexRational.of(z)
        if z.is_zero():
            raise InputError("projective scaling must be nonzero")
        re = tuple(z.re * x - z.im * y for x, y in zip(self.re, self.im))
        im = tuple(z.im * x + z.re * y for x, y in zip(self.re, self.im))
        return PeriodPoint(re, im)

    def canonical(self) -> "PeriodPoint":
        """Normalize the first nonzero complex coordinate to 1 (exact)."""
        j = next(
            k for k in range(self.dim) if self.re[k] != 0 or self.im[k] != 0
        )
        z = ComplexRational(self.re[j], self.im[j])
        inv = ComplexRational(Fraction(1)) / z
        return self.scale(inv)

    def to_json_dict(self) -> dict:
        return {
            "re": [format_fraction(x) for x in self.re],
            "im": [format_fraction(y) for y in self.im],
        }


def period_point(re, im) -> PeriodPoint:
    return PeriodPoint(frac_vector(re), frac_vector(im))


def period_point_from_json(data: dict) -> PeriodPoint:
    try:
        return period_point(data["re"], data["im"])
    except (TypeError, KeyError):
        raise InputError("period point JSON needs 're' and 'im' arrays") from None


def projectively_equal(p: PeriodPoint, q: PeriodPoint) -> bool:
    if p.dim != q.dim:
        return False
    return p.canonical() == q.canonical()


def _check_dim(lat: IntegralLattice, p: PeriodPoint):
    if p.dim != lat.rank:
        raise InputError(f"point dimension {p.dim} != lattice rank {lat.rank}")


def membership_data(lat: IntegralLattice, p: PeriodPoint):
    """(q(x), q(y), b(x, y)) as exact Fractions."""
    _check_dim(lat, p)
    qx = bilinear_q(lat, p.re, p.re)
    qy = bilinear_q(lat, p.im, p.im)
    bxy = bilinear_q(lat, p.re, p.im)
    return qx, qy, bxy


def membership_residual(lat: IntegralLattice, p: PeriodPoint) -> float:
    """Relative size of the two equality defects; 0.0 for exact members."""
    qx, qy, bxy = membership_data(lat, p)
    scale = max(abs(float(qx)), abs(float(qy)), 1.0)
    return max(abs(float(qx - qy)), abs(float(bxy))) / scale


def in_period_domain(lat: IntegralLattice, p: PeriodPoint, tol: float = 0.0) -> bool:
    """q(alpha) = 0 and q(alpha + conj(alpha)) > 0, on exact coordinates.

    With tol = 0 the equalities are exact; a positive tol admits points
    whose relative residual is below it (used for float-built conic points).
    """
    qx, qy, bxy = membership_data(lat, p)
    if qx + qy <= 0:
        return False
    if tol == 0.0:
        return qx == qy and bxy == 0
    return membership_residual(lat, p) <= tol


# --- weight-2 Hodge structure from a period ------------------------------------

@dataclass(frozen=True)
class HodgeStructureW2:
    h20: int
    h11: int
    h02: int
    h11_basis: tuple[tuple[Fraction, ...], ...]


def hodge_structure_from_period(lat: IntegralLattice, p: PeriodPoint) -> HodgeStructureW2:
    """Split the lattice by a domain point: dims (1, rank-2, 1) and a rational
    basis of the middle piece {v : b(v, x) = 0 and b(v, y) = 0}."""
    if not in_period_domain(lat, p):
        raise InputError("point is not in the period domain")
    gram = [[Fraction(x) for x in row] for row in lat.gram]
    rows = []
    for vec in (p.re, p.im):
        rows.append([sum(gram[i][j] * vec[i] for i in range(lat.rank)) for j in range(lat.rank)])
    basis = kernel_basis(rows)
    if len(basis) != lat.rank - 2:
        raise InputError(
            f"degenerate period point: orthogonal complement has dimension {len(basis)}"
        )
    return HodgeStructureW2(h20=1, h11=lat.rank - 2, h02=1, h11_basis=tuple(basis))


# --- positive 3-planes and twistor conics ---------------------------------------

@dataclass(frozen=True)
class PositiveThreePlane:
    """Three rational spanning vectors of a 3-plane positive for the form."""

    basis: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        basis = tuple(frac_vector(v) for v in self.basis)
        if len(basis) != 3:
            raise InputError("a 3-plane needs exactly three basis vectors")
        object.__setattr__(self, "basis", basis)

    def to_json_dict(self) -> dict:
        return {"basis": [[format_fraction(x) for x in v] for v in self.basis]}


def plane_gram(lat: IntegralLattice, plane: PositiveThreePlane):
    return [[bilinear_q(lat, u, v) for v in plane.basis] for u in plane.basis]


def positive_three_plane(lat: IntegralLattice, vectors) -> PositiveThreePlane:
    """Validate positive-definiteness by exact leading principal minors."""
    plane = PositiveThreePlane(tuple(frac_vector(v) for v in vectors))
    for v in plane.basis:
        if len(v) != lat.rank:
            raise InputError("plane vector dimension does not match lattice rank")
    minors = leading_principal_minors(plane_gram(lat, plane))
    for k, m in enumerate(minors):
        if m <= 0:
            raise InputError(
                f"3-plane is not positive: leading principal minor {k + 1} is {m}"
            )
    return plane


def _orthogonalize(lat: IntegralLattice, plane: PositiveThreePlane):
    """Exact q-orthogonal basis of the plane with its positive squares."""
    vs = []
    qs = []
    for w in plane.basis:
        v = list(w)
        for prev, qprev in zip(vs, qs):
            coeff = bilinear_q(lat, w, prev) / qprev
            v = list(vec_sub(v, vec_scale(coeff, prev)))
        qv = bilinear_q(lat, v, v)
        if qv <= 0:
            raise InputError("3-plane is not positive definite")
        vs.append(tuple(v))
        qs.append(qv)
    return vs, qs


def _orthonormal_model(lat: IntegralLattice, plane: PositiveThreePlane):
    """(u1, u2, u3, exact): unit vectors as Fraction tuples when the three
    square roots are rational, else float tuples."""
    vs, qs = _orthogonalize(lat, plane)
    roots = [sqrt_exact(q) for q in qs]
    if all(r is not None for r in roots):
        units = [vec_scale(1 / r, v) for v, r in zip(vs, roots)]
        return units, True
    units = [
        tuple(float(c) / math.sqrt(float(q)) for c in v) for v, q in zip(vs, qs)
    ]
    return units, False


def _point_from_model_pair(units, exact, vpart, wpart) -> PeriodPoint:
    dim = len(units[0])
    if exact:
        re = tuple(
            sum((to_fraction(vpart[j]) * units[j][k] for j in range(3)), Fraction(0))
            for k in range(dim)
        )
        im = tuple(
            sum((to_fraction(wpart[j]) * units[j][k] for j in range(3)), Fraction(0))
            for k in range(dim)
        )
        return PeriodPoint(re, im)
    re = tuple(
        Fraction(sum(float(vpart[j]) * units[j][k] for j in range(3))) for k in range(dim)
    )
    im = tuple(
        Fraction(sum(float(wpart[j]) * units[j][k] for j in range(3))) for k in range(dim)
    )
    return PeriodPoint(re, im)


def _rational_rotation(a, b, c, d):
    """Right-handed orthonormal rows from a nonzero quaternion, exactly."""
    n = a * a + b * b + c * c + d * d
    return [
        (
            (a * a + b * b - c * c - d * d) / n,
            2 * (b * c - a * d) / n,
            2 * (b * d + a * c) / n,
        ),
        (
            2 * (b * c + a * d) / n,
            (a * a - b * b + c * c - d * d) / n,
            2 * (c * d - a * b) / n,
        ),
        (
            2 * (b * d - a * c) / n,
            2 * (c * d + a * b) / n,
            (a * a - b * b - c * c + d * d) / n,
        ),
    ]


def twistor_conic(
    lat: IntegralLattice,
    plane: PositiveThreePlane,
    samples: int,
    seed: int = 0,
) -> list[PeriodPoint]:
    """Sample points of the conic cut out by the plane.

    Frames (lam, v, w) are right-handed orthonormal triples of the plane in
    its orthonormal model; each yields the point v + i*w.  The first sample
    uses the identity frame.  Every emitted point is checked against the
    membership predicate: exactly when the orthonormalization stayed
    rational, else within CONIC_RESIDUAL_TOL.
    """
    if samples < 1:
        raise InputError("need at least one sample")
    plane = positive_three_plane(lat, plane.basis)
    units, exact = _orthonormal_model(lat, plane)
    rng = random.Random(seed)
    frames = [[(1, 0, 0), (0, 1, 0), (0, 0, 1)]]
    while len(frames) < samples:
        quat = tuple(Fraction(rng.randint(-9, 9)) for _ in range(4))
        if all(x == 0 for x in quat):
            continue
        frames.append(_rational_rotation(*quat))
    points = []
    for frame in frames[:samples]:
        pt = _point_from_model_pair(units, exact, frame[1], frame[2])
        if exact:
            if not in_period_domain(lat, pt):
                raise AssertionError("exact conic point failed membership")
        else:
            if membership_residual(lat, pt) > CONIC_RESIDUAL_TOL:
                raise AssertionError("conic point residual above tolerance")
        points.append(pt)
    return points


def twistor_conic_point(lat: IntegralLattice, plane: PositiveThreePlane, lam) -> PeriodPoint:
    """The conic point indexed by a direction lam in the plane's orthonormal
    model, via a deterministic right-handed frame completion.

    Antipodal directions complete to frames (lam, v, w) and (-lam, v, -w),
    so they yield a conjugate-projective pair of points.
    """
    plane = positive_three_plane(lat, plane.basis)
    units, exact = _orthonormal_model(lat, plane)
    lam = [to_fraction(x) for x in lam]
    if len(lam) != 3 or all(x == 0 for x in lam):
        raise InputError("lam must be a nonzero model triple")
    nrm2 = sum(x * x for x in lam)
    root = sqrt_exact(nrm2)
    if root is None:
        lam_u = [float(x) / math.sqrt(float(nrm2)) for x in lam]
        exact = False
    else:
        lam_u = [x / root for x in lam]
    # reference axis least aligned with lam
    axis = min(range(3), key=lambda a: abs(float(lam_u[a])))
    e = [Fraction(0)] * 3
    e[axis] = Fraction(1)
    if exact:
        dot = sum(e[j] * lam_u[j] for j in range(3))
        v0 = [e[j] - dot * lam_u[j] for j in range(3)]
        n2 = sum(x * x for x in v0)
        r = sqrt_exact(n2)
        if r is None:
            exact = False
        else:
            v0 = [x / r for x in v0]
    if not exact:
        lam_f = [float(x) for x in lam_u]
        dot = lam_f[axis]
        v0 = [float(e[j]) - dot * lam_f[j] for j in range(3)]
        n = math.sqrt(sum(x * x for x in v0))
        v0 = [x / n for x in v0]
        lam_u = lam_f
    w = [
        lam_u[1] * v0[2] - lam_u[2] * v0[1],
        lam_u[2] * v0[0] - lam_u[0] * v0[2],
        lam_u[0] * v0[1] - lam_u[1] * v0[0],
    ]
    units_exact = all(isinstance(c, Fraction) for u in units for c in u)
    if exact and not units_exact:
        exact = False
        v0 = [float(x) for x in v0]
        w = [float(x) for x in w]
    if not exact and units_exact:
        units = [tuple(float(c) for c in u) for u in units]
    return _point_from_model_pair(units, exact, v0, w)


def conic_through(lat: IntegralLattice, p: PeriodPoint, w3) -> PositiveThreePlane:
    """Extend the 2-plane of a domain point by a third direction.

    w3 is projected q-orthogonally off span(x, y); the result must make a
    positive-definite 3-plane, otherwise the offending leading principal
    minor is reported.
    """
    if not in_period_domain(lat, p):
        raise InputError("point is not in the period domain")
    w3 = frac_vector(w3)
    if len(w3) != lat.rank:
        raise InputError("w3 dimension does not match lattice rank")
    qx = bilinear_q(lat, p.re, p.re)
    qy = bilinear_q(lat, p.im, p.im)
    r = vec_sub(w3, vec_scale(bilinear_q(lat, w3, p.re) / qx, p.re))
    r = vec_sub(r, vec_scale(bilinear_q(lat, w3, p.im) / qy, p.im))
    basis = (p.re, p.im, tuple(r))
    if matrix_rank([list(v) for v in basis]) < 3:
        raise InputError("span(x, y, w3) is not 3-dimensional")
    gram = [[bilinear_q(lat, u, v) for v in basis] for u in basis]
    minors = leading_principal_minors(gram)
    for k, m in enumerate(minors):
        if m <= 0:
            raise InputError(
                f"projected direction gives a non-positive plane: minor {k + 1} = {m}"
            )
    return PositiveThreePlane(basis)


# --- twistor path search ----------------------------------------------------------

@dataclass(frozen=True)
class ChainLink:
    """One conic of the chain and the point where the chain leaves it."""

    plane: PositiveThreePlane
    point: PeriodPoint


@dataclass(frozen=True)
class TwistorPathResult:
    status: str  # "success" | "inconclusive"
    chain: tuple[ChainLink, ...]
    seed: int
    note: str = ""

    @property
    def steps(self) -> int:
        return len(self.chain)

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "steps": self.steps,
            "seed": self.seed,
            "note": self.note,
            "chain": [
                {"plane": link.plane.to_json_dict(), "point": link.point.to_json_dict()}
                for link in self.chain
            ],
        }


def _plane_of_point(p: PeriodPoint):
    return p.re, p.im


def _project_off_pair(lat, x, y, qx, qy, d):
    r = vec_sub(d, vec_scale(bilinear_q(lat, d, x) / qx, x))
    r = vec_sub(r, vec_scale(bilinear_q(lat, r, y) / qy, y))
    return tuple(r)


def _reduce_point(p: PeriodPoint) -> PeriodPoint:
    """Joint integer rescaling of (x, y): same projective point, small entries."""
    coords = list(p.re) + list(p.im)
    lcm = 1
    for c in coords:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coords]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    n = len(ints) // 2
    return PeriodPoint(tuple(Fraction(v) for v in ints[:n]),
                       tuple(Fraction(v) for v in ints[n:]))


def _reduce_vector(v):
    lcm = 1
    for c in v:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(Fraction(x) for x in ints)


def _random_int_vector(rng, dim, bound=4):
    while True:
        v = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(dim))
        if any(x != 0 for x in v):
            return v


def _arc_samples(h11, h12, h22, rng, extra=4):
    """Rational pairs (c1, c2) with h11 c1^2 + 2 h12 c1 c2 + h22 c2^2 > 0.

    Candidate mixes are proposed cheaply (axes, parabola vertices, small
    rationals) and every survivor is certified by exact evaluation.  Empty
    means the form has no positive values, exactly."""
    candidates = [
        (Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(1)),
        (Fraction(1), Fraction(1)),
        (Fraction(1), Fraction(-1)),
    ]
    if h22 != 0:
        candidates.append((Fraction(1), -h12 / h22))
    if h11 != 0:
        candidates.append((-h12 / h11, Fraction(1)))
    if h12 != 0:
        candidates.append((Fraction(1), (1 - h11) / (2 * h12)))
        candidates.append(((1 - h22) / (2 * h12), Fraction(1)))
    for _ in range(extra):
        candidates.append(
            (
                Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
                Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
            )
        )
    out = []
    seen = set()
    for c1, c2 in candidates:
        if c1 == 0 and c2 == 0:
            continue
        key = (c1, c2)
        if key in seen:
            continue
        seen.add(key)
        if h11 * c1 * c1 + 2 * h12 * c1 * c2 + h22 * c2 * c2 > 0:
            out.append((c1, c2))
    return out


def _positive_form_vector(gram, vectors):
    """A vector with positive square for the symmetric form, or None.

    Symmetric congruence elimination carrying the basis vectors along, so
    the answer is exact and constructive."""
    a = [row[:] for row in gram]
    vecs = [list(v) for v in vectors]
    n = len(a)
    k = 0
    while k < n:
        pivot = next((i for i in range(k, n) if a[i][i] != 0), None)
        if pivot is None:
            off = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0),
                None,
            )
            if off is None:
                return None  # form is zero on the remaining space
            i, j = off
            c = Fraction(1) if a[i][j] > 0 else Fraction(-1)
            # v_i + c v_j has square 2|a[i][j]| > 0
            return tuple(p_ + c * q_ for p_, q_ in zip(vecs[i], vecs[j]))
        if a[pivot][pivot] > 0:
            return tuple(vecs[pivot])
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            for row in a:
                row[k], row[pivot] = row[pivot], row[k]
            vecs[k], vecs[pivot] = vecs[pivot], vecs[k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] * inv
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
            for j in range(k, n):
                a[j][i] -= f * a[j][k]
            vecs[i] = [p_ - f * q_ for p_, q_ in zip(vecs[i], vecs[k])]
        k += 1
    return None


def _positive_orthogonal_direction(lat, x, y):
    """An exact vector r with b(r, x) = b(r, y) = 0 and q(r) > 0, or None.

    Exists whenever the form has a third positive direction beyond the
    plane of (x, y); found by diagonalizing the restriction of the form to
    the orthogonal complement."""
    gram = [[Fraction(e) for e in row] for row in lat.gram]
    rows = []
    for vec in (x, y):
        rows.append([sum(gram[i][j] * vec[i] for i in range(lat.rank)) for j in range(lat.rank)])
    kern = kernel_basis(rows)
    if not kern:
        return None
    h = [[bilinear_q(lat, u, v) for v in kern] for u in kern]
    r = _positive_form_vector(h, kern)
    return None if r is None else _reduce_vector(r)


def _complete_plane(lat, p: PeriodPoint, rng, randomize=True):
    """A positive 3-plane containing the 2-plane of a domain point."""
    x, y = _plane_of_point(p)
    qx = bilinear_q(lat, x, x)
    qy = bilinear_q(lat, y, y)
    if randomize:
        for _ in range(8):
            d = _random_int_vector(rng, lat.rank)
            r = _project_off_pair(lat, x, y, qx, qy, d)
            if any(c != 0 for c in r) and bilinear_q(lat, r, r) > 0:
                return PositiveThreePlane((x, y, _reduce_vector(r)))
    r = _positive_orthogonal_direction(lat, x, y)
    if r is None:
        return None
    return PositiveThreePlane((x, y, r))


def _midpoint_on_segment(lat, u, uprime):
    """A domain point whose 2-plane is span(u, u'), with u kept exact.

    The second component is u' made orthogonal to u and rescaled to match
    q(u); the scale is exact when q(u)/q(u'') is a perfect rational square,
    else a float-derived dyadic rational (membership then holds within
    CONIC_RESIDUAL_TOL, since orthogonality stays exact).
    """
    qu = bilinear_q(lat, u, u)
    upp = vec_sub(uprime, vec_scale(bilinear_q(lat, u, uprime) / qu, u))
    upp = _reduce_vector(upp)
    qupp = bilinear_q(lat, upp, upp)
    if qupp <= 0:
        return None
    ratio = qu / qupp
    s = sqrt_exact(ratio)
    if s is None:
        s = Fraction(math.sqrt(float(ratio)))
    return PeriodPoint(tuple(u), vec_scale(s, upp))


def _small_plane_point(lat, p: PeriodPoint) -> PeriodPoint:
    """Same conic incidences as p, with small coordinates.

    The 2-plane of a domain point carries exactly one conjugate pair of
    projective domain points, and its discriminant is a perfect rational
    square.  Lagrange-reducing an integral basis of the plane and solving
    for the point again therefore reproduces p (or its conjugate, which
    lies on the same conics) with bounded entries.
    """
    v1 = list(_reduce_vector(p.re))
    v2 = list(_reduce_vector(p.im))

    def dot(a, b):
        return sum(x * y for x, y in zip(a, b))

    while True:
        if dot(v1, v1) > dot(v2, v2):
            v1, v2 = v2, v1
        d11 = dot(v1, v1)
        if d11 == 0:
            return p
        mu = Fraction(dot(v1, v2), d11)
        m = round(mu)  # exact nearest-integer rounding on Fractions
        if m == 0:
            break
        v2 = [a - m * b for a, b in zip(v2, v1)]
        if all(x == 0 for x in v2):
            return p
    q1 = bilinear_q(lat, v1, v1)
    if q1 <= 0:
        return p
    v2p = vec_sub(v2, vec_scale(bilinear_q(lat, v1, v2) / q1, v1))
    q2 = bilinear_q(lat, v2p, v2p)
    if q2 <= 0:
        return p
    t = sqrt_exact(q1 * q2)
    if t is None:
        return p
    return PeriodPoint(tuple(Fraction(c) for c in v1), vec_scale(q1 / t, v2p))


def _try_close(lat, a: PeriodPoint, b: PeriodPoint, rng):
    """A closing sub-chain from a to b: [], one link, or two links; or None."""
    if projectively_equal(a, b):
        return []
    ax, ay = _plane_of_point(a)
    bx, by = _plane_of_point(b)
    joint = [list(v) for v in (ax, ay, bx, by)]
    rank = matrix_rank(joint)
    if rank == 2:
        # same 2-plane (conjugate points): any positive completion carries both
        plane = _complete_plane(lat, a, rng)
        if plane is not None:
            return [ChainLink(plane, b)]
    if rank == 3:
        for third in (bx, by):
            basis = (ax, ay, third)
            if matrix_rank([list(v) for v in basis]) == 3:
                gram = [[bilinear_q(lat, u, v) for v in basis] for u in basis]
                if all(m > 0 for m in leading_principal_minors(gram)):
                    return [ChainLink(PositiveThreePlane(basis), b)]
        return None
    qax = bilinear_q(lat, ax, ax)
    qay = bilinear_q(lat, ay, ay)
    qbx = bilinear_q(lat, bx, bx)
    qby = bilinear_q(lat, by, by)

    def mix(pair, coeffs):
        return _reduce_vector(
            tuple(coeffs[0] * p_ + coeffs[1] * q_ for p_, q_ in zip(pair[0], pair[1]))
        )

    def shadow(base_x, base_y, qbx_, qby_, span_pair):
        px = _project_off_pair(lat, base_x, base_y, qbx_, qby_, span_pair[0])
        py = _project_off_pair(lat, base_x, base_y, qbx_, qby_, span_pair[1])
        return (
            bilinear_q(lat, px, px),
            bilinear_q(lat, px, py),
            bilinear_q(lat, py, py),
        )

    def orthogonal_companion(u_free, host_pair):
        """Vector in span(host_pair) orthogonal to u_free (nonzero)."""
        b1 = bilinear_q(lat, host_pair[0], u_free)
        b2 = bilinear_q(lat, host_pair[1], u_free)
        if b1 == 0 and b2 == 0:
            return mix(host_pair, (Fraction(1), Fraction(0)))
        return mix(host_pair, (b2, -b1))

    def attempt(u, uprime):
        """u in the current plane, u' in the target plane, span(u, u')
        positive: both residuals positive make the two conic planes."""
        quu = bilinear_q(lat, u, u)
        qpp = bilinear_q(lat, uprime, uprime)
        bup = bilinear_q(lat, u, uprime)
        if quu * qpp - bup * bup <= 0:
            return None  # span(u, u') is not a positive 2-plane
        r1 = _project_off_pair(lat, ax, ay, qax, qay, uprime)
        if all(c == 0 for c in r1) or bilinear_q(lat, r1, r1) <= 0:
            return None
        r2 = _project_off_pair(lat, bx, by, qbx, qby, u)
        if all(c == 0 for c in r2) or bilinear_q(lat, r2, r2) <= 0:
            return None
        mid = _midpoint_on_segment(lat, u, uprime)
        if mid is None:
            return None
        w1 = PositiveThreePlane((ax, ay, _reduce_vector(r1)))
        w2 = PositiveThreePlane((bx, by, _reduce_vector(r2)))
        return [ChainLink(w1, mid), ChainLink(w2, b)]

    # u' in the target plane with positive residual off the current plane and
    # symmetrically u in the current plane; try orthogonal companions first
    # (midpoint plane positive for free), then arc cross-pairs.
    h11, h12, h22 = shadow(ax, ay, qax, qay, (bx, by))
    arcs_b = [mix((bx, by), c) for c in _arc_samples(h11, h12, h22, rng)]
    g11, g12, g22 = shadow(bx, by, qbx, qby, (ax, ay))
    arcs_a = [mix((ax, ay), c) for c in _arc_samples(g11, g12, g22, rng)]
    for uprime in arcs_b:
        got = attempt(orthogonal_companion(uprime, (ax, ay)), uprime)
        if got is not None:
            return got
    for u in arcs_a:
        got = attempt(u, orthogonal_companion(u, (bx, by)))
        if got is not None:
            return got
    for u in arcs_a:
        for uprime in arcs_b:
            got = attempt(u, uprime)
            if got is not None:
                return got
    return None


def _random_move(lat, cur: PeriodPoint, target: PeriodPoint, rng, tries=12):
    """One conic step: replace one frame vector of cur by a rational point of
    the circle {q = const} in a positive extension plane, preferring
    extension directions drawn from the target plane and falling back to a
    constructed positive direction of the orthogonal complement."""
    x, y = _plane_of_point(cur)
    qx = bilinear_q(lat, x, x)
    qy = bilinear_q(lat, y, y)
    tx, ty = _plane_of_point(target)
    candidates = [
        tuple(c1 * p_ + c2 * q_ for p_, q_ in zip(tx, ty))
        for c1, c2 in (
            (Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(1)),
            (Fraction(1), Fraction(rng.randint(-2, 2))),
        )
    ]
    for _ in range(tries):
        candidates.append(_random_int_vector(rng, lat.rank))
    guaranteed = _positive_orthogonal_direction(lat, x, y)
    if guaranteed is not None:
        candidates.append(guaranteed)
    for d in candidates:
        r = _project_off_pair(lat, x, y, qx, qy, d)
        if all(c == 0 for c in r):
            continue
        rho_vec = _reduce_vector(r)
        rho = bilinear_q(lat, rho_vec, rho_vec)
        if rho <= 0:
            continue
        r = rho_vec
        plane = PositiveThreePlane((x, y, r))
        move_x = rng.random() < 0.5
        # t near sqrt(q/rho) rotates the moved component close to the new
        # direction r: a decisive step across the plane space
        t_star = Fraction(
            math.sqrt(float((qx if move_x else qy) / rho))
        ).limit_denominator(12)
        t = rng.choice(
            [t_star, Fraction(rng.randint(1, 3), rng.randint(1, 3)) * rng.choice([1, -1])]
        )
        if t == 0:
            t = Fraction(1)
        if move_x:
            denom = qx + rho * t * t
            new_x = vec_sub(
                vec_scale((rho * t * t - qx) / denom, x),
                vec_scale(2 * qx * t / denom, r),
            )
            new_point = PeriodPoint(tuple(new_x), y)
        else:
            denom = qy + rho * t * t
            new_y = vec_sub(
                vec_scale((rho * t * t - qy) / denom, y),
                vec_scale(2 * qy * t / denom, r),
            )
            new_point = PeriodPoint(x, tuple(new_y))
        return ChainLink(plane, _small_plane_point(lat, _reduce_point(new_point)))
    return None


def _definite_splitting(lat: IntegralLattice):
    """Exact rational bases (B+, B-) of a maximal positive subspace and its
    orthogonal complement, for a form of signature (3, k)."""
    rank = lat.rank
    basis = [tuple(Fraction(int(i == j)) for j in range(rank)) for i in range(rank)]
    plus = []
    space = basis
    for _ in range(3):
        h = [[bilinear_q(lat, u, v) for v in space] for u in space]
        v = _positive_form_vector(h, space)
        if v is None:
            return None
        plus.append(_reduce_vector(v))
        gram = [[Fraction(e) for e in row] for row in lat.gram]
        rows = []
        for w in plus:
            rows.append([sum(gram[i][j] * w[i] for i in range(rank)) for j in range(rank)])
        space = kernel_basis(rows)
    return plus, space


def _positive_definite_triple(lat, a, b, c) -> bool:
    basis = (a, b, c)
    if matrix_rank([list(v) for v in basis]) < 3:
        return False
    gram = [[bilinear_q(lat, u, v) for v in basis] for u in basis]
    return all(m > 0 for m in leading_principal_minors(gram))


def _pencil_bridge_vectors(lat, p, p2):
    """Float-guided candidates for a vector positive orthogonally to both
    endpoint planes: top eigenvectors of combinations of the two residual
    quadratic forms, rationalized with small denominators.  Callers certify
    every candidate exactly before use."""
    rank = lat.rank
    g = np.array(lat.gram, dtype=float)

    def unit_floats(vec):
        mx = max(abs(c) for c in vec)
        if mx == 0:
            return None
        # divide exactly first: the quotients are <= 1, so float() cannot
        # overflow no matter how large the entries are
        return np.array([float(c / mx) for c in vec])

    def residual_form(pt):
        x = unit_floats(pt.re)
        y = unit_floats(pt.im)
        if x is None or y is None:
            return None
        qx = x @ g @ x
        qy = y @ g @ y
        if qx <= 0 or qy <= 0:
            return None
        proj = np.eye(rank) - np.outer(x, g @ x) / qx - np.outer(y, g @ y) / qy
        return proj.T @ g @ proj

    qa = residual_form(p)
    qb = residual_form(p2)
    if qa is None or qb is None:
        return []
    out = []
    for m in (qa + qb, 2 * qa + qb, qa + 2 * qb):
        try:
            _, vecs = np.linalg.eigh((m + m.T) / 2)
        except np.linalg.LinAlgError:
            continue
        top = vecs[:, -1]
        top = top / np.abs(top).max()
        for denom in (16, 64):
            cand = tuple(Fraction(float(c)).limit_denominator(denom) for c in top)
            if any(c != 0 for c in cand):
                out.append(_reduce_vector(cand))
    return out


def _bridge_candidates(lat, p, p2, rng, count=12):
    """Small positive vectors to route a detour through the positive cone.

    Pool: float-guided common-residual directions, a basis of a maximal
    positive subspace with random mixes, the guaranteed positive orthogonal
    directions of both endpoint planes, and rational blends of those two
    (every candidate is certified positive before use)."""
    out = []
    out.extend(
        v for v in _pencil_bridge_vectors(lat, p, p2) if bilinear_q(lat, v, v) > 0
    )
    ra = _positive_orthogonal_direction(lat, p.re, p.im)
    rb = _positive_orthogonal_direction(lat, p2.re, p2.im)
    for r in (ra, rb):
        if r is not None:
            out.append(r)
    if ra is not None and rb is not None:
        # blends need a scale balance: normalize by the positive squares
        qa = bilinear_q(lat, ra, ra)
        qb = bilinear_q(lat, rb, rb)
        for num, den in ((1, 2), (1, 4), (3, 4), (1, 8), (7, 8), (1, 16), (15, 16)):
            t = Fraction(num, den)
            v = tuple(
                t * qb * u + (1 - t) * qa * w for u, w in zip(ra, rb)
            )
            if any(c != 0 for c in v) and bilinear_q(lat, v, v) > 0:
                out.append(_reduce_vector(v))
    split = _definite_splitting(lat)
    if split is not None:
        plus = split[0]
        out.extend(plus)
        out.append(_reduce_vector(tuple(a + b for a, b in zip(plus[0], plus[1]))))
        out.append(_reduce_vector(tuple(a + b for a, b in zip(plus[0], plus[2]))))
        out.append(_reduce_vector(tuple(a + b for a, b in zip(plus[1], plus[2]))))
        for _ in range(count):
            coeffs = [Fraction(rng.randint(-3, 3)) for _ in range(3)]
            if all(c == 0 for c in coeffs):
                continue
            v = tuple(
                sum(c * w[i] for c, w in zip(coeffs, plus))
                for i in range(lat.rank)
            )
            if bilinear_q(lat, v, v) > 0:
                out.append(_reduce_vector(v))
        if ra is not None:
            for w in plus:
                qa = bilinear_q(lat, ra, ra)
                qw = bilinear_q(lat, w, w)
                v = tuple(qw * u + qa * z for u, z in zip(ra, w))
                if bilinear_q(lat, v, v) > 0:
                    out.append(_reduce_vector(v))
    seen = set()
    uniq = []
    for v in out:
        if v not in seen:
            seen.add(v)
            uniq.append(v)
    return uniq


def _bridge_route(lat, a: PeriodPoint, b: PeriodPoint, rng, max_links):
    """Detour chains through the positive cone: 3 or 4 conics.

    A single bridge vector s gives planes (axis_a, s), (s, axis_b) between
    the endpoint planes; the three spanning 3-planes must be positive
    definite, checked exactly.  When no single s works, pairs (s1, s2) give
    a 4-conic version.  This reaches endpoint pairs whose planes differ by
    a negative-direction tilt, where no 2-conic chain exists."""
    ax, ay = _plane_of_point(a)
    bx, by = _plane_of_point(b)
    cands = _bridge_candidates(lat, a, b, rng)
    axes = [(ax, "x"), (ay, "y")]
    axes_b = [(bx, "x"), (by, "y")]
    if max_links >= 3:
        for s in cands:
            if not _positive_definite_triple(lat, ax, ay, s):
                continue
            if not _positive_definite_triple(lat, bx, by, s):
                continue
            for keep_a, _ in axes:
                for keep_b, _ in axes_b:
                    if not _positive_definite_triple(lat, keep_a, s, keep_b):
                        continue
                    mid1 = _midpoint_on_segment(lat, keep_a, s)
                    mid2 = _midpoint_on_segment(lat, s, keep_b)
                    if mid1 is None or mid2 is None:
                        continue
                    w1 = PositiveThreePlane((ax, ay, s))
                    w2 = PositiveThreePlane((keep_a, s, keep_b))
                    w3 = PositiveThreePlane((bx, by, s))
                    return [ChainLink(w1, mid1), ChainLink(w2, mid2), ChainLink(w3, b)]
    if max_links >= 4:
        good_a = [s for s in cands if _positive_definite_triple(lat, ax, ay, s)]
        good_b = [s for s in cands if _positive_definite_triple(lat, bx, by, s)]
        for s1 in good_a[:10]:
            for s2 in good_b[:10]:
                if s1 == s2:
                    continue
                for keep_a, _ in axes:
                    if not _positive_definite_triple(lat, keep_a, s1, s2):
                        continue
                    for keep_b, _ in axes_b:
                        if not _positive_definite_triple(lat, s1, s2, keep_b):
                            continue
                        m1 = _midpoint_on_segment(lat, keep_a, s1)
                        m2 = _midpoint_on_segment(lat, s1, s2)
                        m3 = _midpoint_on_segment(lat, s2, keep_b)
                        if m1 is None or m2 is None or m3 is None:
                            continue
                        w1 = PositiveThreePlane((ax, ay, s1))
                        w2 = PositiveThreePlane((keep_a, s1, s2))
                        w3 = PositiveThreePlane((s1, s2, keep_b))
                        w4 = PositiveThreePlane((bx, by, s2))
                        return [
                            ChainLink(w1, m1),
                            ChainLink(w2, m2),
                            ChainLink(w3, m3),
                            ChainLink(w4, b),
                        ]
    return None


def _connect_pair(lat, a: PeriodPoint, b: PeriodPoint, rng, max_links):
    """Best effort direct connection: 0, 1, 2 conics, else a cone detour."""
    sub = _try_close(lat, a, b, rng)
    if sub is not None and len(sub) <= max_links:
        return sub
    return _bridge_route(lat, a, b, rng, max_links)


def twistor_path_search(
    lat: IntegralLattice,
    p: PeriodPoint,
    p2: PeriodPoint,
    max_steps: int = 16,
    seed: int = 0,
    restarts: int = 3,
) -> TwistorPathResult:
    """Randomized greedy chain of conics joining two domain points.

    Per restart: the direct closing construction (shared conic, or two
    conics through a common midpoint), then explicit detours through the
    positive cone (3 or 4 conics), then a short randomized walk retrying
    both.  Deterministic under the seed.  Running out of steps yields
    status "inconclusive" with the best partial chain: a failure of the
    bounded search, never a refutation of connectivity.
    """
    sig = signature(lat)
    if sig.n_plus != 3:
        raise InputError(f"path search needs signature (3, k); got {sig.as_tuple()}")
    for endpoint in (p, p2):
        if not in_period_domain(lat, endpoint):
            raise InputError("both endpoints must lie in the period domain")
    partial: list[ChainLink] = []
    for restart in range(restarts):
        rng = random.Random(7919 * seed + restart)
        closing = _connect_pair(lat, p, p2, rng, max_steps)
        if closing is not None:
            return TwistorPathResult(status="success", chain=tuple(closing), seed=seed)
        walk: list[ChainLink] = []
        cur = p
        while len(walk) < max_steps - 4:
            move = _random_move(lat, cur, p2, rng)
            if move is None:
                break
            walk.append(move)
            cur = move.point
            closing = _connect_pair(lat, cur, p2, rng, max_steps - len(walk))
            if closing is not None:
                return TwistorPathResult(
                    status="success", chain=tuple(walk + closing), seed=seed
                )
        if restart == 0:
            partial = list(walk)
    return TwistorPathResult(
        status="inconclusive",
        chain=tuple(partial),
        seed=seed,
        note=f"no chain within {max_steps} conics; partial chain reported",
    )


# --- independent chain verification ------------------------------------------------

def _span_residual_float(basis, vec) -> float:
    """Euclidean least-squares relative residual of vec against span(basis)."""
    cols = [[float(c) for c in v] for v in basis]
    target = [float(c) for c in vec]
    k = len(cols)
    gram = [[sum(cols[i][m] * cols[j][m] for m in range(len(target))) for j in range(k)]
            for i in range(k)]
    rhs = [sum(cols[i][m] * target[m] for m in range(len(target))) for i in range(k)]
    # solve the k x k normal equations by Gaussian elimination
    a = [row[:] + [rhs[i]] for i, row in enumerate(gram)]
    for col in range(k):
        piv = max(range(col, k), key=lambda r_: abs(a[r_][col]))
        if abs(a[piv][col]) < 1e-300:
            return float("inf")
        a[col], a[piv] = a[piv], a[col]
        for r_ in range(k):
            if r_ != col and a[r_][col] != 0.0:
                f = a[r_][col] / a[col][col]
                for cc in range(col, k + 1):
                    a[r_][cc] -= f * a[col][cc]
    coeffs = [a[i][k] / a[i][i] for i in range(k)]
    resid = [
        target[m] - sum(coeffs[i] * cols[i][m] for i in range(k))
        for m in range(len(target))
    ]
    scale = max(math.sqrt(sum(t * t for t in target)), 1.0)
    return math.sqrt(sum(r * r for r in resid)) / scale


def _point_in_plane(plane: PositiveThreePlane, pt: PeriodPoint, tol: float) -> bool:
    for vec in (pt.re, pt.im):
        if solve_in_span([list(b) for b in plane.basis], list(vec)) is None:
            if _span_residual_float(plane.basis, vec) > tol:
                return False
    return True


@dataclass(frozen=True)
class ChainVerification:
    ok: bool
    max_membership_residual: float
    failures: tuple[str, ...]


def verify_twistor_chain(
    lat: IntegralLattice,
    p: PeriodPoint,
    p2: PeriodPoint,
    chain,
    tol: float = CONIC_RESIDUAL_TOL,
) -> ChainVerification:
    """Re-check a reported chain from primitive operations only.

    Verifies: every plane is positive definite (exact minors); every
    incidence point lies in the domain (within tol) and inside its plane's
    span; consecutive conics share the reported intermediate point; the
    chain starts at p and ends at p2.  Shares no state with the search.
    """
    failures = []
    worst = 0.0

    def check_point(label, plane, pt):
        nonlocal worst
        res = membership_residual(lat, pt)
        worst = max(worst, res)
        qx, qy, _ = membership_data(lat, pt)
        if qx + qy <= 0:
            failures.append(f"{label}: not positive")
        if res > tol:
            failures.append(f"{label}: membership residual {res:.3e}")
        if not _point_in_plane(plane, pt, tol):
            failures.append(f"{label}: not inside its conic plane")

    links = list(chain)
    if not links:
        if not projectively_equal(p, p2):
            failures.append("empty chain but endpoints differ")
        if not in_period_domain(lat, p):
            failures.append("start point not in domain")
        return ChainVerification(not failures, worst, tuple(failures))
    entry = p
    for i, link in enumerate(links):
        try:
            positive_three_plane(lat, link.plane.basis)
        except InputError as exc:
            failures.append(f"plane {i}: {exc}")
            continue
        check_point(f"link {i} entry", link.plane, entry)
        check_point(f"link {i} exit", link.plane, link.point)
        entry = link.point
    if not projectively_equal(entry, p2):
        failures.append("chain does not end at the target point")
    return ChainVerification(not failures, worst, tuple(failures))


# --- seeded generation of exact domain points --------------------------------------

def _base_domain_pair(lat: IntegralLattice):
    """A pair (x, y) with q(x) = q(y) > 0 and b(x, y) = 0 among small vectors."""
    basis = [tuple(Fraction(int(i == k)) for k in range(lat.rank)) for i in range(lat.rank)]
    candidates = list(basis)
    for i in range(lat.rank):
        for j in range(i + 1, lat.rank):
            candidates.append(tuple(a + b for a, b in zip(basis[i], basis[j])))
    positives = [(v, bilinear_q(lat, v, v)) for v in candidates]
    positives = [(v, q) for v, q in positives if q > 0]
    for i in range(len(positives)):
        for j in range(i + 1, len(positives)):
            v, qv = positives[i]
            w, qw = positives[j]
            if qv == qw and bilinear_q(lat, v, w) == 0:
                return v, w
    raise InputError("no small exact domain pair found for this lattice")


def random_domain_point(lat: IntegralLattice, seed: int = 0, moves: int = 4) -> PeriodPoint:
    """Exact rational domain point: a small base pair pushed around by a
    random rational isometry (a Cayley transform of a form-antisymmetric map)."""
    x, y = _base_domain_pair(lat)
    rng = random.Random(seed)
    r = lat.rank
    gram = [[Fraction(e) for e in row] for row in lat.gram]
    # invert the Gram matrix once, exactly
    aug = [row[:] + [Fraction(int(i == j)) for j in range(r)] for i, row in enumerate(gram)]
    red, pivots = rref(aug)
    if pivots != list(range(r)):
        raise InputError("random_domain_point needs a nondegenerate lattice")
    ginv = [row[r:] for row in red]
    for _ in range(200):
        a = [[Fraction(0)] * r for _ in range(r)]
        for _ in range(moves):
            i, j = rng.sample(range(r), 2)
            c = Fraction(rng.randint(-2, 2))
            a[i][j] += c
            a[j][i] -= c
        s = [[sum(ginv[i][k] * a[k][j] for k in range(r)) for j in range(r)] for i in range(r)]
        i_plus = [[Fraction(int(i == j)) + s[i][j] for j in range(r)] for i in range(r)]
        i_minus = [[Fraction(int(i == j)) - s[i][j] for j in range(r)] for i in range(r)]
        aug2 = [rp + rm for rp, rm in zip(i_plus, i_minus)]
        red2, piv2 = rref(aug2)
        if piv2 != list(range(r)):
            continue  # I + S singular; resample
        # Cayley transform (I+S)^{-1}(I-S) = (I-S)(I+S)^{-1}: an exact isometry
        m = [row[r:] for row in red2]
        mx = tuple(sum(m[k][i] * x[i] for i in range(r)) for k in range(r))
        my = tuple(sum(m[k][i] * y[i] for i in range(r)) for k in range(r))
        pt = PeriodPoint(mx, my)
        if in_period_domain(lat, pt):
            return pt
    raise InputError("failed to generate a random domain point")


def path_report_json(lat: IntegralLattice, p: PeriodPoint, p2: PeriodPoint,
                     result: TwistorPathResult) -> dict:
    check = verify_twistor_chain(lat, p, p2, result.chain) if result.status == "success" \
        else None
    out = result.to_json_dict()
    out["verification"] = None if check is None else {
        "ok": check.ok,
        "max_membership_residual": repr(check.max_membership_residual),
        "failures": list(check.failures),
    }
    return out
