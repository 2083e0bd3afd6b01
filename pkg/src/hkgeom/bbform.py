"""Quadratic-form side of topologically constrained intersection theory.

The core object couples a rational symmetric form q on a rank-r space with a
positive constant c and a half-dimension n, under the diagonal relation

    top_intersection(a) = c * q(a)^n.

Its polarization is defined as the matching sum over pairings of the 2n
argument slots, divided by (2n-1)!!: the unique symmetric multilinear form
with that diagonal.  Everything is exact rational arithmetic; square roots
appear only in form recovery and are taken exactly when the radicand is a
perfect rational square, with an explicit flagged floating fallback.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InconsistencyError, InputError
from .exactlinalg import bilinear, frac_matrix
from .ratmath import ComplexRational, format_fraction, sqrt_exact, to_fraction

FLOAT_FALLBACK_TOL = 1e-12


def _check_symmetric(q):
    r = len(q)
    for row in q:
        if len(row) != r:
            raise InputError("form matrix must be square")
    for i in range(r):
        for j in range(i):
            if q[i][j] != q[j][i]:
                raise InputError(f"form matrix not symmetric at ({i},{j})")


@dataclass(frozen=True)
class FujikiData:
    """Half-dimension n, constant c > 0, and the rational symmetric form q.

    The diagonal constant and its positive real n-th root are derived data;
    the root is kept as the exact pair (c, n) and only made a float on
    request via root_numeric().
    """

    n: int
    c: Fraction
    q: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InputError("half-dimension n must be >= 1")
        c = to_fraction(self.c)
        if c <= 0:
            raise InputError("Fujiki constant must be positive")
        object.__setattr__(self, "c", c)
        q = tuple(tuple(to_fraction(x) for x in row) for row in self.q)
        _check_symmetric(q)
        object.__setattr__(self, "q", q)

    @property
    def rank(self) -> int:
        return len(self.q)

    @property
    def diagonal_constant(self) -> Fraction:
        return self.c

    def root_pair(self) -> tuple[Fraction, int]:
        return (self.c, self.n)

    def root_numeric(self) -> float:
        """Positive real n-th root of the diagonal constant, as a float."""
        return float(self.c) ** (1.0 / self.n)

    def form(self, u, v) -> Fraction:
        u = [to_fraction(x) for x in u]
        v = [to_fraction(x) for x in v]
        if len(u) != self.rank or len(v) != self.rank:
            raise InputError("vector length does not match form rank")
        return bilinear(self.q, u, v)


def fujiki_data(n, c, q) -> FujikiData:
    return FujikiData(n=int(n), c=to_fraction(c), q=tuple(tuple(row) for row in q))


@dataclass(frozen=True)
class HodgeDecomposedClass:
    """A degree-2 class split as lam*(2,0) + beta + mu*(0,2) in a normalized model.

    beta lives in a rational (1,1) model carrying the symmetric pairing q11;
    the model assumes unit normalization of the top pairing of the two pure
    pieces, recorded in the ``normalized`` flag.
    """

    lam: ComplexRational
    mu: ComplexRational
    beta: tuple[Fraction, ...]
    q11: tuple[tuple[Fraction, ...], ...]
    normalized: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lam", ComplexRational.of(self.lam))
        object.__setattr__(self, "mu", ComplexRational.of(self.mu))
        object.__setattr__(self, "beta", tuple(to_fraction(x) for x in self.beta))
        q11 = tuple(tuple(to_fraction(x) for x in row) for row in self.q11)
        _check_symmetric(q11)
        object.__setattr__(self, "q11", q11)
        if len(self.beta) != len(q11):
            raise InputError("beta dimension does not match the (1,1) pairing")


def bb_eval(alpha: HodgeDecomposedClass, n: int):
    """lam*mu + (n/2) * q11(beta, beta) under the normalized model.

    Returns a Fraction when the value is real, else an exact ComplexRational.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    if not alpha.normalized:
        raise InputError("bb_eval requires the normalized model flag")
    quad = bilinear(alpha.q11, list(alpha.beta), list(alpha.beta))
    value = alpha.lam * alpha.mu + ComplexRational.of(Fraction(n, 2) * quad)
    return value.re if value.is_real() else value


# --- diagonal and polarized Fujiki values ------------------------------------

def fujiki_top(fd: FujikiData, alpha) -> Fraction:
    """c * q(alpha)^n: the diagonal top self-intersection value."""
    return fd.c * fd.form(alpha, alpha) ** fd.n


def _matchings(indices):
    """All perfect matchings of an even-length index tuple."""
    if not indices:
        yield ()
        return
    first, rest = indices[0], indices[1:]
    for k in range(len(rest)):
        pair = (first, rest[k])
        remaining = rest[:k] + rest[k + 1:]
        for sub in _matchings(remaining):
            yield (pair,) + sub


def double_factorial_odd(n: int) -> int:
    """(2n-1)!! = number of perfect matchings of 2n slots."""
    out = 1
    for k in range(1, 2 * n, 2):
        out *= k
    return out


def fujiki_polarized(fd: FujikiData, alphas) -> Fraction:
    """Symmetric multilinear extension of fujiki_top.

    Value: c / (2n-1)!! * sum over perfect matchings of the 2n slots of the
    product of pairwise form values.  Diagonal specialization reproduces
    fujiki_top exactly.
    """
    alphas = [tuple(to_fraction(x) for x in a) for a in alphas]
    if len(alphas) != 2 * fd.n:
        raise InputError(f"need exactly {2 * fd.n} argument vectors, got {len(alphas)}")
    pair_values: dict[tuple[int, int], Fraction] = {}
    m = len(alphas)
    for i in range(m):
        for j in range(i, m):
            pair_values[(i, j)] = fd.form(alphas[i], alphas[j])
    total = Fraction(0)
    for matching in _matchings(tuple(range(m))):
        prod = Fraction(1)
        for i, j in matching:
            prod *= pair_values[(i, j) if i <= j else (j, i)]
        total += prod
    return fd.c * total / double_factorial_odd(fd.n)


def isotropic_power_vanishing(fd: FujikiData, beta, fillers, copies: int) -> Fraction:
    """Polarized value with ``copies`` repeats of an isotropic class.

    Contract: with at least n+1 copies among the 2n slots, every matching
    contains a self-pairing of beta and the value is exactly 0.
    """
    beta = tuple(to_fraction(x) for x in beta)
    if fd.form(beta, beta) != 0:
        raise InputError("beta must be isotropic: q(beta) = 0")
    slots = [beta] * copies + [tuple(to_fraction(x) for x in f) for f in fillers]
    if len(slots) != 2 * fd.n:
        raise InputError(f"copies + fillers must fill exactly {2 * fd.n} slots")
    value = fujiki_polarized(fd, slots)
    if copies >= fd.n + 1 and value != 0:
        raise InconsistencyError(
            f"isotropic power with {copies} copies must vanish, got {value}"
        )
    return value


# --- divisor-pair expansions -------------------------------------------------

@dataclass(frozen=True)
class DivisorPairData:
    """Form data (q(E), q(A), q(E,A)) for a divisor pair, with n and c.

    Degenerate values are allowed; they are the interesting cases.
    """

    qE: Fraction
    qA: Fraction
    qEA: Fraction
    n: int
    c: Fraction

    def __post_init__(self):
        if self.n < 1:
            raise InputError("n must be >= 1")
        c = to_fraction(self.c)
        if c <= 0:
            raise InputError("constant c must be positive")
        object.__setattr__(self, "c", c)
        for name in ("qE", "qA", "qEA"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))


def matsushita_expand(d: DivisorPairData) -> tuple[Fraction, ...]:
    """Intersection numbers E^m A^(2n-m) for m = 0..2n.

    Obtained from the t-expansion of c*(t^2 qE + 2t qEA + qA)^n: the t^m
    coefficient equals C(2n, m) * E^m A^(2n-m).
    """
    # coefficients of (qE t^2 + 2 qEA t + qA)^n by repeated convolution
    poly = [Fraction(1)]
    base = [d.qA, 2 * d.qEA, d.qE]
    for _ in range(d.n):
        new = [Fraction(0)] * (len(poly) + 2)
        for i, a in enumerate(poly):
            if a == 0:
                continue
            for j, b in enumerate(base):
                new[i + j] += a * b
        poly = new
    return tuple(d.c * poly[m] / math.comb(2 * d.n, m) for m in range(2 * d.n + 1))


@dataclass(frozen=True)
class TrivialityVerdict:
    is_numerically_trivial: bool
    qE: Fraction
    qEA: Fraction


def numerically_trivial_test(d: DivisorPairData, topE, mixed) -> TrivialityVerdict:
    """Check whether top and mixed intersection data force q(E)=0 and q(E,A)=0.

    topE models the full self-intersection E^(2n) = c*qE^n; mixed models
    E.A^(2n-1) = c*qEA*qA^(n-1).  Inputs inconsistent with d are an error.
    """
    topE = to_fraction(topE)
    mixed = to_fraction(mixed)
    expected_top = d.c * d.qE ** d.n
    if topE != expected_top:
        raise InconsistencyError(
            f"topE={topE} inconsistent with c*qE^n={expected_top}"
        )
    expected_mixed = d.c * d.qEA * d.qA ** (d.n - 1)
    if mixed != expected_mixed:
        raise InconsistencyError(
            f"mixed={mixed} inconsistent with c*qEA*qA^(n-1)={expected_mixed}"
        )
    return TrivialityVerdict(d.qE == 0 and d.qEA == 0, d.qE, d.qEA)


# --- recovery of the form from top-intersection data --------------------------

@dataclass(frozen=True)
class RecoveredForm:
    q: tuple[tuple[Fraction, ...], ...]
    sign_flipped: bool
    exact: bool
    note: str = ""


def fujiki_table(fd: FujikiData):
    """Full 2n-linear table of polarized values on the standard basis.

    n=1: nested 2-deep list; n=2: nested 4-deep list.  Used as the forward
    route when exercising bb_recover.
    """
    r = fd.rank
    basis = [tuple(Fraction(int(i == k)) for k in range(r)) for i in range(r)]
    if fd.n == 1:
        return [[fujiki_polarized(fd, (basis[i], basis[j])) for j in range(r)] for i in range(r)]
    if fd.n == 2:
        return [[[[fujiki_polarized(fd, (basis[i], basis[j], basis[k], basis[l]))
                   for l in range(r)] for k in range(r)] for j in range(r)] for i in range(r)]
    raise InputError("fujiki_table supports n in {1, 2}")


def _table_rank(table, n):
    t = table
    for _ in range(2 * n):
        if not isinstance(t, (list, tuple)):
            raise InputError(f"table must be nested {2 * n} levels deep")
        t = t[0]
    return len(table)


def _t4(table, i, j, k, l):
    return to_fraction(table[i][j][k][l])


def _t4_vec(table, r, a, b, c_, d_):
    """Multilinear evaluation of the 4-table on rational vectors."""
    total = Fraction(0)
    for i in range(r):
        if a[i] == 0:
            continue
        for j in range(r):
            if b[j] == 0:
                continue
            for k in range(r):
                if c_[k] == 0:
                    continue
                for l in range(r):
                    if d_[l] == 0:
                        continue
                    total += a[i] * b[j] * c_[k] * d_[l] * _t4(table, i, j, k, l)
    return total


def bb_recover(n: int, c, table, reference, allow_float: bool = True) -> RecoveredForm:
    """Invert the polarized diagonal relation at desk scale, n in {1, 2}.

    n=1: q = table / c directly.  n=2: a pivot vector u with nonzero square
    is located, q(u) is extracted by one square root (exact when the
    radicand is a perfect rational square, else a flagged float fallback),
    and every remaining entry follows linearly.  The global sign is fixed
    so that q(reference) > 0; the full table is re-verified against the
    recovered form and any residual is an inconsistency error.
    """
    c = to_fraction(c)
    if c <= 0:
        raise InputError("constant c must be positive")
    if n == 1:
        r = _table_rank(table, 1)
        q = [[to_fraction(table[i][j]) / c for j in range(r)] for i in range(r)]
        for i in range(r):
            for j in range(i):
                if q[i][j] != q[j][i]:
                    raise InconsistencyError("bilinear table is not symmetric")
        ref = [to_fraction(x) for x in reference]
        if bilinear(q, ref, ref) == 0:
            raise InputError("reference vector must have nonzero square")
        return RecoveredForm(tuple(tuple(row) for row in q), sign_flipped=False, exact=True)
    if n != 2:
        raise InputError("bb_recover is implemented for n in {1, 2} only")

    r = _table_rank(table, 2)
    # symmetry validation of the supplied table
    import itertools
    for idx in itertools.combinations_with_replacement(range(r), 4):
        vals = {_t4(table, *perm) for perm in itertools.permutations(idx)}
        if len(vals) != 1:
            raise InconsistencyError(f"4-linear table not symmetric at indices {idx}")

    basis = [tuple(Fraction(int(i == k)) for k in range(r)) for i in range(r)]
    candidates = list(basis)
    for i in range(r):
        for j in range(i + 1, r):
            candidates.append(tuple(a + b for a, b in zip(basis[i], basis[j])))
            candidates.append(tuple(a - b for a, b in zip(basis[i], basis[j])))
    pivot = next((u for u in candidates if _t4_vec(table, r, u, u, u, u) != 0), None)
    if pivot is None:
        raise InconsistencyError("table vanishes on all pivot candidates; form is zero")

    radicand = _t4_vec(table, r, pivot, pivot, pivot, pivot) / c
    qu = sqrt_exact(radicand)
    exact = qu is not None
    if not exact:
        if not allow_float:
            raise InputError(
                f"q(pivot)^2 = {radicand} is not a perfect rational square; "
                "float fallback disabled"
            )
        qu = Fraction(math.sqrt(float(radicand)))  # dyadic; flagged below
    # bilinear values against the pivot, then the full matrix, all linear in T
    w = [_t4_vec(table, r, pivot, pivot, pivot, basis[i]) / (c * qu) for i in range(r)]
    q = [[(3 * _t4_vec(table, r, pivot, pivot, basis[i], basis[j]) / c - 2 * w[i] * w[j]) / qu
          for j in range(r)] for i in range(r)]

    ref = [to_fraction(x) for x in reference]
    qref = bilinear(q, ref, ref)
    if qref == 0:
        raise InputError("reference vector must have nonzero square")
    flipped = qref < 0
    if flipped:
        q = [[-x for x in row] for row in q]

    # residual check: forward-polarize the recovered form over the whole table
    fd = FujikiData(n=2, c=c, q=tuple(tuple(row) for row in q))
    worst = 0.0
    for idx in itertools.combinations_with_replacement(range(r), 4):
        want = _t4(table, *idx)
        got = fujiki_polarized(fd, tuple(basis[i] for i in idx))
        if exact:
            if got != want:
                raise InconsistencyError(
                    f"table entry {idx} = {want} not reproduced by recovered form ({got})"
                )
        else:
            scale = max(abs(float(want)), 1.0)
            worst = max(worst, abs(float(got - want)) / scale)
    if not exact and worst > FLOAT_FALLBACK_TOL:
        raise InconsistencyError(
            f"float-fallback residual {worst:.3e} exceeds {FLOAT_FALLBACK_TOL}"
        )
    note = "" if exact else "float fallback: pivot square root was irrational"
    return RecoveredForm(tuple(tuple(row) for row in q), sign_flipped=flipped,
                         exact=exact, note=note)


# --- JSON interchange ----------------------------------------------------------

def fujiki_to_json_dict(fd: FujikiData) -> dict:
    return {
        "n": fd.n,
        "c": format_fraction(fd.c),
        "gram": [[format_fraction(x) for x in row] for row in fd.q],
    }


def fujiki_from_json_dict(data: dict) -> FujikiData:
    try:
        return FujikiData(
            n=int(data["n"]),
            c=to_fraction(data["c"]),
            q=tuple(tuple(to_fraction(x) for x in row) for row in data["gram"]),
        )
    except (TypeError, KeyError) as exc:
        raise InputError(f"bad Fujiki JSON: {exc}") from None


def fujiki_dump_json(fd: FujikiData) -> str:
    return json.dumps(fujiki_to_json_dict(fd), sort_keys=True)


def fujiki_load_json(text: str) -> FujikiData:
    return fujiki_from_json_dict(json.loads(text))
