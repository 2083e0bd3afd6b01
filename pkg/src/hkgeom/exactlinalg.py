"""Exact dense linear algebra over Fraction.

Small-matrix routines (Gaussian elimination, kernels, inertia of symmetric
forms) used wherever a sign or an equality must be decided exactly.  All
matrices are lists of lists of Fraction; no floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from .ratmath import to_fraction


def frac_matrix(rows) -> list[list[Fraction]]:
    return [[to_fraction(x) for x in row] for row in rows]


def mat_vec(m, v):
    return tuple(sum((m[i][j] * v[j] for j in range(len(v))), Fraction(0)) for i in range(len(m)))


def vec_dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def bilinear(gram, u, v) -> Fraction:
    """u^T * gram * v with exact arithmetic."""
    return vec_dot(u, mat_vec(gram, v))


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v):
    c = to_fraction(c)
    return tuple(c * a for a in v)


def determinant(m) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    a = [row[:] for row in frac_matrix(m)]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        pivot = next((i for i in range(k, n) if a[i][k] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] * inv
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    return det


def rref(m):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    a = [row[:] for row in frac_matrix(m)]
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def matrix_rank(m) -> int:
    return len(rref(m)[1])


def solve_in_span(vectors, target):
    """Exact coefficients c with sum(c_i * vectors[i]) == target, or None."""
    if not vectors:
        return None if any(t != 0 for t in target) else []
    ncols = len(vectors)
    nrows = len(target)
    aug = [[to_fraction(vectors[j][i]) for j in range(ncols)] + [to_fraction(target[i])]
           for i in range(nrows)]
    red, pivots = rref(aug)
    if ncols in pivots:  # pivot in the augmented column: inconsistent
        return None
    coeffs = [Fraction(0)] * ncols
    for row, col in zip(red, pivots):
        coeffs[col] = row[ncols]
    # verify (free variables set to zero must still reproduce target exactly)
    for i in range(nrows):
        if sum((coeffs[j] * to_fraction(vectors[j][i]) for j in range(ncols)), Fraction(0)) \
                != to_fraction(target[i]):
            return None
    return coeffs


def kernel_basis(m):
    """Exact basis of the right nullspace of m (list of tuple vectors)."""
    a = frac_matrix(m)
    if not a:
        return []
    ncols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, col in zip(red, pivots):
            v[col] = -row[f]
        basis.append(tuple(v))
    return basis


def leading_principal_minors(gram) -> list[Fraction]:
    g = frac_matrix(gram)
    return [determinant([row[: k + 1] for row in g[: k + 1]]) for k in range(len(g))]


def is_positive_definite(gram) -> bool:
    return all(m > 0 for m in leading_principal_minors(gram))


def inertia(gram) -> tuple[int, int, int]:
    """Sylvester inertia (n_plus, n_minus, n_zero) of a symmetric matrix.

    Symmetric Gaussian congruence with exact pivoting.  A zero diagonal
    with a nonzero off-diagonal entry is handled by the hyperbolic 2x2
    split, which contributes (1, 1).
    """
    a = [row[:] for row in frac_matrix(gram)]
    n = len(a)
    for i in range(n):
        if len(a[i]) != n:
            raise ValueError("inertia needs a square matrix")
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise ValueError("inertia needs a symmetric matrix")
    n_plus = n_minus = n_zero = 0

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]

    def clear_with_pivot(k):
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] * inv
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
            for j in range(k, n):
                a[j][i] -= f * a[j][k]

    k = 0
    while k < n:
        pivot = next((i for i in range(k, n) if a[i][i] != 0), None)
        if pivot is not None:
            if pivot != k:
                swap(k, pivot)
            clear_with_pivot(k)
            if a[k][k] > 0:
                n_plus += 1
            else:
                n_minus += 1
            k += 1
            continue
        # all remaining diagonal entries are zero
        off = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
        if off is None:
            n_zero += n - k
            break
        i, j = off
        if i != k:
            swap(k, i)
            j = next(jj for jj in range(k + 1, n) if a[k][jj] != 0)
        if j != k + 1:
            swap(k + 1, j)
        # hyperbolic block [[0, c], [c, 0]] as a 2x2 pivot: inertia (1, 1)
        c = a[k][k + 1]
        inv = 1 / c
        for m_ in range(k + 2, n):
            f1 = a[m_][k + 1] * inv  # coefficient on row k
            f2 = a[m_][k] * inv      # coefficient on row k+1
            for col in range(k, n):
                a[m_][col] -= f1 * a[k][col] + f2 * a[k + 1][col]
            for row in range(k, n):
                a[row][m_] -= f1 * a[row][k] + f2 * a[row][k + 1]
        n_plus += 1
        n_minus += 1
        k += 2
    return n_plus, n_minus, n_zero
