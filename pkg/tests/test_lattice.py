import random
from fractions import Fraction

import pytest

from hkgeom import lattice as lt
from hkgeom.errors import InputError
from hkgeom.exactlinalg import inertia


def diag(*entries):
    n = len(entries)
    return lt.make_lattice(
        [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)],
        nondegenerate=all(e != 0 for e in entries),
    )


U = lt.hyperbolic_plane()


class TestEvaluate:
    def test_hyperbolic_off_diagonal(self):
        assert lt.evaluate(U, (1, 0), (0, 1)) == 1

    def test_isotropic_basis_vector(self):
        assert lt.evaluate(U, (1, 0), (1, 0)) == 0

    def test_lorentz_vector(self):
        # direct matrix arithmetic: 1 + 1 + 1 - 1
        L = diag(1, 1, 1, -1)
        assert lt.evaluate(L, (1, 1, 1, 1), (1, 1, 1, 1)) == 2

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InputError):
            lt.evaluate(U, (1, 0, 0), (0, 1))

    def test_bilinear_symmetric_random(self):
        rng = random.Random(11)
        L = lt.make_lattice([[2, 1, 0], [1, -2, 3], [0, 3, 4]])
        for _ in range(50):
            u, v, w = (tuple(rng.randint(-9, 9) for _ in range(3)) for _ in range(3))
            assert lt.evaluate(L, v, w) == lt.evaluate(L, w, v)
            uv = tuple(a + b for a, b in zip(u, v))
            assert lt.evaluate(L, uv, w) == lt.evaluate(L, u, w) + lt.evaluate(L, v, w)


class TestSignature:
    def test_diagonal(self):
        assert lt.signature(diag(1, 1, 1, -1)).as_tuple() == (3, 1, 0)

    def test_hyperbolic_plane_vs_char_poly_oracle(self):
        # characteristic polynomial of [[0,1],[1,0]] is t^2 - 1: eigenvalues +-1
        assert lt.signature(U).as_tuple() == (1, 1, 0)

    def test_k3(self):
        assert lt.signature(lt.k3_lattice()).as_tuple() == (3, 19, 0)

    def test_degenerate_counted(self):
        L = lt.make_lattice([[1, 0], [0, 0]], nondegenerate=False)
        assert lt.signature(L).as_tuple() == (1, 0, 1)

    def test_unimodular_congruence_invariance(self):
        # signature(P^T G P) = signature(G) for products of elementary integer ops
        rng = random.Random(5)
        G = [[2, 1, 0, -1], [1, -3, 2, 0], [0, 2, 0, 5], [-1, 0, 5, 1]]
        base = inertia(G)
        for _ in range(20):
            P = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
            for _ in range(6):
                i, j = rng.sample(range(4), 2)
                c = rng.choice([-2, -1, 1, 2])
                for k in range(4):
                    P[i][k] += c * P[j][k]
            # P^T G P, computed directly
            PG = [[sum(P[k][i] * G[k][l] for k in range(4)) for l in range(4)] for i in range(4)]
            PGP = [[sum(PG[i][k] * P[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
            assert inertia(PGP) == base

    def test_direct_sum_additivity(self):
        rng = random.Random(7)
        for _ in range(10):
            a = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]
            for i in range(3):
                for j in range(i):
                    a[i][j] = a[j][i]
            A = lt.make_lattice(a, nondegenerate=False)
            B = diag(rng.choice([1, -1, 2]), rng.choice([1, -1, -3]))
            sa, sb = lt.signature(A), lt.signature(B)
            ss = lt.signature(lt.direct_sum(A, B))
            assert ss.as_tuple() == (
                sa.n_plus + sb.n_plus,
                sa.n_minus + sb.n_minus,
                sa.n_zero + sb.n_zero,
            )


class TestConstructions:
    def test_direct_sum_rank(self):
        assert lt.direct_sum(U, U).rank == 4

    def test_rescale(self):
        assert lt.rescale(diag(1), -2).gram == ((-2,),)

    def test_rescale_zero_rejected(self):
        with pytest.raises(InputError):
            lt.rescale(U, 0)

    def test_rescale_scales_evaluate(self):
        rng = random.Random(3)
        L = lt.make_lattice([[2, -1], [-1, 4]])
        for m in (-3, 2, 5):
            Lm = lt.rescale(L, m)
            for _ in range(10):
                v = (rng.randint(-5, 5), rng.randint(-5, 5))
                w = (rng.randint(-5, 5), rng.randint(-5, 5))
                assert lt.evaluate(Lm, v, w) == m * lt.evaluate(L, v, w)

    def test_sum_with_negative_two(self):
        assert lt.signature(lt.direct_sum(U, diag(-2))).as_tuple() == (1, 2, 0)

    def test_standard_u(self):
        L = lt.standard_lattice("U")
        assert L.rank == 2 and lt.lattice_determinant(L) == -1

    def test_standard_e8_minus_even(self):
        L = lt.standard_lattice("E8_minus")
        assert all(L.gram[i][i] % 2 == 0 for i in range(8))
        assert lt.signature(L).as_tuple() == (0, 8, 0)
        assert lt.lattice_determinant(L) == 1

    def test_standard_k3(self):
        L = lt.standard_lattice("K3")
        assert L.rank == 22
        assert lt.signature(L).as_tuple() == (3, 19, 0)

    def test_unknown_standard_rejected(self):
        with pytest.raises(InputError):
            lt.standard_lattice("Leech")

    def test_extend_by_rank_one(self):
        assert lt.extend_by_rank_one(U, -2).rank == 3
        assert lt.signature(lt.extend_by_rank_one(diag(1), -4)).as_tuple() == (1, 1, 0)
        for s in (-2, 2, 6):
            assert lt.extend_by_rank_one(lt.k3_lattice(), s).rank == 23

    def test_extend_zero_square_degenerate(self):
        L = lt.extend_by_rank_one(U, 0)
        assert not L.nondegenerate
        assert lt.signature(L).as_tuple() == (1, 1, 1)


class TestValidation:
    def test_asymmetric_rejected(self):
        with pytest.raises(InputError):
            lt.make_lattice([[0, 1], [2, 0]])

    def test_nondegenerate_declaration_enforced(self):
        with pytest.raises(InputError):
            lt.make_lattice([[1, 0], [0, 0]])
        lt.make_lattice([[1, 0], [0, 0]], nondegenerate=False)

    def test_rank_consistency(self):
        with pytest.raises(InputError):
            lt.IntegralLattice(gram=((0, 1), (1, 0)), rank=3)


class TestJson:
    def test_round_trip(self):
        k3 = lt.k3_lattice()
        again = lt.load_json(lt.dump_json(k3))
        assert again.gram == k3.gram

    def test_rank_mismatch_rejected(self):
        with pytest.raises(InputError):
            lt.from_json_dict({"rank": 5, "gram": [[0, 1], [1, 0]]})

    def test_bilinear_q_fractions(self):
        v = (Fraction(1, 2), Fraction(1, 2))
        assert lt.bilinear_q(U, v, v) == Fraction(1, 2)
