import itertools
import random
from fractions import Fraction

import pytest

from hkgeom import bbform as bb
from hkgeom.errors import InconsistencyError, InputError
from hkgeom.exactlinalg import determinant
from hkgeom.ratmath import ComplexRational

U_FORM = ((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0)))


def rand_frac(rng, lo=-9, hi=9, den=9):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def rand_vec(rng, r):
    return tuple(rand_frac(rng) for _ in range(r))


def diag_form(*entries):
    n = len(entries)
    return tuple(
        tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


class TestBBEval:
    def test_pure_20_class_is_isotropic(self):
        a = bb.HodgeDecomposedClass(lam=1, mu=0, beta=(0,), q11=((1,),))
        for n in (1, 2, 3):
            assert bb.bb_eval(a, n) == 0

    def test_sum_with_conjugate_is_one(self):
        a = bb.HodgeDecomposedClass(lam=1, mu=1, beta=(0,), q11=((1,),))
        for n in (1, 2, 5):
            assert bb.bb_eval(a, n) == 1

    def test_pure_11_part(self):
        a = bb.HodgeDecomposedClass(lam=0, mu=0, beta=(1,), q11=((3,),))
        assert bb.bb_eval(a, 2) == 3  # (2/2) * 3

    def test_complex_scalars(self):
        a = bb.HodgeDecomposedClass(lam=(0, 1), mu=(0, 1), beta=(0,), q11=((1,),))
        assert bb.bb_eval(a, 1) == Fraction(-1)
        b = bb.HodgeDecomposedClass(lam=(1, 1), mu=1, beta=(0,), q11=((1,),))
        assert bb.bb_eval(b, 1) == ComplexRational(Fraction(1), Fraction(1))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InputError):
            bb.HodgeDecomposedClass(lam=1, mu=1, beta=(1, 0), q11=((1,),))

    def test_unnormalized_model_rejected(self):
        a = bb.HodgeDecomposedClass(lam=1, mu=1, beta=(0,), q11=((1,),), normalized=False)
        with pytest.raises(InputError):
            bb.bb_eval(a, 1)


class TestFujikiTop:
    def test_intersection_form_case(self):
        fd = bb.fujiki_data(1, 1, U_FORM)
        assert bb.fujiki_top(fd, (1, 1)) == 2

    def test_n2(self):
        fd = bb.fujiki_data(2, 3, diag_form(2))
        assert bb.fujiki_top(fd, (1,)) == 12  # 3 * 2^2

    def test_zero_vector(self):
        fd = bb.fujiki_data(2, 3, diag_form(2, -2))
        assert bb.fujiki_top(fd, (0, 0)) == 0


class TestFujikiPolarized:
    def test_diagonal_calibration_random(self):
        rng = random.Random(2)
        for n in (1, 2, 3):
            q = diag_form(*[rng.choice([1, -1, 2, -3]) for _ in range(3)])
            fd = bb.fujiki_data(n, Fraction(rng.randint(1, 5), rng.randint(1, 3)), q)
            for _ in range(30):
                a = rand_vec(rng, 3)
                assert bb.fujiki_polarized(fd, [a] * (2 * n)) == bb.fujiki_top(fd, a)

    def test_n1_single_matching(self):
        fd = bb.fujiki_data(1, Fraction(5, 2), U_FORM)
        a, b = (1, 2), (3, -1)
        assert bb.fujiki_polarized(fd, (a, b)) == fd.c * fd.form(a, b)

    def test_n2_hand_enumerated_matchings(self):
        # independent oracle: the three matchings of {0,1,2,3} written out
        rng = random.Random(9)
        fd = bb.fujiki_data(2, 3, ((Fraction(2), Fraction(1)), (Fraction(1), Fraction(-2))))
        for _ in range(20):
            vs = [rand_vec(rng, 2) for _ in range(4)]
            q = fd.form
            oracle = (
                q(vs[0], vs[1]) * q(vs[2], vs[3])
                + q(vs[0], vs[2]) * q(vs[1], vs[3])
                + q(vs[0], vs[3]) * q(vs[1], vs[2])
            ) * fd.c / 3
            assert bb.fujiki_polarized(fd, vs) == oracle

    def test_n2_pair_specialization(self):
        fd = bb.fujiki_data(2, 3, diag_form(1, 1, -1))
        a, b = (1, 0, 0), (0, 1, 1)
        want = (fd.form(a, a) * fd.form(b, b) + 2 * fd.form(a, b) ** 2) * fd.c / 3
        assert bb.fujiki_polarized(fd, (a, a, b, b)) == want

    def test_permutation_invariance_all_perms_n2(self):
        rng = random.Random(4)
        fd = bb.fujiki_data(2, Fraction(7, 3), diag_form(1, -2, 3))
        vs = [rand_vec(rng, 3) for _ in range(4)]
        base = bb.fujiki_polarized(fd, vs)
        for perm in itertools.permutations(vs):
            assert bb.fujiki_polarized(fd, perm) == base

    def test_permutation_invariance_sampled_n3(self):
        rng = random.Random(6)
        fd = bb.fujiki_data(3, 2, diag_form(1, 1, -1))
        vs = [rand_vec(rng, 3) for _ in range(6)]
        base = bb.fujiki_polarized(fd, vs)
        for _ in range(10):
            perm = rng.sample(vs, len(vs))
            assert bb.fujiki_polarized(fd, perm) == base

    def test_multilinearity_per_slot(self):
        rng = random.Random(8)
        fd = bb.fujiki_data(2, 1, diag_form(2, -1))
        vs = [rand_vec(rng, 2) for _ in range(4)]
        for slot in range(4):
            u, v = rand_vec(rng, 2), rand_vec(rng, 2)
            c = rand_frac(rng)
            with_u = list(vs)
            with_u[slot] = u
            with_v = list(vs)
            with_v[slot] = v
            combo = list(vs)
            combo[slot] = tuple(c * a + b for a, b in zip(u, v))
            assert (
                bb.fujiki_polarized(fd, combo)
                == c * bb.fujiki_polarized(fd, with_u) + bb.fujiki_polarized(fd, with_v)
            )

    def test_wrong_arity_rejected(self):
        fd = bb.fujiki_data(2, 1, diag_form(1, 1))
        with pytest.raises(InputError):
            bb.fujiki_polarized(fd, [(1, 0)] * 3)


class TestIsotropicVanishing:
    def test_n1_double_copy(self):
        fd = bb.fujiki_data(1, 1, U_FORM)
        assert bb.isotropic_power_vanishing(fd, (1, 0), [], 2) == 0

    def test_n2_three_copies_any_filler(self):
        fd = bb.fujiki_data(2, 5, U_FORM)
        assert bb.isotropic_power_vanishing(fd, (1, 0), [(3, 7)], 3) == 0

    def test_n2_two_copies_witness(self):
        # q(beta)=0, q(gamma)=0, q(beta,gamma)=1: value (2c/3), nonzero
        c = Fraction(3, 2)
        fd = bb.fujiki_data(2, c, U_FORM)
        val = bb.isotropic_power_vanishing(fd, (1, 0), [(0, 1), (0, 1)], 2)
        assert val == 2 * c / 3

    def test_vanishing_property_n123(self):
        rng = random.Random(12)
        q = tuple(
            tuple(Fraction(x) for x in row)
            for row in [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 2, 0], [0, 0, 0, -3]]
        )
        beta = (1, 0, 0, 0)
        for n in (1, 2, 3):
            fd = bb.fujiki_data(n, 2, q)
            for copies in range(n + 1, 2 * n + 1):
                for _ in range(5):
                    fillers = [rand_vec(rng, 4) for _ in range(2 * n - copies)]
                    assert bb.isotropic_power_vanishing(fd, beta, fillers, copies) == 0

    def test_nonisotropic_rejected(self):
        fd = bb.fujiki_data(1, 1, U_FORM)
        with pytest.raises(InputError):
            bb.isotropic_power_vanishing(fd, (1, 1), [], 2)


class TestMatsushitaExpand:
    def test_n1_worked(self):
        d = bb.DivisorPairData(qE=0, qA=2, qEA=1, n=1, c=1)
        assert bb.matsushita_expand(d) == (2, 1, 0)

    def test_n2_worked(self):
        d = bb.DivisorPairData(qE=0, qA=2, qEA=1, n=2, c=3)
        # m = 0..4: A^4, EA^3, E^2A^2, E^3A, E^4
        assert bb.matsushita_expand(d) == (12, 6, 2, 0, 0)

    def test_no_t_dependence(self):
        for n in (1, 2, 3):
            d = bb.DivisorPairData(qE=0, qA=5, qEA=0, n=n, c=2)
            out = bb.matsushita_expand(d)
            assert all(x == 0 for x in out[1:])
            assert out[0] == 2 * Fraction(5) ** n

    def test_sign_pattern_random(self):
        rng = random.Random(21)
        for _ in range(100):
            n = rng.choice([1, 2, 3])
            d = bb.DivisorPairData(
                qE=0,
                qA=rand_frac(rng, 1, 9),
                qEA=rand_frac(rng, 1, 9),
                n=n,
                c=rand_frac(rng, 1, 9),
            )
            out = bb.matsushita_expand(d)
            for m, val in enumerate(out):
                if m > n:
                    assert val == 0
                else:
                    assert val > 0


class TestNumericallyTrivial:
    def test_trivial_case(self):
        d = bb.DivisorPairData(qE=0, qA=2, qEA=0, n=2, c=3)
        verdict = bb.numerically_trivial_test(d, 0, 0)
        assert verdict.is_numerically_trivial
        assert (verdict.qE, verdict.qEA) == (0, 0)

    def test_nontrivial_mixed(self):
        d = bb.DivisorPairData(qE=0, qA=2, qEA=1, n=2, c=3)
        mixed = d.c * d.qEA * d.qA  # c*qEA*qA^(n-1), positive
        verdict = bb.numerically_trivial_test(d, 0, mixed)
        assert not verdict.is_numerically_trivial

    def test_inconsistent_top_rejected(self):
        d = bb.DivisorPairData(qE=0, qA=2, qEA=0, n=2, c=3)
        with pytest.raises(InconsistencyError):
            bb.numerically_trivial_test(d, 1, 0)


class TestBBRecover:
    def test_n1_round_trip(self):
        fd = bb.fujiki_data(1, 1, U_FORM)
        table = bb.fujiki_table(fd)
        rec = bb.bb_recover(1, 1, table, reference=(1, 1))
        assert rec.q == U_FORM
        assert rec.exact and not rec.sign_flipped

    def test_n2_diag_round_trip(self):
        fd = bb.fujiki_data(2, 3, diag_form(2, -2))
        table = bb.fujiki_table(fd)
        rec = bb.bb_recover(2, 3, table, reference=(1, 0))
        assert rec.q == diag_form(2, -2)
        assert rec.exact

    def test_n2_sign_flip_applied(self):
        fd = bb.fujiki_data(2, 3, diag_form(2, -2))
        table = bb.fujiki_table(fd)
        # reference with q(ref) < 0 under the pivot-positive convention
        rec = bb.bb_recover(2, 3, table, reference=(0, 1))
        assert rec.sign_flipped
        q = rec.q
        assert q == diag_form(-2, 2)
        assert q[1][1] > 0  # q(reference) > 0 after the flip

    def test_recover_forward_identity_random(self):
        rng = random.Random(31)
        done = 0
        while done < 50:
            r = rng.choice([2, 3])
            m = [[rand_frac(rng, -4, 4, 3) for _ in range(r)] for _ in range(r)]
            for i in range(r):
                for j in range(i):
                    m[i][j] = m[j][i]
            if determinant(m) == 0:
                continue
            fd = bb.fujiki_data(2, Fraction(rng.randint(1, 4)), m)
            table = bb.fujiki_table(fd)
            ref = next(
                v
                for v in [(1,) + (0,) * (r - 1), (1, 1) + (0,) * (r - 2), (1, -1) + (0,) * (r - 2)]
                if fd.form(v, v) != 0
            )
            rec = bb.bb_recover(2, fd.c, table, reference=ref)
            assert rec.exact
            sign = 1 if fd.form(ref, ref) > 0 else -1
            want = tuple(tuple(sign * x for x in row) for row in fd.q)
            assert rec.q == want
            done += 1

    def test_u_block_isotropic_diagonal(self):
        # every basis vector isotropic: pivot search must use e_i + e_j
        fd = bb.fujiki_data(2, 1, U_FORM)
        table = bb.fujiki_table(fd)
        rec = bb.bb_recover(2, 1, table, reference=(1, 1))
        assert rec.q == U_FORM

    def test_float_fallback_flagged(self):
        fd = bb.fujiki_data(2, 1, diag_form(1, 1))
        table = bb.fujiki_table(fd)
        doubled = [[[[2 * x for x in row3] for row3 in row2] for row2 in row1] for row1 in table]
        rec = bb.bb_recover(2, 1, doubled, reference=(1, 0))
        assert not rec.exact
        assert "float fallback" in rec.note
        got = float(rec.q[0][0])
        assert abs(got - 2 ** 0.5) < 1e-9

    def test_asymmetric_table_rejected(self):
        fd = bb.fujiki_data(2, 1, diag_form(1, 2))
        table = bb.fujiki_table(fd)
        table[0][0][1][1] += 1  # breaks symmetry with the other (0,0,1,1) slots
        with pytest.raises(InconsistencyError):
            bb.bb_recover(2, 1, table, reference=(1, 0))

    def test_symmetric_but_inconsistent_table_rejected(self):
        import itertools as it

        fd = bb.fujiki_data(2, 1, diag_form(1, 2))
        table = bb.fujiki_table(fd)
        for i, j, k, l in set(it.permutations((0, 0, 1, 1))):
            table[i][j][k][l] += 1  # symmetric, but no quadratic form produces it
        with pytest.raises(InconsistencyError):
            bb.bb_recover(2, 1, table, reference=(1, 0))

    def test_higher_n_rejected(self):
        with pytest.raises(InputError):
            bb.bb_recover(3, 1, [], reference=(1,))


class TestJson:
    def test_round_trip(self):
        fd = bb.fujiki_data(2, Fraction(3, 2), ((Fraction(1), Fraction(1, 3)),
                                                (Fraction(1, 3), Fraction(-2))))
        again = bb.fujiki_load_json(bb.fujiki_dump_json(fd))
        assert again == fd

    def test_strings_are_exact(self):
        text = bb.fujiki_dump_json(bb.fujiki_data(1, Fraction(1, 3), diag_form(1)))
        assert '"1/3"' in text
