import random

import pytest

from bbcharpoly.adaptive import AdaptiveConfig
from bbcharpoly.blackbox import SparseMatrix, block_diagonal, build_companion
from bbcharpoly.ff import next_prime
from bbcharpoly.integer import (
    IntegerMatrix,
    LiftPlan,
    charpoly_coeff_bound,
    integer_charpoly,
    integer_charpoly_with_details,
    integer_minpoly,
    lift_charpoly,
    minpoly_coeff_bound,
)
from bbcharpoly.oracle import dense_charpoly, dense_integer_charpoly, dense_minpoly
from bbcharpoly.poly import BadPrimeError, FieldPoly, IntPoly

from helpers import random_sparse_integer_matrix


def int_diag(values):
    n = len(values)
    return IntegerMatrix(
        SparseMatrix(n, [(i, i, v) for i, v in enumerate(values) if v])
    )


class TestBounds:
    def test_minpoly_bound_examples(self):
        assert minpoly_coeff_bound(2, 1) == 2
        assert minpoly_coeff_bound(1, 1) == 1
        assert minpoly_coeff_bound(16, 10) == 87

    def test_charpoly_bound_examples(self):
        assert charpoly_coeff_bound(1, 1) == 2
        assert charpoly_coeff_bound(2, 1) == 6

    def test_charpoly_bound_monotone(self):
        assert charpoly_coeff_bound(5, 1) < charpoly_coeff_bound(6, 1)
        assert charpoly_coeff_bound(5, 2) < charpoly_coeff_bound(5, 3)

    def test_charpoly_bound_dominates(self):
        rng = random.Random(0)
        for _ in range(10):
            n = rng.randrange(1, 10)
            m = random_sparse_integer_matrix(n, rng)
            bound = charpoly_coeff_bound(n, max(1, m.max_abs()))
            cp = dense_integer_charpoly(m.to_dense())
            assert cp.max_abs() <= bound

    def test_lift_plan(self):
        plan = LiftPlan.for_bound(7, 1000)
        assert 7**plan.exponent > 2000
        assert 7 ** (plan.exponent - 1) <= 2000


class TestIntegerMinpoly:
    def test_diag112(self):
        rng = random.Random(1)
        A = int_diag([1, 1, 2])
        assert integer_minpoly(A, rng) == IntPoly([2, -3, 1])

    def test_companion(self):
        rng = random.Random(2)
        f = IntPoly([1, -10, 1])
        A = IntegerMatrix(build_companion(f))
        assert integer_minpoly(A, rng) == f

    def test_zero_matrix(self):
        rng = random.Random(3)
        A = IntegerMatrix(SparseMatrix(4, []))
        assert integer_minpoly(A, rng) == IntPoly([0, 1])

    def test_matches_dense_krylov_over_primes(self):
        rng = random.Random(4)
        for _ in range(5):
            n = rng.randrange(2, 16)
            m = random_sparse_integer_matrix(n, rng)
            A = IntegerMatrix(m)
            mp = integer_minpoly(A, rng)
            for p in (10007, 65537, next_prime(1 << 20)):
                assert mp.reduce(p) == dense_minpoly(m.to_dense(), p)


class TestLiftCharpoly:
    def test_diag112_by_hand(self):
        A = int_diag([1, 1, 2])
        minpoly_z = IntPoly([2, -3, 1])  # (X-1)(X-2)
        p = 7
        charpoly_mod_p = minpoly_z.reduce(p) * FieldPoly([-1, 1], p)
        out = lift_charpoly(A, minpoly_z, p, charpoly_mod_p)
        assert out == IntPoly([-2, 5, -4, 1])  # (X-1)^2 (X-2)

    def test_minpoly_equals_charpoly(self):
        f = IntPoly([1, -10, 1])
        A = IntegerMatrix(build_companion(f))
        out = lift_charpoly(A, f, 13, f.reduce(13))
        assert out == f

    def test_doubled_companion_block(self):
        f = IntPoly([1, -10, 1])
        C = build_companion(f)
        A = IntegerMatrix(block_diagonal([C, C]))
        out = lift_charpoly(A, f, 13, (f.reduce(13) ** 2).monic())
        assert out == f * f

    def test_bad_prime_detected(self):
        # mod 5, (X-1)(X-6) = (X-1)^2 is no longer squarefree
        A = int_diag([1, 6])
        minpoly_z = IntPoly([6, -7, 1])
        with pytest.raises(BadPrimeError):
            lift_charpoly(A, minpoly_z, 5, minpoly_z.reduce(5))

    def test_small_prime_rejected(self):
        A = int_diag([1, 1, 2])
        with pytest.raises(BadPrimeError):
            lift_charpoly(A, IntPoly([2, -3, 1]), 3, FieldPoly([1, 0, 0, 1], 3))


class TestIntegerCharpoly:
    def test_diag112(self):
        A = int_diag([1, 1, 2])
        assert integer_charpoly(A, AdaptiveConfig(seed=5)) == IntPoly([-2, 5, -4, 1])

    def test_zero_matrix(self):
        A = IntegerMatrix(SparseMatrix(5, []))
        got = integer_charpoly(A, AdaptiveConfig(seed=6))
        assert got == IntPoly([0, 0, 0, 0, 0, 1])

    def test_matches_dense_oracle(self):
        rng = random.Random(7)
        for trial in range(6):
            n = rng.randrange(2, 20)
            m = random_sparse_integer_matrix(n, rng)
            A = IntegerMatrix(m)
            got = integer_charpoly(A, AdaptiveConfig(seed=trial))
            assert got == dense_integer_charpoly(m.to_dense())

    def test_trace_and_divisibility_invariants(self):
        rng = random.Random(8)
        for trial in range(4):
            n = rng.randrange(2, 16)
            m = random_sparse_integer_matrix(n, rng)
            A = IntegerMatrix(m)
            details = integer_charpoly_with_details(A, AdaptiveConfig(seed=trial))
            cp = details.charpoly
            assert cp.degree == n
            assert cp.coefficient(n - 1) == -A.trace()
            q, r = divmod(cp, details.minpoly)
            assert r.is_zero
            bound = charpoly_coeff_bound(n, max(1, A.norm))
            assert cp.max_abs() <= bound

    def test_reduction_matches_dense_mod_fresh_primes(self):
        rng = random.Random(9)
        m = random_sparse_integer_matrix(12, rng)
        A = IntegerMatrix(m)
        cp = integer_charpoly(A, AdaptiveConfig(seed=9))
        prime = 1 << 21
        for _ in range(10):
            prime = next_prime(prime)
            assert cp.reduce(prime) == dense_charpoly(m.to_dense(), prime)

    def test_lifted_factor_report(self):
        A = int_diag([1, 1, 2])
        details = integer_charpoly_with_details(A, AdaptiveConfig(seed=10))
        pairs = sorted(
            (f.coeffs, e) for f, e in zip(details.lifted_factors, details.lift_exponents)
        )
        assert pairs == [((-2, 1), 1), ((-1, 1), 2)]
