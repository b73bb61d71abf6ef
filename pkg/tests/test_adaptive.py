import random

import pytest

from bbcharpoly.adaptive import (
    AdaptiveConfig,
    MethodUnavailableError,
    TraceLog,
    blackbox_charpoly_field,
    charpoly_with_details,
    hybrid_multiplicities,
    invariant_factor,
    invfact_multiplicities,
    nullity_comb_search,
)
from bbcharpoly.blackbox import (
    PolyOfMatrix,
    SparseMatrix,
    block_diagonal,
    build_companion,
    random_vector,
    wiedemann_minpoly,
)
from bbcharpoly.ff import DlogContext, PrimeField, find_index_calculus_field
from bbcharpoly.multiplicity import profiles_from_factorization
from bbcharpoly.oracle import dense_charpoly, dense_invariant_factors
from bbcharpoly.poly import FieldPoly, factor

from helpers import (
    linear,
    planted_primary_form,
    rand_irreducible,
    random_census_instance,
    random_sparse_matrix,
)


def diag(values, p):
    return SparseMatrix(len(values), [(i, i, v % p) for i, v in enumerate(values) if v % p])


class TestNullityCombSearch:
    def test_planted_example(self):
        p = 101
        A, mults = planted_primary_form(
            [(linear(1, p), {2: 1, 1: 1}), (linear(2, p), {1: 1})], p
        )
        assert mults == [3, 1]
        op = A.operator(p)
        rng = random.Random(0)
        minpoly = wiedemann_minpoly(op, rng)
        profiles = profiles_from_factorization(factor(minpoly, rng))
        cfg = AdaptiveConfig(seed=0)
        got = nullity_comb_search(op, profiles, cfg, rng)
        want = {tuple(linear(1, p).coeffs): 3, tuple(linear(2, p).coeffs): 1}
        for prof, m in zip(profiles, got):
            assert want[tuple(prof.poly.coeffs)] == m

    def test_random_sparse_vs_oracle(self):
        rng = random.Random(1)
        p = 10007
        A = random_sparse_matrix(50, p, rng)
        cfg = AdaptiveConfig(seed=1, method="nullity-comb")
        cp = blackbox_charpoly_field(A.operator(p), cfg)
        assert cp == dense_charpoly(A.to_dense(), p)


class TestInvariantFactor:
    def test_diag112(self):
        p = 101
        rng = random.Random(2)
        op = diag([1, 1, 2], p).operator(p)
        f1 = invariant_factor(op, 1, rng)
        assert f1 == linear(1, p) * linear(2, p)
        f2 = invariant_factor(op, 2, rng, minpoly=f1, previous=f1)
        assert f2 == linear(1, p)

    def test_companion_second_factor_trivial(self):
        p = 101
        rng = random.Random(3)
        f = rand_irreducible(4, p, rng)
        op = build_companion(f).operator(p)
        f2 = invariant_factor(op, 2, rng, minpoly=f, previous=f)
        assert f2 == FieldPoly.one(p)

    def test_frobenius_construction(self):
        p = 101
        rng = random.Random(4)
        g = linear(3, p) * linear(7, p)
        f = (g * rand_irreducible(2, p, rng)).monic()
        A = block_diagonal([build_companion(f), build_companion(g)])
        op = A.operator(p)
        f1 = invariant_factor(op, 1, rng)
        assert f1 == f
        f2 = invariant_factor(op, 2, rng, minpoly=f1, previous=f1)
        assert f2 == g

    def test_chain_and_product_sweep(self):
        rng = random.Random(5)
        p = 101
        for _ in range(6):
            n = rng.randrange(4, 18)
            A = random_sparse_matrix(n, p, rng, min_per_row=1, max_per_row=3)
            dense = A.to_dense()
            want = dense_invariant_factors(dense, p)
            op = A.operator(p)
            got = []
            prev = None
            minpoly = wiedemann_minpoly(op, rng)
            for j in range(1, len(want) + 1):
                fj = invariant_factor(op, j, rng, minpoly=minpoly, previous=prev)
                got.append(fj)
                prev = fj
            assert got == want
            prod = FieldPoly.one(p)
            for fj in got:
                prod = prod * fj
            assert prod == dense_charpoly(dense, p)


class TestDrivers:
    def test_companion_trivial_path(self):
        rng = random.Random(6)
        p = 10007
        f = rand_irreducible(9, p, rng)
        res = charpoly_with_details(
            build_companion(f).operator(p), AdaptiveConfig(seed=6)
        )
        assert res.charpoly == f
        assert res.method == "trivial"

    def test_planted_jordan_tower(self):
        p = 101
        A, _ = planted_primary_form([(linear(1, p), {3: 1, 2: 1}), (linear(2, p), {1: 1})], p)
        cp = blackbox_charpoly_field(A.operator(p), AdaptiveConfig(seed=7))
        assert cp == (linear(1, p) ** 5 * linear(2, p)).monic()

    def test_random_sparse_auto_vs_oracle(self):
        rng = random.Random(8)
        p = 10007
        A = random_sparse_matrix(60, p, rng)
        cp = blackbox_charpoly_field(A.operator(p), AdaptiveConfig(seed=8))
        assert cp == dense_charpoly(A.to_dense(), p)

    @pytest.mark.parametrize("method", ["nullity-comb", "index", "hybrid", "invfact"])
    def test_all_methods_on_planted_instances(self, method):
        rng = random.Random(9)
        done = 0
        while done < 6:
            A, polys, census, mults, q, p = random_census_instance(rng)
            cfg = AdaptiveConfig(seed=done, method=method)
            cp = blackbox_charpoly_field(A.operator(q), cfg)
            want = FieldPoly.one(q)
            for poly, m in zip(polys, mults):
                want = want * poly**m
            assert cp == want.monic(), f"method={method} q={q}"
            done += 1

    def test_method_unavailable(self):
        # GF(65537): 65536 = 2^16 has no prime factor > n
        p = 65537
        rng = random.Random(10)
        A, _ = planted_primary_form(
            [(linear(1, p), {1: 2}), (linear(2, p), {1: 1})], p
        )
        with pytest.raises(MethodUnavailableError):
            blackbox_charpoly_field(
                A.operator(p), AdaptiveConfig(seed=10, method="index")
            )
        # auto falls back to nullity-comb instead
        cp = blackbox_charpoly_field(A.operator(p), AdaptiveConfig(seed=10))
        assert cp == (linear(1, p) ** 2 * linear(2, p)).monic()

    def test_determinism_under_seed(self):
        rng = random.Random(11)
        q, _ = find_index_calculus_field(24)
        A = random_sparse_matrix(24, q, rng)
        log1, log2 = TraceLog(), TraceLog()
        cp1 = blackbox_charpoly_field(
            A.operator(q), AdaptiveConfig(seed=42, trace_log=log1)
        )
        cp2 = blackbox_charpoly_field(
            A.operator(q), AdaptiveConfig(seed=42, trace_log=log2)
        )
        assert cp1 == cp2
        assert log1.lines() == log2.lines()

    def test_cayley_hamilton_spot_check(self):
        rng = random.Random(12)
        p = 101
        A, _ = planted_primary_form(
            [(rand_irreducible(2, p, rng), {2: 1}), (linear(5, p), {1: 2})], p
        )
        op = A.operator(p)
        cp = blackbox_charpoly_field(op, AdaptiveConfig(seed=12))
        evaluated = PolyOfMatrix(op, cp)
        for _ in range(5):
            assert not evaluated.apply(random_vector(op.dimension, p, rng)).any()


class TestHybrid:
    def test_all_degree_one_mult_one(self):
        # pure nullity path: s = 0, no system
        q, p = find_index_calculus_field(9)
        rng = random.Random(13)
        A, mults = planted_primary_form(
            [(linear(2, q), {1: 4}), (linear(3, q), {1: 3}), (linear(5, q), {1: 2})],
            q,
        )
        op = A.operator(q)
        minpoly = wiedemann_minpoly(op, rng)
        profiles = profiles_from_factorization(factor(minpoly, rng))
        cfg = AdaptiveConfig(seed=13)
        ctx = DlogContext(PrimeField(q))
        got = hybrid_multiplicities(op, profiles, cfg, ctx, p, rng)
        want = {(-2 % q, 1): 4, (-3 % q, 1): 3, (-5 % q, 1): 2}
        for prof, m in zip(profiles, got):
            assert want[prof.poly.coeffs] == m

    def test_mixed_degrees_vs_oracle(self):
        rng = random.Random(14)
        # two degree-3 factors and three degree-1 factors, n = 30
        shape_list = [(3, {1: 2}), (3, {2: 1}), (1, {1: 6}), (1, {2: 2}), (1, {1: 8})]
        n = sum(d * sum(j * c for j, c in counts.items()) for d, counts in shape_list)
        assert n == 30
        q, p = find_index_calculus_field(n)
        polys = []
        while len(polys) < len(shape_list):
            f = rand_irreducible(shape_list[len(polys)][0], q, rng)
            if f not in polys:
                polys.append(f)
        blocks = [(f, counts) for f, (_, counts) in zip(polys, shape_list)]
        A, mults = planted_primary_form(blocks, q)
        op = A.operator(q)
        minpoly = wiedemann_minpoly(op, rng)
        profiles = profiles_from_factorization(factor(minpoly, rng))
        cfg = AdaptiveConfig(seed=14)
        got = hybrid_multiplicities(op, profiles, cfg, DlogContext(PrimeField(q)), p, rng)
        want = {f.coeffs: m for f, m in zip(polys, mults)}
        for prof, m in zip(profiles, got):
            assert want[prof.poly.coeffs] == m
        cp = dense_charpoly(A.to_dense(), q)
        got_cp = FieldPoly.one(q)
        for prof, m in zip(profiles, got):
            got_cp = got_cp * prof.poly**m
        assert got_cp == cp


class TestInvfactDriver:
    def test_resolves_everything(self):
        p = 101
        rng = random.Random(15)
        A, mults = planted_primary_form(
            [(linear(1, p), {2: 2}), (linear(3, p), {1: 3})], p
        )
        op = A.operator(p)
        minpoly = wiedemann_minpoly(op, rng)
        profiles = profiles_from_factorization(factor(minpoly, rng))
        got = invfact_multiplicities(op, profiles, AdaptiveConfig(seed=15), rng, minpoly)
        want = {(-1 % p, 1): 4, (-3 % p, 1): 3}
        for prof, m in zip(profiles, got):
            assert want[prof.poly.coeffs] == m
