import random

import pytest

from bbcharpoly.poly import (
    BadPrimeError,
    CrtDegreeMismatchError,
    FieldPoly,
    IntPoly,
    crt_combine,
    factor,
    gcd_free_basis,
    hensel_lift_basis,
    is_irreducible,
    poly_gcd,
    poly_lcm,
    pow_mod,
    squarefree_part,
)


def fp(coeffs, p):
    return FieldPoly(coeffs, p)


def linear(a, p):
    """X - a over GF(p)."""
    return FieldPoly([-a, 1], p)


class TestArithmetic:
    def test_gcd_example(self):
        # GF(5): gcd(X^2-1, X-1) = X-1
        assert poly_gcd(fp([-1, 0, 1], 5), fp([-1, 1], 5)) == fp([-1, 1], 5)

    def test_mod_example(self):
        # GF(7): (X^2+1) mod (X-2) = 5, i.e. the evaluation at 2
        assert fp([1, 0, 1], 7) % fp([-2, 1], 7) == fp([5], 7)

    def test_int_product_example(self):
        assert IntPoly([-1, 1]) * IntPoly([1, 1]) == IntPoly([-1, 0, 1])

    def test_divmod_roundtrip_random(self):
        rng = random.Random(1)
        for p in (101, 10007):
            for _ in range(50):
                a = fp([rng.randrange(p) for _ in range(rng.randrange(1, 30))], p)
                b = fp([rng.randrange(p) for _ in range(rng.randrange(1, 12))], p)
                if b.is_zero:
                    continue
                q, r = divmod(a, b)
                assert q * b + r == a
                assert r.degree < b.degree

    def test_large_prime_multiplication(self):
        # Exercises the 16-bit split path of the convolution.
        p = (1 << 31) - 1  # not prime, but multiplication only needs a modulus
        rng = random.Random(2)
        a = [rng.randrange(p) for _ in range(40)]
        b = [rng.randrange(p) for _ in range(40)]
        from bbcharpoly.poly import _mul_mod_lists

        got = _mul_mod_lists(a, b, p)
        want = [0] * 79
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                want[i + j] = (want[i + j] + ai * bj) % p
        n = len(want)
        while n and want[n - 1] == 0:
            n -= 1
        assert got == want[:n]

    def test_derivative_and_lcm(self):
        f = fp([2, 0, 1], 7)  # X^2 + 2
        assert f.derivative() == fp([0, 2], 7)
        g = linear(1, 7) * linear(2, 7)
        h = linear(2, 7) * linear(3, 7)
        assert poly_lcm(g, h) == (linear(1, 7) * linear(2, 7) * linear(3, 7)).monic()

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            divmod(fp([1, 1], 5), FieldPoly.zero(5))

    def test_mixed_modulus_rejected(self):
        with pytest.raises(ValueError):
            fp([1], 5) + fp([1], 7)

    def test_int_division_requires_monic_or_exact(self):
        f = IntPoly([0, 0, 2])  # 2X^2
        assert divmod(f, IntPoly([0, 1]))[0] == IntPoly([0, 2])
        with pytest.raises(ValueError):
            divmod(IntPoly([1, 0, 1]), IntPoly([0, 2]))


class TestEvaluation:
    def test_eval_examples(self):
        from bbcharpoly.poly import eval_horner

        # GF(11): (X^2 - 3X + 2)(4) = 16 - 12 + 2 = 6
        assert fp([2, -3, 1], 11)(4) == 6
        assert eval_horner(fp([2, -3, 1], 11), 4) == 6
        f = fp([3, 5, 1], 11)
        assert f(0) == 3
        g = IntPoly([-2, 1]) * IntPoly([-1, 1]) ** 4
        assert g(2) == 0
        assert g(1) == 0
        assert g(3) == 16


class TestSquarefree:
    def test_integer_example(self):
        g = IntPoly([-2, 1]) * IntPoly([-1, 1]) ** 4
        assert squarefree_part(g) == IntPoly([2, -3, 1])

    def test_field_example(self):
        assert squarefree_part(linear(1, 7) ** 2) == linear(1, 7)

    def test_fixed_point(self):
        f = linear(1, 101) * linear(5, 101) * fp([1, 1, 1], 101)
        assert squarefree_part(f) == f.monic()

    def test_precondition(self):
        f = fp([0, 1], 5) ** 6  # degree 6 > p = 5
        with pytest.raises(ValueError):
            squarefree_part(f)

    def test_radical_divides(self):
        rng = random.Random(3)
        p = 101
        for _ in range(30):
            f = FieldPoly.one(p)
            for _ in range(rng.randrange(1, 4)):
                f = f * linear(rng.randrange(p), p) ** rng.randrange(1, 4)
            s = squarefree_part(f)
            assert poly_gcd(s, f) == s


class TestFactor:
    def test_example_gf7(self):
        f = fp([-1, 0, 1], 7)  # X^2 - 1
        fac = factor(f, random.Random(0))
        assert set(fac.factors) == {(linear(1, 7), 1), (linear(6, 7), 1)}
        assert fac.expand() == f

    def test_example_gf5_splits(self):
        f = fp([1, 0, 1], 5)  # X^2 + 1 = (X-2)(X-3) mod 5
        fac = factor(f, random.Random(0))
        assert set(fac.factors) == {(linear(2, 5), 1), (linear(3, 5), 1)}

    def test_example_gf5_irreducible(self):
        f = fp([-1, -2, 1], 5)  # X^2 - 2X - 1, discriminant 8 = 3 is a non-residue
        assert all(pow(a, 2, 5) != 3 for a in range(5))
        fac = factor(f, random.Random(0))
        assert fac.factors == ((f.monic(), 1),)

    def test_roundtrip_random(self):
        rng = random.Random(4)
        for p, count in ((101, 500), (10007, 500)):
            for _ in range(count):
                deg = rng.randrange(1, 51)
                coeffs = [rng.randrange(p) for _ in range(deg)] + [
                    rng.randrange(1, p)
                ]
                f = fp(coeffs, p)
                fac = factor(f, rng)
                assert fac.expand() == f
                for poly, mult in fac.factors:
                    assert mult >= 1
                    assert poly.is_monic

    def test_returned_factors_are_irreducible(self):
        rng = random.Random(5)
        p = 101
        for _ in range(25):
            deg = rng.randrange(2, 25)
            f = fp([rng.randrange(p) for _ in range(deg)] + [1], p)
            for poly, _ in factor(f, rng).factors:
                assert is_irreducible(poly)

    def test_multiplicities_recovered(self):
        p = 10007
        rng = random.Random(6)
        f = linear(3, p) ** 4 * fp([1, 1, 1], p) ** 2 * linear(9, p)
        fac = factor(f, rng)
        assert dict(fac.factors) == {
            linear(3, p): 4,
            fp([1, 1, 1], p): 2,
            linear(9, p): 1,
        }


class TestGcdFreeBasis:
    def test_spec_example(self):
        p = 101
        a = linear(1, p) * linear(2, p)
        b = linear(1, p) ** 2 * linear(2, p)
        c = linear(1, p) ** 3 * linear(2, p) ** 2
        out = gcd_free_basis([a, b, c], c)
        assert set(out.basis) == {linear(1, p), linear(2, p)}
        exp = dict(zip(out.basis, out.exponents))
        assert exp[linear(1, p)] == 3
        assert exp[linear(2, p)] == 2

    def test_single_squarefree(self):
        p = 7
        f = fp([1, 1, 1], p)
        out = gcd_free_basis([f], f)
        assert out.basis == (f,)
        assert out.exponents == (1,)

    def test_coprime_inputs(self):
        p = 13
        f, g = linear(1, p), fp([1, 1, 1], p)
        out = gcd_free_basis([f, g], f * g)
        assert set(out.basis) == {f, g}
        assert out.exponents == (1, 1)

    def test_unexpressible_target_raises(self):
        p = 7
        with pytest.raises(BadPrimeError):
            gcd_free_basis([linear(1, p)], linear(2, p))

    def test_pairwise_coprime_and_reconstruction(self):
        rng = random.Random(8)
        p = 101
        for _ in range(40):
            roots = rng.sample(range(p), rng.randrange(1, 5))
            polys = []
            for _ in range(rng.randrange(1, 4)):
                f = FieldPoly.one(p)
                for r in roots:
                    f = f * linear(r, p) ** rng.randrange(0, 3)
                if f.degree > 0:
                    polys.append(f)
            if not polys:
                continue
            target = polys[0]
            for q in polys[1:]:
                target = target * q
            out = gcd_free_basis(polys, target)
            for i in range(len(out.basis)):
                for j in range(i + 1, len(out.basis)):
                    assert poly_gcd(out.basis[i], out.basis[j]).degree == 0
            assert out.expand(p) == target.monic()


class TestHensel:
    def test_integral_factors_fixed_point(self):
        S = IntPoly([-1, 0, 1])
        out = hensel_lift_basis(S, [linear(1, 5), linear(-1, 5)], 5, 10)
        assert set(out) == {IntPoly([-1, 1]), IntPoly([1, 1])}

    def test_irreducible_passthrough(self):
        S = IntPoly([1, -10, 1])
        out = hensel_lift_basis(S, [S.reduce(7)], 7, 100)
        assert out == [S]

    def test_quadratic_lift_product(self):
        # X^2 - 10X + 1 is irreducible over Z but splits mod 23 as (X-4)(X-6).
        S = IntPoly([1, -10, 1])
        p = 23
        basis = [linear(4, p), linear(6, p)]
        bound = 1000
        out = hensel_lift_basis(S, basis, p, bound)
        modulus = p
        while modulus <= 2 * bound:
            modulus *= p
        prod = out[0] * out[1]
        assert all(
            (a - b) % modulus == 0 for a, b in zip(prod.coeffs, S.coeffs)
        )
        for lifted, orig in zip(out, basis):
            assert lifted.reduce(p) == orig

    def test_random_lifts(self):
        rng = random.Random(9)
        p = 101
        for _ in range(25):
            deg = rng.randrange(2, 31)
            S = IntPoly([rng.randrange(-50, 50) for _ in range(deg)] + [1])
            red = S.reduce(p)
            if squarefree_part(red) != red.monic():
                continue
            fac = factor(red, rng)
            basis = [f for f, _ in fac.factors]
            bound = max(1000, S.max_abs())
            out = hensel_lift_basis(S, basis, p, bound)
            modulus = p
            while modulus <= 2 * bound:
                modulus *= p
            prod = IntPoly([1])
            for g in out:
                prod = prod * g
            assert all(
                c % modulus == 0 for c in (prod - S).coeffs
            )
            assert sorted(g.reduce(p).coeffs for g in out) == sorted(
                b.coeffs for b in basis
            )

    def test_bad_basis_rejected(self):
        with pytest.raises(ValueError):
            hensel_lift_basis(IntPoly([-1, 0, 1]), [linear(1, 5)], 5, 10)


class TestCrt:
    def test_trivial(self):
        assert crt_combine([fp([1, 1], 5), fp([1, 1], 7)]) == IntPoly([1, 1])

    def test_symmetric_range_example(self):
        # x = 4 mod 5, x = 5 mod 7 -> 19 -> -16 in the symmetric range mod 35
        out = crt_combine([fp([4, 1], 5), fp([5, 1], 7)])
        assert out == IntPoly([-16, 1])

    def test_single_residue(self):
        assert crt_combine([fp([4, 1], 5)]) == IntPoly([-1, 1])

    def test_degree_mismatch_reports_minority(self):
        with pytest.raises(CrtDegreeMismatchError) as err:
            crt_combine([fp([1, 1], 5), fp([1, 1], 7), fp([1, 0, 1], 11)])
        assert err.value.minority_indices == [2]
        assert err.value.minority_moduli == [11]


class TestText:
    def test_render(self):
        assert fp([2, -3, 1], 11).text() == "2 + 8*X + X^2"
        assert IntPoly([2, -3, 1]).text() == "2 - 3*X + X^2"
        assert IntPoly([]).text() == "0"
        assert IntPoly([0, -1]).text() == "-X"

    def test_pow_mod(self):
        p = 101
        f = fp([1, 1, 1], p)
        x = FieldPoly.x(p)
        assert pow_mod(x, p**2, f) == pow_mod(pow_mod(x, p, f), p, f)
