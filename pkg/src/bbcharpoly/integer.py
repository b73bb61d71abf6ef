"""Characteristic polynomial over the integers.

The route: the integer minimal polynomial is reconstructed by CRT from its
images modulo random word-size primes (with early termination once the
symmetric-range reconstruction stabilizes and one fresh prime re-verifies
it); a prime q with an index-calculus-friendly group structure is then
drawn, the characteristic polynomial of A mod q is computed by the adaptive
field driver, and a gcd-free basis of the squarefree part of the minimal
polynomial is Hensel-lifted to recover the integer characteristic
polynomial as a product of lifted factors.

A prime is *bad* when the squarefree part stops being squarefree mod q,
when the field minimal polynomial differs from the reduction of the integer
one, or when the reassembled product has the wrong degree; bad primes are
logged and retried (three strikes raise with diagnostics).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .adaptive import AdaptiveConfig, CharpolyResult, charpoly_with_details
from .blackbox import SparseMatrix, SparseOperator, wiedemann_minpoly
from .ff import find_index_calculus_field, is_prime
from .poly import (
    BadPrimeError,
    FieldPoly,
    IntPoly,
    crt_combine,
    gcd_free_basis,
    hensel_lift_basis,
    poly_gcd,
    squarefree_part,
)

_MINPOLY_PRIME_LO = 1 << 28
_MINPOLY_PRIME_HI = 1 << 29


class IntegerCharpolyError(ArithmeticError):
    """The integer pipeline ran out of good primes; carries diagnostics."""

    def __init__(self, message: str, bad_primes=()):
        self.bad_primes = list(bad_primes)
        super().__init__(
            message + (f" (bad primes tried: {self.bad_primes})" if bad_primes else "")
        )


@dataclass
class IntegerMatrix:
    """Sparse square matrix over Z; the recorded norm is max |entry|."""

    matrix: SparseMatrix

    @property
    def dimension(self) -> int:
        return self.matrix.n

    @property
    def norm(self) -> int:
        return self.matrix.max_abs()

    def operator(self, p: int) -> SparseOperator:
        return self.matrix.operator(p)

    def trace(self) -> int:
        return self.matrix.diagonal_sum()


@dataclass
class LiftPlan:
    """Prime and precision chosen for a Hensel lift: p**k > 2*bound."""

    prime: int
    exponent: int
    bound: int

    @classmethod
    def for_bound(cls, prime: int, bound: int) -> "LiftPlan":
        k = 1
        modulus = prime
        while modulus <= 2 * bound:
            modulus *= prime
            k += 1
        return cls(prime, k, bound)


def minpoly_coeff_bound(n: int, norm: int) -> int:
    """Worst-case bit size of integer minimal polynomial coefficients:
    ceil((n/2) * (log2 n + 2 log2 ||A|| + 0.212))."""
    if n < 1 or norm < 1:
        raise ValueError("need n >= 1 and norm >= 1")
    bits = (n / 2) * (math.log2(n) + 2 * math.log2(norm) + 0.212)
    return max(1, math.ceil(bits))


def charpoly_coeff_bound(n: int, norm: int) -> int:
    """Conservative bound (1 + sqrt(n)*norm)**n on charpoly coefficients,
    computed exactly: the integer-plus-sqrt(n) expansion x + y*sqrt(n) is
    accumulated in integers and the ceiling taken at the end."""
    norm = max(1, int(norm))
    x = 0
    y = 0
    for k in range(n + 1):
        term = math.comb(n, k) * norm**k * n ** (k // 2)
        if k % 2 == 0:
            x += term
        else:
            y += term
    s = math.isqrt(y * y * n)
    if s * s < y * y * n:
        s += 1
    return x + s


def _random_minpoly_prime(rng, seen) -> int:
    while True:
        candidate = rng.randrange(_MINPOLY_PRIME_LO, _MINPOLY_PRIME_HI) | 1
        if candidate not in seen and is_prime(candidate):
            seen.add(candidate)
            return candidate


def integer_minpoly(
    A: IntegerMatrix, rng=None, confidence_rounds: int = 2, max_primes: int = 80
) -> IntPoly:
    """Integer minimal polynomial by CRT over random word-size primes.

    Residues of less-than-maximal degree come from bad primes (or failed
    projections) and are discarded.  Termination: the symmetric-range
    reconstruction must stay unchanged while two further primes arrive, and
    one extra verification prime must reproduce it; a pathological spread of
    degrees among the first 10 primes raises.
    """
    if rng is None:
        rng = random.Random()
    seen: set[int] = set()
    group: list[FieldPoly] = []
    degrees_seen: list[int] = []
    candidate = None
    stable = 0
    bit_cap = minpoly_coeff_bound(A.dimension, max(1, A.norm)) + 8
    for used in range(1, max_primes + 1):
        p = _random_minpoly_prime(rng, seen)
        residue = wiedemann_minpoly(A.operator(p), rng, confidence_rounds)
        degrees_seen.append(residue.degree)
        if used == 10:
            top = max(degrees_seen)
            if sum(1 for d in degrees_seen if d == top) <= 5:
                raise IntegerCharpolyError(
                    f"no majority degree among 10 primes: {sorted(degrees_seen)}"
                )
        if group and residue.degree < group[0].degree:
            continue  # bad prime (or failed projection): degree dropped
        if group and residue.degree > group[0].degree:
            group = []  # everything so far was bad
            candidate = None
            stable = 0
        group.append(residue)
        new_candidate = crt_combine(group)
        if candidate is not None and new_candidate == candidate:
            stable += 1
        else:
            stable = 0
        candidate = new_candidate
        if stable >= 2:
            p_verify = _random_minpoly_prime(rng, seen)
            check = wiedemann_minpoly(A.operator(p_verify), rng, confidence_rounds)
            if check == candidate.reduce(p_verify):
                return candidate
            if check.degree == group[0].degree:
                group.append(check)
                candidate = crt_combine(group)
            stable = 0
        if sum(g.p.bit_length() for g in group) > bit_cap and stable >= 1:
            # past the worst-case coefficient bound: accept after one verify
            p_verify = _random_minpoly_prime(rng, seen)
            check = wiedemann_minpoly(A.operator(p_verify), rng, confidence_rounds)
            if check == candidate.reduce(p_verify):
                return candidate
    raise IntegerCharpolyError(
        f"integer minimal polynomial did not stabilize after {max_primes} primes"
    )


def _lift_parts(A: IntegerMatrix, minpoly_z: IntPoly, p: int, charpoly_mod_p: FieldPoly):
    n = A.dimension
    if p <= n:
        raise BadPrimeError(f"prime {p} does not exceed the dimension {n}")
    if charpoly_mod_p.degree != n:
        raise BadPrimeError("characteristic polynomial mod p has wrong degree")
    S = squarefree_part(minpoly_z)
    s_bar = S.reduce(p)
    if poly_gcd(s_bar, s_bar.derivative()).degree != 0:
        raise BadPrimeError("squarefree part is not squarefree mod p")
    basis = gcd_free_basis(
        [s_bar, minpoly_z.reduce(p), charpoly_mod_p], charpoly_mod_p
    )
    residual = s_bar
    for g in basis.basis:
        q, r = divmod(residual, g)
        if not r.is_zero:
            raise BadPrimeError("basis element does not divide the squarefree part")
        residual = q
    if residual.degree != 0:
        raise BadPrimeError("basis does not cover the squarefree part")
    plan = LiftPlan.for_bound(p, charpoly_coeff_bound(n, max(1, A.norm)))
    lifted = hensel_lift_basis(S, list(basis.basis), p, plan.bound)
    out = IntPoly.one()
    for g, mu in zip(lifted, basis.exponents):
        out = out * g**mu
    if out.degree != n:
        raise BadPrimeError(f"lifted product has degree {out.degree}, wanted {n}")
    return out, lifted, list(basis.exponents)


def lift_charpoly(
    A: IntegerMatrix, minpoly_z: IntPoly, p: int, charpoly_mod_p: FieldPoly
) -> IntPoly:
    """Reassemble the integer charpoly from its image mod one good prime.

    Computes the squarefree part S of the integer minimal polynomial, a
    gcd-free basis of (S, minpoly, charpoly) mod p expressing the charpoly,
    Hensel-lifts the basis against S to precision p**k > 2*(coefficient
    bound), and returns the product of lifted factors raised to their
    exponents.  Violations of the good-prime conditions raise BadPrimeError.
    """
    return _lift_parts(A, minpoly_z, p, charpoly_mod_p)[0]


def _field_prime_floor(n: int) -> int:
    """Field size floor for the modular charpoly run: keep projection and
    certificate failure rates around 1/n^2 even at small dimensions."""
    return min(max(2 * n + 1, 4 * n * n, 1 << 12), 1 << 30)


@dataclass
class IntegerCharpolyResult:
    charpoly: IntPoly
    minpoly: IntPoly
    field_result: CharpolyResult
    field_prime: int
    lifted_factors: list[IntPoly]
    lift_exponents: list[int]
    bad_primes: list[int]


def integer_charpoly_with_details(
    A: IntegerMatrix, cfg: AdaptiveConfig | None = None
) -> IntegerCharpolyResult:
    if cfg is None:
        cfg = AdaptiveConfig()
    rng = random.Random(cfg.seed)
    n = A.dimension
    minpoly_z = integer_minpoly(A, rng, cfg.confidence_rounds)
    trace_z = A.trace()
    floor = _field_prime_floor(n)
    bad: list[int] = []
    last_reason = None
    for _ in range(3):
        q, _subprime = find_index_calculus_field(n, rng, min_q=floor)
        if q in bad:
            continue
        field_cfg = AdaptiveConfig(
            threshold=cfg.threshold,
            explosion_cap=cfg.explosion_cap,
            confidence_rounds=cfg.confidence_rounds,
            method=cfg.method,
            seed=rng.randrange(1 << 62),
            trace_log=cfg.trace_log,
        )
        try:
            field_result = charpoly_with_details(A.operator(q), field_cfg)
            if field_result.minpoly != minpoly_z.reduce(q):
                raise BadPrimeError(
                    "field minimal polynomial differs from the integer reduction"
                )
            lifted, factors, exponents = _lift_parts(
                A, minpoly_z, q, field_result.charpoly
            )
            if lifted.coefficient(n - 1) != -trace_z:
                raise BadPrimeError("integer trace identity violated after lift")
            return IntegerCharpolyResult(
                charpoly=lifted,
                minpoly=minpoly_z,
                field_result=field_result,
                field_prime=q,
                lifted_factors=factors,
                lift_exponents=exponents,
                bad_primes=bad,
            )
        except BadPrimeError as err:
            bad.append(q)
            last_reason = str(err)
            if cfg.trace_log is not None:
                cfg.trace_log.emit("bad-prime", prime=q, reason=str(err))
    raise IntegerCharpolyError(
        f"no good prime after 3 attempts: {last_reason}", bad_primes=bad
    )


def integer_charpoly(A: IntegerMatrix, cfg: AdaptiveConfig | None = None) -> IntPoly:
    """Characteristic polynomial of a sparse integer matrix (black-box)."""
    return integer_charpoly_with_details(A, cfg).charpoly
