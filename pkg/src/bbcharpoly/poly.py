"""Dense univariate polynomials over GF(p) and over the integers.

A polynomial is a coefficient sequence with the constant term first and no
trailing zeros; the zero polynomial has an empty sequence (``degree == -1``
stands in for the usual "minus infinity" convention).  ``FieldPoly`` carries
its modulus, ``IntPoly`` holds arbitrary-precision signed integers.

On top of the ring arithmetic this module provides squarefree decomposition,
Cantor-Zassenhaus factorization, pairwise-coprime (gcd-free) bases,
multifactor quadratic Hensel lifting, and coefficientwise CRT reconstruction.

Field multiplication is numpy convolution; when the modulus is large enough
that ``len * p**2`` could overflow int64, one operand is split into 16-bit
halves and the convolutions recombined.  Integer multiplication is schoolbook
with Karatsuba above degree 64 (coefficients are big ints, numpy is no help).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ff import factorize, next_prime

_KARATSUBA_CUTOFF = 64
_NUMPY_CUTOFF = 16


class BadPrimeError(ArithmeticError):
    """The chosen prime does not preserve the structure being reduced."""


class FieldTooSmallError(ValueError):
    """Squarefree machinery needs p > deg(f); pick a larger field."""


class CrtDegreeMismatchError(ValueError):
    """CRT residues disagree in degree; carries the minority residues."""

    def __init__(self, minority_indices, minority_moduli):
        self.minority_indices = list(minority_indices)
        self.minority_moduli = list(minority_moduli)
        super().__init__(
            "degree mismatch among CRT residues; minority residues at "
            f"indices {self.minority_indices} (moduli {self.minority_moduli})"
        )


def _strip(coeffs):
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return coeffs[:n]


def _mul_mod_lists(a, b, p):
    """Product of coefficient lists mod p."""
    if not a or not b:
        return []
    if min(len(a), len(b)) < _NUMPY_CUTOFF:
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return _strip([c % p for c in out])
    av = np.asarray(a, dtype=np.int64)
    bv = np.asarray(b, dtype=np.int64)
    length = len(a) + len(b) - 1
    # int64 is safe while length * p^2 < 2^63; otherwise split b into
    # 16-bit halves so partial products stay small.
    if length * p * p < (1 << 62):
        out = np.convolve(av, bv) % p
    else:
        bh, bl = bv >> 16, bv & 0xFFFF
        out = ((np.convolve(av, bh) % p << 16) + np.convolve(av, bl) % p) % p
    return _strip([int(c) for c in out])


def _divmod_mod_lists(a, b, p):
    """(quotient, remainder) of coefficient lists mod p; b nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], list(a)
    inv_lead = pow(b[-1], -1, p)
    db = len(b) - 1
    if len(a) < 2 * _NUMPY_CUTOFF:
        rem = list(a)
        quot = [0] * (len(a) - db)
        for k in range(len(a) - db - 1, -1, -1):
            c = rem[k + db] % p
            if c:
                q = c * inv_lead % p
                quot[k] = q
                for j in range(db + 1):
                    rem[k + j] = (rem[k + j] - q * b[j]) % p
        return _strip(quot), _strip([c % p for c in rem[:db]])
    rem = np.asarray(a, dtype=np.int64)
    bv = np.asarray(b, dtype=np.int64)
    quot = np.zeros(len(a) - db, dtype=np.int64)
    for k in range(len(a) - db - 1, -1, -1):
        c = int(rem[k + db]) % p
        if c:
            q = c * inv_lead % p
            quot[k] = q
            rem[k : k + db + 1] = (rem[k : k + db + 1] - q * bv) % p
    return _strip([int(c) for c in quot]), _strip([int(c) % p for c in rem[:db]])


class FieldPoly:
    """Dense polynomial over GF(p), constant term first, no trailing zeros."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs, p: int, _trusted: bool = False):
        if _trusted:
            self.coeffs = tuple(coeffs)
        else:
            self.coeffs = tuple(_strip([int(c) % p for c in coeffs]))
        self.p = p

    @classmethod
    def zero(cls, p):
        return cls((), p, _trusted=True)

    @classmethod
    def one(cls, p):
        return cls((1,), p, _trusted=True)

    @classmethod
    def x(cls, p):
        return cls((0, 1), p, _trusted=True)

    @classmethod
    def constant(cls, c, p):
        return cls((c,), p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_one(self) -> bool:
        return self.coeffs == (1,)

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _check(self, other) -> "FieldPoly":
        if isinstance(other, FieldPoly):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return FieldPoly((other,), self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % self.p
        return FieldPoly(_strip(out), self.p, _trusted=True)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldPoly(
            tuple((-c) % self.p for c in self.coeffs), self.p, _trusted=True
        )

    def __mul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return FieldPoly(
            _mul_mod_lists(self.coeffs, o.coeffs, self.p), self.p, _trusted=True
        )

    __rmul__ = __mul__

    def __divmod__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        q, r = _divmod_mod_lists(self.coeffs, o.coeffs, self.p)
        return (
            FieldPoly(q, self.p, _trusted=True),
            FieldPoly(r, self.p, _trusted=True),
        )

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative polynomial power")
        result = FieldPoly.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def shift(self, k: int) -> "FieldPoly":
        """Multiply by X**k."""
        if self.is_zero:
            return self
        return FieldPoly((0,) * k + self.coeffs, self.p, _trusted=True)

    def monic(self) -> "FieldPoly":
        if self.is_zero or self.coeffs[-1] == 1:
            return self
        inv = pow(self.coeffs[-1], -1, self.p)
        return FieldPoly(
            tuple(c * inv % self.p for c in self.coeffs), self.p, _trusted=True
        )

    def derivative(self) -> "FieldPoly":
        return FieldPoly(
            _strip([i * c % self.p for i, c in enumerate(self.coeffs)][1:]),
            self.p,
            _trusted=True,
        )

    def __call__(self, x: int) -> int:
        """Horner evaluation; deg(f) multiply-adds."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def coefficient(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def lift(self, symmetric: bool = False) -> "IntPoly":
        if symmetric:
            half = self.p // 2
            return IntPoly([c - self.p if c > half else c for c in self.coeffs])
        return IntPoly(self.coeffs)

    def text(self) -> str:
        return _render_ascending(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldPoly):
            return self.p == other.p and self.coeffs == other.coeffs
        if isinstance(other, int):
            v = other % self.p
            return self.coeffs == ((v,) if v else ())
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"FieldPoly({self.text()!r}, p={self.p})"


def _imul_lists(a, b):
    """Schoolbook/Karatsuba product of integer coefficient lists."""
    if not a or not b:
        return []
    if min(len(a), len(b)) <= _KARATSUBA_CUTOFF:
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return out
    m = min(len(a), len(b)) // 2
    a0, a1 = a[:m], a[m:]
    b0, b1 = b[:m], b[m:]
    z0 = _imul_lists(a0, b0)
    z2 = _imul_lists(a1, b1)
    sa = [x + y for x, y in zip(a0, a1)] + list(a1[len(a0):]) + list(a0[len(a1):])
    sb = [x + y for x, y in zip(b0, b1)] + list(b1[len(b0):]) + list(b0[len(b1):])
    z1 = _imul_lists(sa, sb)
    for i, c in enumerate(z0):
        z1[i] -= c
    for i, c in enumerate(z2):
        z1[i] -= c
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] += c
    for i, c in enumerate(z1):
        if c:
            out[i + m] += c
    for i, c in enumerate(z2):
        if c:
            out[i + 2 * m] += c
    return out


class IntPoly:
    """Dense polynomial over Z with arbitrary-precision coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(_strip([int(c) for c in coeffs]))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def one(cls):
        return cls((1,))

    @classmethod
    def x(cls):
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _check(self, other):
        if isinstance(other, IntPoly):
            return other
        if isinstance(other, int):
            return IntPoly((other,))
        return NotImplemented

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return IntPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return IntPoly(_imul_lists(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative polynomial power")
        result = IntPoly.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __divmod__(self, other):
        """Division over Z; the divisor must be monic or divide exactly."""
        o = self._check(other)
        if o is NotImplemented:
            return o
        if o.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        lead = o.coeffs[-1]
        rem = list(self.coeffs)
        db = o.degree
        if len(rem) <= db:
            return IntPoly.zero(), self
        quot = [0] * (len(rem) - db)
        for k in range(len(rem) - db - 1, -1, -1):
            c = rem[k + db]
            if c:
                if c % lead != 0:
                    raise ValueError(
                        "integer division requires a monic or exactly dividing divisor"
                    )
                q = c // lead
                quot[k] = q
                for j in range(db + 1):
                    rem[k + j] -= q * o.coeffs[j]
        return IntPoly(quot), IntPoly(rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> "IntPoly":
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def coefficient(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def reduce(self, p: int) -> FieldPoly:
        return FieldPoly([c % p for c in self.coeffs], p)

    def max_abs(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def text(self) -> str:
        return _render_ascending(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == tuple(_strip([other]))
        return NotImplemented

    def __hash__(self):
        return hash(("IntPoly", self.coeffs))

    def __repr__(self):
        return f"IntPoly({self.text()!r})"


def _render_ascending(coeffs) -> str:
    """Canonical text form ``c0 + c1*X + ... + cd*X^d`` with explicit signs."""
    if not coeffs:
        return "0"
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            term = str(mag)
        else:
            xpow = "X" if i == 1 else f"X^{i}"
            term = xpow if mag == 1 else f"{mag}*{xpow}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"


def poly_gcd(f, g):
    """Monic gcd over GF(p)."""
    if f.p != g.p:
        raise ValueError(f"mixed moduli {f.p} and {g.p}")
    a, b = f, g
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def poly_lcm(f, g):
    if f.is_zero or g.is_zero:
        return FieldPoly.zero(f.p)
    return ((f * g) // poly_gcd(f, g)).monic()


def pow_mod(base: FieldPoly, exponent: int, modulus: FieldPoly) -> FieldPoly:
    """base**exponent mod modulus by square-and-multiply."""
    result = FieldPoly.one(base.p)
    acc = base % modulus
    e = exponent
    while e:
        if e & 1:
            result = (result * acc) % modulus
        acc = (acc * acc) % modulus
        e >>= 1
    return result


def eval_horner(f, x):
    """Horner evaluation, shared entry point for both poly types."""
    return f(x)


def _bezout_mod_p(g: FieldPoly, h: FieldPoly):
    """s, t with s*g + t*h = 1 over GF(p); g, h must be coprime."""
    p = g.p
    r0, r1 = g, h
    s0, s1 = FieldPoly.one(p), FieldPoly.zero(p)
    t0, t1 = FieldPoly.zero(p), FieldPoly.one(p)
    while not r1.is_zero:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.degree != 0:
        raise ValueError("polynomials are not coprime")
    inv = pow(r0.coeffs[0], -1, p)
    s = FieldPoly([c * inv % p for c in s0.coeffs], p)
    t = FieldPoly([c * inv % p for c in t0.coeffs], p)
    # Normalize degrees: deg s < deg h, deg t < deg g.
    if h.degree > 0 and s.degree >= h.degree:
        q, s = divmod(s, h)
        t = t + q * g
    return s, t


# ---------------------------------------------------------------------------
# Squarefree structure


def _squarefree_decomposition_field(f: FieldPoly):
    """Yun's algorithm: list of (monic factor, multiplicity); needs p > deg f."""
    p = f.p
    if p <= f.degree:
        raise FieldTooSmallError(
            f"squarefree decomposition needs p > deg(f) ({p} <= {f.degree})"
        )
    f = f.monic()
    out = []
    fp = f.derivative()
    a = poly_gcd(f, fp)
    b = f // a
    c = fp // a
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a.monic(), i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


_GCD_PRIME_FLOOR = 1 << 29


def _int_gcd_monic(f: IntPoly, g: IntPoly) -> IntPoly:
    """Monic gcd over Z of a monic f and arbitrary g, by modular CRT.

    The result is certified: it is reconstructed from primes realizing the
    minimal gcd degree, and returned only once it exactly divides both
    inputs, which pins it to the true gcd (any common divisor of maximal
    degree that divides both is the gcd, up to the monic normalization).
    """
    if g.is_zero:
        return f
    if f.degree == 0:
        return IntPoly.one()
    residues: list[FieldPoly] = []
    previous = None
    prime = _GCD_PRIME_FLOOR
    for _ in range(256):
        prime = next_prime(prime)
        fp = f.reduce(prime)
        gp = g.reduce(prime)
        if fp.degree < f.degree or gp.degree < g.degree:
            continue
        d = poly_gcd(fp, gp)
        if d.degree == 0:
            return IntPoly.one()
        if residues and d.degree < residues[0].degree:
            residues = []
            previous = None
        if residues and d.degree > residues[0].degree:
            continue
        residues.append(d)
        candidate = crt_combine(residues)
        if previous is not None and candidate == previous:
            if (f % candidate).is_zero and (g % candidate).is_zero:
                return candidate
        previous = candidate
    raise ArithmeticError("modular gcd did not stabilize")


def squarefree_part(f):
    """Monic product of the distinct irreducible factors of f.

    Over GF(p) this requires p > deg(f); over Z the input must be monic
    (minimal polynomials always are).
    """
    if isinstance(f, FieldPoly):
        if f.p <= f.degree:
            raise FieldTooSmallError(
                f"squarefree part needs p > deg(f) ({f.p} <= {f.degree})"
            )
        if f.degree <= 0:
            return FieldPoly.one(f.p)
        return (f // poly_gcd(f, f.derivative())).monic()
    if isinstance(f, IntPoly):
        if not f.is_monic:
            raise ValueError("integer squarefree part implemented for monic input")
        if f.degree <= 0:
            return IntPoly.one()
        return f // _int_gcd_monic(f, f.derivative())
    raise TypeError(f"unsupported polynomial type {type(f)!r}")


# ---------------------------------------------------------------------------
# Factorization over GF(p)


@dataclass(frozen=True)
class Factorization:
    """Factors as (monic irreducible, multiplicity) pairs plus the unit."""

    factors: tuple
    unit: int
    p: int

    def expand(self) -> FieldPoly:
        out = FieldPoly.constant(self.unit, self.p)
        for poly, mult in self.factors:
            out = out * poly**mult
        return out

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)


def _distinct_degree(f: FieldPoly):
    """Partial factorization of monic squarefree f into (product, degree) parts."""
    p = f.p
    parts = []
    v = f
    h = FieldPoly.x(p) % v
    d = 0
    while v.degree >= 2 * (d + 1):
        d += 1
        h = pow_mod(h, p, v)
        g = poly_gcd(v, h - FieldPoly.x(p))
        if g.degree > 0:
            parts.append((g, d))
            v = v // g
            h = h % v
    if v.degree > 0:
        parts.append((v, v.degree))
    return parts


def _random_poly(degree_bound: int, p: int, rng) -> FieldPoly:
    return FieldPoly([rng.randrange(p) for _ in range(degree_bound)], p)


def _equal_degree(f: FieldPoly, d: int, rng):
    """Split monic squarefree f, all of whose factors have degree d."""
    if f.degree == d:
        return [f]
    p = f.p
    exponent = (p**d - 1) // 2
    while True:
        r = _random_poly(f.degree, p, rng)
        if r.degree < 1:
            continue
        g = poly_gcd(f, r)
        if 0 < g.degree < f.degree:
            return _equal_degree(g, d, rng) + _equal_degree(f // g, d, rng)
        s = pow_mod(r, exponent, f)
        g = poly_gcd(f, s - FieldPoly.one(p))
        if 0 < g.degree < f.degree:
            return _equal_degree(g, d, rng) + _equal_degree(f // g, d, rng)


def factor(f: FieldPoly, rng) -> Factorization:
    """Complete factorization into monic irreducibles with multiplicities.

    Squarefree decomposition, then distinct-degree splitting with
    gcd(f, X^(p^d) - X), then Cantor-Zassenhaus equal-degree splitting.
    """
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    unit = f.leading
    result = {}
    if f.degree >= 1:
        for sqf, mult in _squarefree_decomposition_field(f.monic()):
            for part, d in _distinct_degree(sqf):
                for irr in _equal_degree(part, d, rng):
                    result[irr.monic()] = mult
    ordered = sorted(result.items(), key=lambda kv: (kv[0].degree, kv[0].coeffs))
    return Factorization(tuple(ordered), unit, f.p)


def is_irreducible(f: FieldPoly) -> bool:
    """Rabin's test: X^(p^d) == X mod f and gcd(f, X^(p^(d/r)) - X) = 1."""
    d = f.degree
    if d <= 0:
        return False
    if d == 1:
        return True
    p = f.p
    x = FieldPoly.x(p)
    for r in factorize(d):
        e = d // r
        h = x % f
        for _ in range(e):
            h = pow_mod(h, p, f)
        if poly_gcd(f, h - x).degree != 0:
            return False
    h = x % f
    for _ in range(d):
        h = pow_mod(h, p, f)
    return (h - x % f).is_zero


# ---------------------------------------------------------------------------
# Gcd-free basis


@dataclass(frozen=True)
class GcdFreeBasis:
    """Pairwise-coprime monic polynomials and exponents expressing a target."""

    basis: tuple
    exponents: tuple
    unit: int

    def expand(self, p: int) -> FieldPoly:
        out = FieldPoly.constant(self.unit, p)
        for g, e in zip(self.basis, self.exponents):
            out = out * g**e
        return out


def gcd_free_basis(polys, target: FieldPoly) -> GcdFreeBasis:
    """Pairwise-coprime refinement of ``polys`` with exponents for ``target``.

    Raises BadPrimeError when the target is not a product of powers of the
    refined basis (for modular inputs this signals a bad prime).
    """
    p = target.p
    items = []
    for f in polys:
        if f.is_zero:
            raise ValueError("gcd-free basis inputs must be nonzero")
        if f.p != p:
            raise ValueError("gcd-free basis inputs must share the modulus")
        f = f.monic()
        if f.degree > 0 and f not in items:
            items.append(f)
    refining = True
    while refining:
        refining = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                g = poly_gcd(items[i], items[j])
                if g.degree > 0 and (g != items[i] or g != items[j]):
                    a, b = items[i], items[j]
                    replacement = [g, a // g, b // g]
                    rest = [items[k] for k in range(len(items)) if k not in (i, j)]
                    items = rest
                    for r in replacement:
                        r = r.monic()
                        if r.degree > 0 and r not in items:
                            items.append(r)
                    refining = True
                    break
            if refining:
                break
    items.sort(key=lambda f: (f.degree, f.coeffs))
    exponents = []
    residual = target.monic()
    for g in items:
        e = 0
        while True:
            q, r = divmod(residual, g)
            if not r.is_zero:
                break
            residual = q
            e += 1
        exponents.append(e)
    if residual.degree > 0:
        raise BadPrimeError(
            "target polynomial is not expressible over the gcd-free basis "
            "(bad prime)"
        )
    return GcdFreeBasis(tuple(items), tuple(exponents), target.leading)


# ---------------------------------------------------------------------------
# Hensel lifting

# Helpers on integer coefficient lists reduced mod m (canonical in [0, m)).


def _zmod(a, m):
    return _strip([c % m for c in a])


def _zmul(a, b, m):
    return _zmod(_imul_lists(a, b), m)


def _zsub(a, b, m):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return _zmod(out, m)


def _zadd(a, b, m):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] += c
    return _zmod(out, m)


def _zdivmod_monic(a, b, m):
    """Division by a monic divisor with coefficients mod m."""
    if not b or b[-1] != 1:
        raise ValueError("modular division needs a monic divisor")
    rem = [c % m for c in a]
    db = len(b) - 1
    if len(rem) <= db:
        return [], _strip(rem)
    quot = [0] * (len(rem) - db)
    for k in range(len(rem) - db - 1, -1, -1):
        c = rem[k + db] % m
        if c:
            quot[k] = c
            for j in range(db + 1):
                rem[k + j] = (rem[k + j] - c * b[j]) % m
    return _strip(quot), _strip(rem[:db])


def _hensel_pair(f, g, h, s, t, p: int, target_modulus: int):
    """Quadratically lift f = g*h from mod p to mod target_modulus.

    f, g, h monic; s*g + t*h = 1 mod p with deg s < deg h, deg t < deg g.
    Coefficient lists, canonical mod the current modulus.
    """
    m = p
    while m < target_modulus:
        m2 = min(m * m, target_modulus)
        e = _zsub(_zmod(f, m2), _zmul(g, h, m2), m2)
        q, r = _zdivmod_monic(_zmul(s, e, m2), h, m2)
        g = _zadd(g, _zadd(_zmul(t, e, m2), _zmul(q, g, m2), m2), m2)
        h = _zadd(h, r, m2)
        b = _zsub(_zadd(_zmul(s, g, m2), _zmul(t, h, m2), m2), [1], m2)
        c, d = _zdivmod_monic(_zmul(s, b, m2), h, m2)
        s = _zsub(s, d, m2)
        t = _zsub(t, _zadd(_zmul(t, b, m2), _zmul(c, g, m2), m2), m2)
        m = m2
    return g, h


def _lift_tree(f, parts, p, modulus):
    """Lift monic f (coeffs mod modulus) against the mod-p factor list."""
    if len(parts) == 1:
        return [f]
    mid = len(parts) // 2
    left = parts[0]
    for q in parts[1:mid]:
        left = left * q
    right = parts[mid]
    for q in parts[mid + 1 :]:
        right = right * q
    s, t = _bezout_mod_p(left, right)
    g, h = _hensel_pair(
        f,
        list(left.coeffs),
        list(right.coeffs),
        list(s.coeffs),
        list(t.coeffs),
        p,
        modulus,
    )
    return _lift_tree(g, parts[:mid], p, modulus) + _lift_tree(h, parts[mid:], p, modulus)


def hensel_lift_basis(S: IntPoly, basis, p: int, precision_bound: int):
    """Lift pairwise-coprime monic factors of S mod p to factors mod p^k.

    k is the smallest exponent with p^k > 2*precision_bound, so any factor
    whose true integer coefficients are bounded by ``precision_bound`` is
    recovered exactly in the symmetric range.
    """
    if not S.is_monic:
        raise ValueError("Hensel lifting requires a monic target")
    product = FieldPoly.one(p)
    for g in basis:
        if not g.is_monic:
            raise ValueError("Hensel lifting requires monic basis elements")
        product = product * g
    if product != S.reduce(p):
        raise ValueError("basis does not multiply to the target mod p")
    modulus = p
    while modulus <= 2 * precision_bound:
        modulus *= p
    f = _zmod(S.coeffs, modulus)
    lifted = _lift_tree(f, list(basis), p, modulus)
    half = modulus // 2
    out = []
    for coeffs in lifted:
        out.append(IntPoly([c - modulus if c > half else c for c in coeffs]))
    return out


# ---------------------------------------------------------------------------
# CRT reconstruction


def crt_combine(residues) -> IntPoly:
    """Coefficientwise CRT of monic residues into the symmetric range.

    All residues must be monic of equal degree; on a degree mismatch the
    minority-degree residues are reported (they came from bad primes).
    """
    residues = list(residues)
    if not residues:
        raise ValueError("crt_combine needs at least one residue")
    moduli = [r.p for r in residues]
    if len(set(moduli)) != len(moduli):
        raise ValueError("crt_combine needs pairwise distinct prime moduli")
    degrees = [r.degree for r in residues]
    counts: dict[int, int] = {}
    for d in degrees:
        counts[d] = counts.get(d, 0) + 1
    majority_degree = max(counts, key=lambda d: (counts[d], d))
    if counts[majority_degree] != len(residues):
        minority = [i for i, d in enumerate(degrees) if d != majority_degree]
        raise CrtDegreeMismatchError(minority, [moduli[i] for i in minority])
    for r in residues:
        if not r.is_monic:
            raise ValueError("crt_combine expects monic residues")
    width = majority_degree + 1
    coeffs = list(residues[0].coeffs) + [0] * (width - len(residues[0].coeffs))
    modulus = residues[0].p
    for r in residues[1:]:
        p = r.p
        inv = pow(modulus % p, -1, p)
        for i in range(width):
            ri = r.coefficient(i)
            delta = (ri - coeffs[i]) % p
            coeffs[i] = coeffs[i] + modulus * (delta * inv % p)
        modulus *= p
    half = modulus // 2
    return IntPoly([c - modulus if c > half else c for c in coeffs])
