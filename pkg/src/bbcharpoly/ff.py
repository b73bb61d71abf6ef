"""Prime-field arithmetic, prime search, generators and discrete logarithms.

A field element is a canonical integer in ``[0, p-1]``; every operation
re-canonicalizes.  Moduli are odd primes of at most 2**31, checked with a
deterministic Miller-Rabin test (the chosen witness set is exact far beyond
the word-size range).

Discrete logarithms use a full exponent table when the field is small
(q < 2**20) and baby-step/giant-step above that, so large fields stay usable
without O(q) memory.
"""

from __future__ import annotations

import math

WORD_PRIME_LIMIT = 1 << 31
DLOG_TABLE_LIMIT = 1 << 20

# Exact for all n < 3.3 * 10**24 (covers the word-size range many times over).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FieldMismatchError(ValueError):
    """Operands belong to different prime fields."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for word-sized integers."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than ``n``."""
    k = n + 1
    if k <= 2:
        return 2
    if k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 2
    return k


def random_prime(rng, lo: int, hi: int) -> int:
    """Random prime in ``[lo, hi)``; raises if the interval has none."""
    if hi <= lo:
        raise ValueError("empty prime search interval")
    for _ in range(64 * (hi - lo).bit_length()):
        candidate = rng.randrange(lo, hi)
        if is_prime(candidate):
            return candidate
    # Dense scan fallback for very narrow intervals.
    for candidate in range(lo, hi):
        if is_prime(candidate):
            return candidate
    raise ValueError(f"no prime in [{lo}, {hi})")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fine for word-sized n)."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class PrimeField:
    """The field GF(p) for an odd prime p <= 2**31."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int):
            raise TypeError("modulus must be an int")
        if p == 2 or p > WORD_PRIME_LIMIT or not is_prime(p):
            raise ValueError(f"modulus must be an odd prime <= 2**31, got {p}")
        self.p = p

    def __call__(self, value: int) -> "PrimeFieldElem":
        return PrimeFieldElem(value % self.p, self)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    @property
    def zero(self) -> "PrimeFieldElem":
        return PrimeFieldElem(0, self)

    @property
    def one(self) -> "PrimeFieldElem":
        return PrimeFieldElem(1, self)


class PrimeFieldElem:
    """Element of GF(p), stored as its canonical representative."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        self.value = value % field.p
        self.field = field

    def _coerce(self, other) -> int:
        if isinstance(other, PrimeFieldElem):
            if other.field.p != self.field.p:
                raise FieldMismatchError(
                    f"GF({self.field.p}) vs GF({other.field.p})"
                )
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return PrimeFieldElem((self.value + v) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return PrimeFieldElem((self.value - v) % self.field.p, self.field)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return PrimeFieldElem((v - self.value) % self.field.p, self.field)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return PrimeFieldElem(self.value * v % self.field.p, self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if v == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.field.p})")
        return PrimeFieldElem(
            self.value * pow(v, -1, self.field.p) % self.field.p, self.field
        )

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return PrimeFieldElem(v, self.field) / self

    def __neg__(self):
        return PrimeFieldElem(-self.value % self.field.p, self.field)

    def __pow__(self, exponent: int):
        if exponent < 0 and self.value == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.field.p})")
        return PrimeFieldElem(pow(self.value, exponent, self.field.p), self.field)

    def inverse(self) -> "PrimeFieldElem":
        if self.value == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.field.p})")
        return PrimeFieldElem(pow(self.value, -1, self.field.p), self.field)

    def __int__(self) -> int:
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, PrimeFieldElem):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.value))

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"


def element_order(a: int, q: int) -> int:
    """Multiplicative order of ``a`` in GF(q)*."""
    if a % q == 0:
        raise ValueError("zero has no multiplicative order")
    order = q - 1
    for r in factorize(q - 1):
        while order % r == 0 and pow(a, order // r, q) == 1:
            order //= r
    return order


def find_generator(q) -> PrimeFieldElem:
    """Smallest generator of GF(q)*, certified by checking g^((q-1)/r) != 1
    for every prime r dividing q-1."""
    field = q if isinstance(q, PrimeField) else PrimeField(q)
    p = field.p
    radicals = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in radicals):
            return PrimeFieldElem(g, field)
    raise ValueError(f"no generator found for GF({p})")  # unreachable for prime p


class DlogContext:
    """Discrete logarithms to a fixed generator of GF(q)*.

    Small fields (q < 2**20) get a full exponent table; larger ones use
    baby-step/giant-step.  Lookups are read-only once constructed.
    """

    __slots__ = ("field", "generator", "_table", "_baby", "_giant_step", "_m")

    def __init__(self, field: PrimeField, generator: PrimeFieldElem | int | None = None):
        self.field = field
        q = field.p
        if generator is None:
            g = find_generator(field).value
        else:
            g = int(generator) % q
            if element_order(g, q) != q - 1:
                raise ValueError(f"{g} does not generate GF({q})*")
        self.generator = PrimeFieldElem(g, field)
        self._table = None
        self._baby = None
        if q < DLOG_TABLE_LIMIT:
            table = [0] * q
            acc = 1
            for e in range(q - 1):
                table[acc] = e
                acc = acc * g % q
            self._table = table
        else:
            m = math.isqrt(q - 2) + 1
            baby = {}
            acc = 1
            for j in range(m):
                baby.setdefault(acc, j)
                acc = acc * g % q
            self._baby = baby
            self._giant_step = pow(g, -m, q)
            self._m = m

    def dlog(self, a) -> int:
        """Exponent e in [0, q-2] with generator**e == a; rejects a == 0."""
        q = self.field.p
        value = int(a) % q
        if value == 0:
            raise ValueError("discrete log of zero")
        if self._table is not None:
            return self._table[value]
        cur = value
        for i in range(self._m):
            j = self._baby.get(cur)
            if j is not None:
                return (i * self._m + j) % (q - 1)
            cur = cur * self._giant_step % q
        raise ArithmeticError("baby-step/giant-step exhausted")  # unreachable


def dlog(ctx: DlogContext, a) -> int:
    return ctx.dlog(a)


def index_calculus_subprime(q: int, n: int) -> int | None:
    """Largest prime factor p of q-1 with p > n, or None if there is none.

    This is the modulus the multiplicity system is solved over; p > n makes
    multiplicities (all <= n) recoverable from their residues.
    """
    best = max(factorize(q - 1))
    return best if best > n else None


def find_index_calculus_field(
    n: int, rng=None, min_q: int | None = None
) -> tuple[int, int]:
    """Pick primes (q, p) with p > n, q = 1 + lambda*p prime and q > 2n.

    Without an rng the smallest valid p and q are returned (deterministic);
    with one, p is drawn randomly from the primes just above n.  ``min_q``
    raises the field-size floor (callers wanting smaller projection failure
    rates pass ~n^2).
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    floor = max(2 * n + 1, min_q if min_q is not None else 0)
    if floor > WORD_PRIME_LIMIT:
        raise ValueError(f"field floor {floor} exceeds the word-size bound")
    candidates: list[int] = []
    if rng is not None:
        hi = max(2 * n + 2, n + 66)
        for _ in range(8):
            try:
                candidates.append(random_prime(rng, n + 1, hi))
            except ValueError:
                break
    p = next_prime(n)
    while True:
        candidates.append(p)
        p = next_prime(p)
        if len(candidates) >= 24:
            break
    for p in candidates:
        lam = max(1, -(-floor // p))  # smallest lambda with q >= floor
        q = 1 + lam * p
        while q <= WORD_PRIME_LIMIT:
            if q > 2 * n and q >= floor and q % 2 == 1 and is_prime(q):
                return q, p
            lam += 1
            q = 1 + lam * p
    raise ValueError(f"no index-calculus field found below 2**31 for n={n}")
