"""Black-box operators over GF(p) and the Wiedemann kernels.

An operator exposes only its dimension and ``apply(vector)``; vectors are
dense numpy int64 arrays with canonical entries in ``[0, p)``.  All mod-p
reductions are arranged so no intermediate exceeds int64: elementwise
products are reduced before summation, and sparse row sums use a cumsum
whose total stays below ``nnz * p``.

The kernels: minimal polynomial via Berlekamp-Massey on projected Krylov
sequences (with an annihilation certificate), rank and determinant via
random diagonal preconditioning, and trace.  Rank estimates never exceed
the true rank (any Berlekamp-Massey generator divides the true minimal
polynomial), so repetition takes a max.
"""

from __future__ import annotations

import numpy as np

from .ff import PrimeField, PrimeFieldElem
from .poly import FieldPoly, poly_lcm


class MinpolyNotCertifiedError(ArithmeticError):
    """Candidate minimal polynomial failed the annihilation check."""


class DetNotCertifiedError(ArithmeticError):
    """Determinant preconditioning failed to produce a full-degree minpoly."""


def random_vector(n: int, p: int, rng) -> np.ndarray:
    return np.array([rng.randrange(p) for _ in range(n)], dtype=np.int64)


def _dot_mod(u: np.ndarray, v: np.ndarray, p: int) -> int:
    # (u*v) % p keeps every summand < p; the sum then fits easily in int64.
    return int(np.sum(u * v % p) % p)


class BlackBoxOperator:
    """Linear map known only through matrix-vector products."""

    def __init__(self, dimension: int, p: int, cost: int):
        self.dimension = dimension
        self.p = p
        self.cost = cost  # estimated scalar operations per apply

    def apply(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def trace(self) -> PrimeFieldElem:
        return trace_generic(self)


def trace_generic(A: BlackBoxOperator) -> PrimeFieldElem:
    """Trace via n applies of unit vectors."""
    n, p = A.dimension, A.p
    total = 0
    e = np.zeros(n, dtype=np.int64)
    for i in range(n):
        e[i] = 1
        total += int(A.apply(e)[i])
        e[i] = 0
    return PrimeField(p)(total)


def trace(A, p: int | None = None) -> PrimeFieldElem:
    """Trace of an operator, or of a SparseMatrix reduced mod p."""
    if isinstance(A, SparseMatrix):
        if p is None:
            raise ValueError("trace of a SparseMatrix needs a modulus")
        return PrimeField(p)(A.diagonal_sum())
    return A.trace()


class SparseMatrix:
    """Row-sorted nonzero triples with per-row offsets; integer entries."""

    __slots__ = ("n", "entries", "indptr")

    def __init__(self, n: int, entries):
        self.n = n
        self.entries = tuple(sorted(entries))
        seen = set()
        indptr = [0] * (n + 1)
        for row, col, val in self.entries:
            if not (0 <= row < n and 0 <= col < n):
                raise ValueError(f"entry ({row}, {col}) outside {n}x{n}")
            if val == 0:
                raise ValueError(f"explicit zero stored at ({row}, {col})")
            if (row, col) in seen:
                raise ValueError(f"duplicate entry at ({row}, {col})")
            seen.add((row, col))
            indptr[row + 1] += 1
        for i in range(n):
            indptr[i + 1] += indptr[i]
        self.indptr = tuple(indptr)

    @classmethod
    def from_dense(cls, rows) -> "SparseMatrix":
        n = len(rows)
        entries = [
            (i, j, int(v))
            for i, row in enumerate(rows)
            for j, v in enumerate(row)
            if v
        ]
        return cls(n, entries)

    def to_dense(self):
        out = [[0] * self.n for _ in range(self.n)]
        for row, col, val in self.entries:
            out[row][col] = val
        return out

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def diagonal_sum(self) -> int:
        return sum(v for r, c, v in self.entries if r == c)

    def max_abs(self) -> int:
        return max((abs(v) for _, _, v in self.entries), default=0)

    def operator(self, p: int) -> "SparseOperator":
        return SparseOperator(self, p)

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.n == other.n
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.n, self.entries))

    def __repr__(self):
        return f"SparseMatrix(n={self.n}, nnz={self.nnz})"


class SparseOperator(BlackBoxOperator):
    """CSR apply of a SparseMatrix reduced mod p."""

    def __init__(self, matrix: SparseMatrix, p: int):
        kept = [(r, c, v % p) for r, c, v in matrix.entries if v % p]
        super().__init__(matrix.n, p, cost=2 * len(kept) + matrix.n)
        n = matrix.n
        indptr = [0] * (n + 1)
        for r, _, _ in kept:
            indptr[r + 1] += 1
        for i in range(n):
            indptr[i + 1] += indptr[i]
        self._indptr = np.array(indptr, dtype=np.int64)
        self._cols = np.array([c for _, c, _ in kept], dtype=np.int64)
        self._vals = np.array([v for _, _, v in kept], dtype=np.int64)
        self._diag = sum(v for r, c, v in kept if r == c) % p

    def apply(self, v: np.ndarray) -> np.ndarray:
        if len(self._vals) == 0:
            return np.zeros(self.dimension, dtype=np.int64)
        t = self._vals * v[self._cols] % self.p
        c = np.concatenate((np.zeros(1, dtype=np.int64), np.cumsum(t)))
        return (c[self._indptr[1:]] - c[self._indptr[:-1]]) % self.p

    def trace(self) -> PrimeFieldElem:
        return PrimeField(self.p)(self._diag)


class PolyOfMatrix(BlackBoxOperator):
    """P(A)^e as an operator; Horner needs deg(P) applies of A per round."""

    def __init__(self, base: BlackBoxOperator, poly: FieldPoly, power: int = 1):
        if poly.p != base.p:
            raise ValueError("polynomial and operator moduli differ")
        if poly.degree < 0:
            raise ValueError("zero polynomial of a matrix")
        super().__init__(
            base.dimension,
            base.p,
            cost=power * poly.degree * base.cost + 2 * base.dimension,
        )
        self.base = base
        self.poly = poly
        self.power = power

    def apply(self, v: np.ndarray) -> np.ndarray:
        p = self.p
        coeffs = self.poly.coeffs
        w = v
        for _ in range(self.power):
            src = w
            acc = coeffs[-1] * src % p
            for i in range(len(coeffs) - 2, -1, -1):
                acc = (self.base.apply(acc) + coeffs[i] * src) % p
            w = acc
        return w


class ShiftedOperator(BlackBoxOperator):
    """lambda*I - A."""

    def __init__(self, base: BlackBoxOperator, shift: int):
        super().__init__(base.dimension, base.p, cost=base.cost + 2 * base.dimension)
        self.base = base
        self.shift = shift % base.p

    def apply(self, v: np.ndarray) -> np.ndarray:
        return (self.shift * v - self.base.apply(v)) % self.p


class LowRankPerturbation(BlackBoxOperator):
    """A + U*V with U of shape (n, r) and V of shape (r, n)."""

    def __init__(self, base: BlackBoxOperator, U: np.ndarray, V: np.ndarray):
        n = base.dimension
        U = np.asarray(U, dtype=np.int64) % base.p
        V = np.asarray(V, dtype=np.int64) % base.p
        if U.shape[0] != n or V.shape[1] != n or U.shape[1] != V.shape[0]:
            raise ValueError("perturbation factor shapes are inconsistent")
        r = U.shape[1]
        super().__init__(n, base.p, cost=base.cost + 4 * n * r)
        self.base = base
        self.U = U
        self.V = V

    def apply(self, v: np.ndarray) -> np.ndarray:
        p = self.p
        w = np.sum(self.V * v[None, :] % p, axis=1) % p
        uv = np.sum(self.U * w[None, :] % p, axis=1) % p
        return (self.base.apply(v) + uv) % p


def _conv_mod(c: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """np.convolve(c, v) % p, splitting c when int64 could overflow."""
    if (len(c) + len(v)) * p * p < (1 << 62):
        return np.convolve(c, v) % p
    ch, cl = c >> 16, c & 0xFFFF
    return ((np.convolve(ch, v) % p << 16) + np.convolve(cl, v) % p) % p


def _toeplitz_lower(c: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Unit lower-triangular Toeplitz apply; c is the first column, c[0]=1."""
    return _conv_mod(c, v, p)[: len(v)]


def _toeplitz_upper(c: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Unit upper-triangular Toeplitz apply; c is the first row, c[0]=1."""
    return _conv_mod(c[::-1], v, p)[len(v) - 1 :]


class _RankPreconditioner(BlackBoxOperator):
    """L * A * U * D with unit-triangular Toeplitz L, U and a diagonal D.

    The triangular pair forces a generic rank profile with high probability
    (two-sided diagonals alone demonstrably fail on block-Jordan powers),
    and the diagonal separates the nonzero eigenvalues, so the minimal
    polynomial degree reveals the rank.
    """

    def __init__(self, base: BlackBoxOperator, rng):
        n, p = base.dimension, base.p
        super().__init__(n, p, cost=base.cost + 5 * n)
        self.base = base
        self.lc = np.array(
            [1] + [rng.randrange(p) for _ in range(n - 1)], dtype=np.int64
        )
        self.uc = np.array(
            [1] + [rng.randrange(p) for _ in range(n - 1)], dtype=np.int64
        )
        self.d = np.array([rng.randrange(1, p) for _ in range(n)], dtype=np.int64)

    def apply(self, v: np.ndarray) -> np.ndarray:
        w = self.d * v % self.p
        w = _toeplitz_upper(self.uc, w, self.p)
        w = self.base.apply(w)
        return _toeplitz_lower(self.lc, w, self.p)


class _DetPreconditioner(BlackBoxOperator):
    """L * D * A * U; unit-triangular factors keep det = det(D) * det(A).

    The diagonal makes the spectrum squarefree with high probability and the
    Toeplitz sandwich breaks repeated-eigenvalue structure (a diagonal alone
    fails persistently on identity-like blocks over small fields).
    """

    def __init__(self, base: BlackBoxOperator, rng):
        n, p = base.dimension, base.p
        super().__init__(n, p, cost=base.cost + 5 * n)
        self.base = base
        self.lc = np.array(
            [1] + [rng.randrange(p) for _ in range(n - 1)], dtype=np.int64
        )
        self.uc = np.array(
            [1] + [rng.randrange(p) for _ in range(n - 1)], dtype=np.int64
        )
        self.d = np.array([rng.randrange(1, p) for _ in range(n)], dtype=np.int64)

    def det_diag(self) -> int:
        out = 1
        for entry in self.d:
            out = out * int(entry) % self.p
        return out

    def apply(self, v: np.ndarray) -> np.ndarray:
        w = _toeplitz_upper(self.uc, v, self.p)
        w = self.d * self.base.apply(w) % self.p
        return _toeplitz_lower(self.lc, w, self.p)


class CountingOperator(BlackBoxOperator):
    """Wrapper that counts applies; used for cost accounting."""

    def __init__(self, base: BlackBoxOperator):
        super().__init__(base.dimension, base.p, base.cost)
        self.base = base
        self.applies = 0

    def apply(self, v: np.ndarray) -> np.ndarray:
        self.applies += 1
        return self.base.apply(v)


class BerlekampMassey:
    """Incremental minimal linear recurrence of a sequence over GF(p)."""

    def __init__(self, p: int, capacity: int):
        self.p = p
        self._seq = np.zeros(capacity, dtype=np.int64)
        self._C = np.zeros(capacity + 1, dtype=np.int64)
        self._B = np.zeros(capacity + 1, dtype=np.int64)
        self._C[0] = 1
        self._B[0] = 1
        self.L = 0
        self._m = 1
        self._b = 1
        self.count = 0
        self._last_change = -1

    def add(self, term: int):
        p = self.p
        i = self.count
        self._seq[i] = term % p
        window = self._seq[i - self.L : i + 1][::-1]
        d = int(np.sum(self._C[: self.L + 1] * window % p) % p)
        if d == 0:
            self._m += 1
        elif 2 * self.L <= i:
            snapshot = self._C.copy()
            coef = d * pow(self._b, -1, p) % p
            m = self._m
            self._C[m:] = (self._C[m:] - coef * self._B[: len(self._B) - m]) % p
            self.L = i + 1 - self.L
            self._B = snapshot
            self._b = d
            self._m = 1
            self._last_change = i
        else:
            coef = d * pow(self._b, -1, p) % p
            m = self._m
            self._C[m:] = (self._C[m:] - coef * self._B[: len(self._B) - m]) % p
            self._m += 1
            self._last_change = i
        self.count += 1

    @property
    def stable_for(self) -> int:
        return self.count - 1 - self._last_change

    def generator(self) -> FieldPoly:
        """Monic minimal generator: X^L * C(1/X)."""
        rev = [int(self._C[self.L - j]) for j in range(self.L + 1)]
        return FieldPoly(rev, self.p)


def berlekamp_massey(seq, p: int) -> FieldPoly:
    bm = BerlekampMassey(p, len(seq))
    for term in seq:
        bm.add(term)
    return bm.generator()


def _annihilates(A: BlackBoxOperator, poly: FieldPoly, rng) -> bool:
    """Check poly(A) * w == 0 for one fresh random w (Horner)."""
    n, p = A.dimension, A.p
    w = random_vector(n, p, rng)
    coeffs = poly.coeffs
    acc = coeffs[-1] * w % p
    for i in range(len(coeffs) - 2, -1, -1):
        acc = (A.apply(acc) + coeffs[i] * w) % p
    return not acc.any()


def wiedemann_minpoly(
    A: BlackBoxOperator,
    rng,
    confidence_rounds: int = 2,
    early_termination: bool = False,
) -> FieldPoly:
    """Minimal polynomial of A with an annihilation certificate.

    Berlekamp-Massey generators of the projected sequences u . A^i v always
    divide the true minimal polynomial, so the lcm over rounds can only grow
    toward it.  A result of full degree n needs no certificate; otherwise a
    random annihilation check must pass, and failing it buys extra rounds up
    to three times confidence_rounds before giving up.
    """
    n, p = A.dimension, A.p
    result = FieldPoly.one(p)
    max_rounds = max(3 * confidence_rounds, confidence_rounds + 2)
    needed = confidence_rounds
    for rounds in range(1, max_rounds + 1):
        u = random_vector(n, p, rng)
        v = random_vector(n, p, rng)
        bm = BerlekampMassey(p, 2 * n)
        w = v
        for i in range(2 * n):
            bm.add(_dot_mod(u, w, p))
            if early_termination and bm.L > 0 and bm.stable_for >= 2 * bm.L + 10:
                break
            if i < 2 * n - 1:
                w = A.apply(w)
        gen = bm.generator()
        if gen.degree > 0:
            result = poly_lcm(result, gen) if result.degree > 0 else gen
        if rounds >= needed:
            if result.degree == n:
                return result  # maximal-degree divisor is the minpoly itself
            if result.degree >= 1 and _annihilates(A, result, rng):
                return result
            needed = rounds + 1
    raise MinpolyNotCertifiedError(
        f"minpoly not certified after {max_rounds} rounds (n={n}, p={p})"
    )


def rank_blackbox(
    A: BlackBoxOperator, rng, repetitions: int = 2, max_trials: int = 8
) -> int:
    """Rank via minpoly of a Toeplitz/diagonal-preconditioned operator.

    Estimates only err low (any certified minpoly divides the true one), so
    the max over trials is kept; sampling stops after `repetitions`
    consecutive trials without improvement.
    """
    best = None
    streak = 0
    for _ in range(max_trials):
        try:
            m = wiedemann_minpoly(_RankPreconditioner(A, rng), rng, confidence_rounds=1)
        except MinpolyNotCertifiedError:
            continue  # one-sided estimates make a skipped trial harmless
        est = m.degree - 1 if m.coefficient(0) == 0 else m.degree
        if best is None or est > best:
            best = est
            streak = 1
        else:
            streak += 1
        if streak >= max(1, repetitions):
            break
    if best is None:
        raise MinpolyNotCertifiedError("rank estimation produced no usable trial")
    return best


def det_blackbox(A: BlackBoxOperator, rng, retries: int = 4) -> PrimeFieldElem:
    """Determinant via minpoly of a det-preserving preconditioned operator.

    A full-degree minpoly certifies det = (-1)^n * c0 / det(D); any X factor
    certifies singularity (the generator divides the true minpoly, so X | m
    implies 0 is an eigenvalue of the preconditioned operator, hence of A up
    to the invertible factors).
    """
    n, p = A.dimension, A.p
    field = PrimeField(p)
    for _ in range(retries):
        pre = _DetPreconditioner(A, rng)
        try:
            m = wiedemann_minpoly(pre, rng, confidence_rounds=1)
        except MinpolyNotCertifiedError:
            continue
        if m.coefficient(0) == 0:
            return field.zero
        if m.degree == n:
            det_scaled = m.coefficient(0) if n % 2 == 0 else -m.coefficient(0)
            return field(det_scaled * pow(pre.det_diag(), -1, p))
    raise DetNotCertifiedError(
        f"determinant not certified after {retries} preconditioned attempts"
    )


# ---------------------------------------------------------------------------
# Canonical-form constructions


def _negated_coeffs(poly):
    if isinstance(poly, FieldPoly):
        return [(-c) % poly.p for c in poly.coeffs[:-1]]
    return [-c for c in poly.coeffs[:-1]]


def build_companion(poly) -> SparseMatrix:
    """Companion matrix: subdiagonal ones, last column -a_i."""
    if not poly.is_monic:
        raise ValueError("companion matrix needs a monic polynomial")
    d = poly.degree
    if d < 1:
        raise ValueError("companion matrix needs degree >= 1")
    entries = [(i + 1, i, 1) for i in range(d - 1)]
    for i, v in enumerate(_negated_coeffs(poly)):
        if v:
            entries.append((i, d - 1, v))
    return SparseMatrix(d, entries)


def build_block_jordan(poly, k: int) -> SparseMatrix:
    """k companion blocks of poly coupled by B blocks with B[d-1][0] = 1."""
    if k < 1:
        raise ValueError("block count must be >= 1")
    if not poly.is_monic:
        raise ValueError("block Jordan matrix needs a monic polynomial")
    d = poly.degree
    neg = _negated_coeffs(poly)
    entries = []
    for b in range(k):
        off = b * d
        entries.extend((off + i + 1, off + i, 1) for i in range(d - 1))
        entries.extend((off + i, off + d - 1, v) for i, v in enumerate(neg) if v)
        if b + 1 < k:
            entries.append((off + d - 1, off + d, 1))
    return SparseMatrix(k * d, entries)


def block_diagonal(blocks) -> SparseMatrix:
    """Direct sum of SparseMatrix blocks."""
    entries = []
    offset = 0
    for block in blocks:
        entries.extend((offset + r, offset + c, v) for r, c, v in block.entries)
        offset += block.n
    return SparseMatrix(offset, entries)
