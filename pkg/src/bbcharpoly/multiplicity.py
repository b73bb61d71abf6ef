"""Recovering characteristic-polynomial multiplicities of minpoly factors.

Three routes, combined by the adaptive drivers:

* kernel dimensions: the nullity of P^e(A) is m*d, and the nullities of the
  first powers P^j(A) decompose over the block census of the primary form,
  so occurrence counts of small blocks fall out of a difference scheme;
* combinatorial search: branch-and-bound over the unresolved block counts
  constrained by the total-degree and trace identities, with surviving
  candidates discriminated by determinants of shifted operators;
* discrete-log linear system: evaluating the factorization at random points
  and taking logs turns the unknown multiplicities into a linear system
  solved modulo a prime divisor p > n of q - 1.

Block counts n_{i,j} refer to the number of times the j-th power block of
factor i occurs in the primary form; the multiplicity is m_i = sum j*n_{i,j}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .blackbox import (
    BlackBoxOperator,
    PolyOfMatrix,
    ShiftedOperator,
    det_blackbox,
    rank_blackbox,
)
from .ff import DlogContext
from .poly import Factorization, FieldPoly


class InconsistentNullityError(ArithmeticError):
    """Nullity sequence cannot come from a valid block census."""


class SearchExplosionError(RuntimeError):
    """Combinatorial search exceeded the candidate cap."""


class NoCandidateError(ArithmeticError):
    """No block census satisfies the degree/trace constraints."""


class IndexCalculusFailure(RuntimeError):
    """Discrete-log system did not reach full rank or failed validation."""

    def __init__(self, message: str, rows_sampled: int = 0):
        super().__init__(message)
        self.rows_sampled = rows_sampled


@dataclass
class FactorProfile:
    """One irreducible factor of the minimal polynomial."""

    poly: FieldPoly
    degree: int
    minpoly_mult: int
    char_mult: int | None = None
    trace_coeff: int = 0

    @classmethod
    def from_poly(cls, poly: FieldPoly, minpoly_mult: int) -> "FactorProfile":
        return cls(
            poly=poly,
            degree=poly.degree,
            minpoly_mult=minpoly_mult,
            trace_coeff=poly.coefficient(poly.degree - 1),
        )


def profiles_from_factorization(fac: Factorization) -> list[FactorProfile]:
    return [FactorProfile.from_poly(poly, mult) for poly, mult in fac]


@dataclass
class OccurrenceTable:
    """Known nullities and solved block counts, per factor and power."""

    profiles: list[FactorProfile]
    nullities: list[dict[int, int]] = field(default_factory=list)
    occurrences: list[dict[int, int]] = field(default_factory=list)

    def __post_init__(self):
        if not self.nullities:
            self.nullities = [{} for _ in self.profiles]
        if not self.occurrences:
            self.occurrences = [{} for _ in self.profiles]

    def frontier(self, i: int) -> int:
        """Largest j with a computed nullity (0 when none)."""
        j = 0
        while (j + 1) in self.nullities[i]:
            j += 1
        return j

    def multiplicity(self, i: int) -> int:
        counts = self.occurrences[i]
        if set(counts) != set(range(1, self.profiles[i].minpoly_mult + 1)):
            raise ValueError(f"occurrence counts for factor {i} are incomplete")
        return sum(j * c for j, c in counts.items())

    def multiplicities(self) -> list[int]:
        return [self.multiplicity(i) for i in range(len(self.profiles))]

    def to_json_dict(self) -> dict:
        return {
            "factors": [
                {
                    "poly": list(prof.poly.coeffs),
                    "degree": prof.degree,
                    "minpoly_mult": prof.minpoly_mult,
                    "nullities": {str(j): v for j, v in self.nullities[i].items()},
                    "occurrences": {
                        str(j): v for j, v in self.occurrences[i].items()
                    },
                }
                for i, prof in enumerate(self.profiles)
            ]
        }


def nullity_multiplicity(
    A: BlackBoxOperator, P: FieldPoly, e: int, rng, repetitions: int = 2
) -> int:
    """Multiplicity of P via the nullity of P^e(A): m = (n - rank)/deg(P)."""
    n = A.dimension
    d = P.degree
    for attempt in range(2):
        r = rank_blackbox(
            PolyOfMatrix(A, P, e), rng, repetitions=repetitions + attempt
        )
        nullity = n - r
        if nullity % d == 0 and e <= nullity // d <= n // d:
            return nullity // d
    raise InconsistentNullityError(
        f"nullity {nullity} of P^{e}(A) is not a valid multiple of deg(P)={d}"
    )


def nullities_to_occurrences(
    nullities, degree: int, minpoly_mult: int | None = None
) -> list[int]:
    """Block counts n_1..n_t from consecutive nullities nu_1..nu_L.

    With L nullities the difference scheme yields t = L-1 counts; when the
    multiplicity e in the minimal polynomial is supplied and e <= L, the
    terminal count n_e is also recovered (t = e).  All divisions must be
    exact and all counts nonnegative, else the nullities were inconsistent
    (a rank estimate failed) and the caller must recompute.
    """
    nus = [int(v) for v in nullities]
    L = len(nus)
    d = degree
    if L == 0:
        raise ValueError("need at least one nullity")
    if minpoly_mult is not None and minpoly_mult <= L:
        target = minpoly_mult
    else:
        target = L - 1
    if target < 1:
        raise ValueError("not enough nullities to determine any block count")
    counts: list[int] = []
    for j in range(1, target + 1):
        if j == 1:
            if L >= 2:
                val = Fraction(2 * nus[0] - nus[1], d)
            else:  # L == 1 is only allowed when e == 1: nu_1 = n_1 * d
                val = Fraction(nus[0], d)
        elif j + 1 <= L:
            val = (
                Fraction(nus[j - 2], j - 1) + nus[j - 1] - nus[j]
            ) / d - Fraction(sum(k * counts[k - 1] for k in range(1, j)), j - 1)
        else:  # j == minpoly_mult == L: terminal formula
            val = Fraction(nus[j - 1], j * d) - Fraction(
                sum(k * counts[k - 1] for k in range(1, j)), j
            )
        if val.denominator != 1 or val < 0:
            raise InconsistentNullityError(
                f"block count for power {j} came out as {val}"
            )
        counts.append(int(val))
    return counts


def degree_trace_residual(multiplicities, profiles, n: int, trace_value: int, p: int):
    """(degree gap, trace gap); both zero iff the assignment is feasible."""
    deg_gap = n - sum(
        m * prof.degree for m, prof in zip(multiplicities, profiles)
    )
    trace_gap = (
        int(trace_value)
        + sum(m * prof.trace_coeff for m, prof in zip(multiplicities, profiles))
    ) % p
    return deg_gap, trace_gap


def combinatorial_search(
    A: BlackBoxOperator,
    profiles,
    known: OccurrenceTable,
    rng,
    *,
    trace_value: int | None = None,
    tail_counts: dict[int, int] | None = None,
    explosion_cap: int = 10**6,
    max_det_rounds: int | None = None,
    trace_log=None,
) -> dict:
    """Complete the block census by branch-and-bound plus det discrimination.

    Candidates satisfy the total-degree equation, the trace identity, the
    known counts in ``known``, optional per-factor residual block totals
    (``tail_counts``), and n_{i,e_i} >= 1.  Surviving candidates are then
    discriminated by determinants of lambda*I - A at random lambda until all
    survivors agree on the multiplicity vector; distinct censuses with equal
    multiplicities describe the same characteristic polynomial.

    Returns {(i, j): count} covering every slot of every factor.
    """
    profiles = list(profiles)
    n, p = A.dimension, A.p
    if trace_value is None:
        trace_value = int(A.trace())
    known_slots = {
        (i, j): c
        for i in range(len(profiles))
        for j, c in known.occurrences[i].items()
    }
    unknown = [
        (i, j)
        for i, prof in enumerate(profiles)
        for j in range(1, prof.minpoly_mult + 1)
        if (i, j) not in known_slots
    ]
    # largest degree contribution first, for pruning
    unknown.sort(key=lambda s: (profiles[s[0]].degree * s[1]), reverse=True)
    known_degree = sum(
        profiles[i].degree * j * c for (i, j), c in known_slots.items()
    )
    residual_degree = n - known_degree
    if residual_degree < 0:
        raise NoCandidateError("known block counts already exceed the dimension")
    remaining_slots_per_factor = [0] * len(profiles)
    for i, _ in unknown:
        remaining_slots_per_factor[i] += 1

    candidates: list[tuple[int, ...]] = []
    values = [0] * len(unknown)

    def recurse(pos: int, rem: int, tails: dict[int, int] | None):
        if len(candidates) > explosion_cap:
            raise SearchExplosionError(
                f"more than {explosion_cap} candidate censuses"
            )
        if pos == len(unknown):
            if rem == 0:
                candidates.append(tuple(values))
            return
        i, j = unknown[pos]
        weight = profiles[i].degree * j
        lo = 1 if (j == profiles[i].minpoly_mult and known.occurrences[i].get(j) is None) else 0
        hi = rem // weight
        if tails is not None and i in tails:
            hi = min(hi, tails[i])
            remaining_slots_per_factor[i] -= 1
            if remaining_slots_per_factor[i] == 0:
                lo = max(lo, tails[i])
                hi = min(hi, tails[i])
        for v in range(lo, hi + 1):
            values[pos] = v
            if tails is not None and i in tails:
                tails[i] -= v
            recurse(pos + 1, rem - v * weight, tails)
            if tails is not None and i in tails:
                tails[i] += v
        values[pos] = 0
        if tails is not None and i in tails:
            remaining_slots_per_factor[i] += 1

    tails = dict(tail_counts) if tail_counts else None
    recurse(0, residual_degree, tails)

    def mult_vector(candidate) -> tuple[int, ...]:
        mults = [0] * len(profiles)
        for (i, j), c in known_slots.items():
            mults[i] += j * c
        for (i, j), v in zip(unknown, candidate):
            mults[i] += j * v
        return tuple(mults)

    # trace identity filter (Eq over the field)
    survivors = []
    for cand in candidates:
        mults = mult_vector(cand)
        if degree_trace_residual(mults, profiles, n, trace_value, p) == (0, 0):
            survivors.append(cand)
    if not survivors:
        raise NoCandidateError(
            "no block census satisfies the degree and trace constraints"
        )

    if max_det_rounds is None:
        max_det_rounds = 4 * n + 16
    rounds = 0
    while len({mult_vector(c) for c in survivors}) > 1:
        if rounds >= max_det_rounds:
            raise NoCandidateError(
                "determinant discrimination did not isolate a candidate"
            )
        rounds += 1
        lam = rng.randrange(p)
        delta = int(det_blackbox(ShiftedOperator(A, lam), rng))
        evals = [prof.poly(lam) for prof in profiles]
        kept = []
        for cand in survivors:
            mults = mult_vector(cand)
            value = 1
            for ev, m in zip(evals, mults):
                value = value * pow(ev, m, p) % p
            if value == delta:
                kept.append(cand)
        if trace_log is not None:
            trace_log.emit(
                "search-det", lam=lam, det=delta, survivors=len(kept)
            )
        survivors = kept
        if not survivors:
            raise NoCandidateError(
                "determinant discrimination eliminated every candidate"
            )

    chosen = min(survivors)
    out = dict(known_slots)
    for (i, j), v in zip(unknown, chosen):
        out[(i, j)] = v
    return out


@dataclass
class IndexCalculusResult:
    multiplicities: dict[int, int]
    rows_sampled: int
    lambdas: list[int]


class _EchelonTracker:
    """Incremental row elimination mod p, keeping the first independent rows."""

    def __init__(self, width: int, p: int):
        self.p = p
        self.width = width
        self.rows: list[np.ndarray] = []  # reduced rows
        self.pivots: list[int] = []

    def try_add(self, row) -> bool:
        p = self.p
        w = np.array(row, dtype=np.int64) % p
        for vec, piv in zip(self.rows, self.pivots):
            f = int(w[piv])
            if f:
                w = (w - f * vec) % p
        nz = np.nonzero(w)[0]
        if len(nz) == 0:
            return False
        piv = int(nz[0])
        w = w * pow(int(w[piv]), -1, p) % p
        self.rows.append(w)
        self.pivots.append(piv)
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def solve_mod_p(rows, rhs, p: int) -> list[int]:
    """Solve a square nonsingular system mod p by Gaussian elimination."""
    k = len(rows)
    M = [[int(x) % p for x in row] + [int(b) % p] for row, b in zip(rows, rhs)]
    for col in range(k):
        piv = next((i for i in range(col, k) if M[i][col]), None)
        if piv is None:
            raise IndexCalculusFailure("system matrix is singular mod p")
        M[col], M[piv] = M[piv], M[col]
        inv = pow(M[col][col], -1, p)
        M[col] = [x * inv % p for x in M[col]]
        for i in range(k):
            if i != col and M[i][col]:
                f = M[i][col]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[col])]
    return [M[i][k] for i in range(k)]


def index_calculus(
    A: BlackBoxOperator,
    profiles,
    unknown_indices,
    Q: FieldPoly,
    ctx: DlogContext,
    subprime: int,
    rng,
    *,
    lambda_source=None,
    trace_log=None,
) -> IndexCalculusResult:
    """Multiplicities of the unresolved factors via a discrete-log system.

    Rows log P_j(lambda) mod (q-1) mod p are stacked for random lambda until
    the system has full rank k; determinants det(lambda_i I - A) are then
    taken only for the k chosen rows.  Fails after n rows without full rank,
    or when the solution violates the total-degree identity.
    """
    profiles = list(profiles)
    unknown = list(unknown_indices)
    k = len(unknown)
    if k == 0:
        raise ValueError("no unknown multiplicities to solve for")
    n = A.dimension
    q = A.p
    if ctx.field.p != q:
        raise ValueError("dlog context field differs from the operator field")
    if (q - 1) % subprime != 0 or subprime <= n:
        raise ValueError("subprime must divide q-1 and exceed the dimension")
    p = subprime
    tracker = _EchelonTracker(k, p)
    chosen: list[tuple[list[int], int, int]] = []  # (row, lambda, log gamma)
    rows_sampled = 0
    used_lambdas: set[int] = set()
    while tracker.rank < k:
        if rows_sampled >= n:
            raise IndexCalculusFailure(
                f"no full-rank system after {rows_sampled} rows",
                rows_sampled=rows_sampled,
            )
        for _ in range(64 * (n + 4)):
            lam = (
                next(lambda_source) if lambda_source is not None else rng.randrange(q)
            )
            if lam in used_lambdas:
                continue
            alphas = [profiles[j].poly(lam) for j in unknown]
            gamma = Q(lam)
            if gamma != 0 and all(a != 0 for a in alphas):
                break
        else:
            raise IndexCalculusFailure("could not sample an evaluation point")
        used_lambdas.add(lam)
        rows_sampled += 1
        row = [ctx.dlog(a) % p for a in alphas]
        log_gamma = ctx.dlog(gamma) % (q - 1) if gamma != 1 else 0
        if tracker.try_add(row):
            chosen.append((row, lam, log_gamma))
        if trace_log is not None:
            trace_log.emit(
                "ic-row", lam=lam, rank=tracker.rank, rows=rows_sampled
            )
    rhs = []
    for _, lam, log_gamma in chosen:
        det = int(det_blackbox(ShiftedOperator(A, lam), rng))
        if det == 0:
            raise IndexCalculusFailure(
                "determinant vanished at a guarded evaluation point",
                rows_sampled=rows_sampled,
            )
        rhs.append((ctx.dlog(det) - log_gamma) % (q - 1) % p)
    solution = solve_mod_p([row for row, _, _ in chosen], rhs, p)
    mults = {j: int(x) for j, x in zip(unknown, solution)}
    total = sum(profiles[j].degree * mults[j] for j in unknown)
    q_degree = Q.degree if Q.degree > 0 else 0
    if total + q_degree != n:
        raise IndexCalculusFailure(
            f"degree check failed: {total} + {q_degree} != {n}",
            rows_sampled=rows_sampled,
        )
    if trace_log is not None:
        trace_log.emit("ic-solved", rows=rows_sampled, multiplicities=mults)
    return IndexCalculusResult(mults, rows_sampled, [lam for _, lam, _ in chosen])
