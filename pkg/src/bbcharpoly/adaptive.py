"""Adaptive drivers combining the multiplicity methods over a finite field.

Four method names are exposed:

* ``nullity-comb``: cheap kernel dimensions first (slots ordered by rising
  j*d), the last few unknowns resolved by combinatorial search (threshold T);
* ``index``: invariant factors are peeled until at most ceil(sqrt(n)) factors
  remain unresolved, then one discrete-log system finishes the job;
* ``hybrid``: kernel dimensions for the degree-one multiplicity-one factors,
  an enumerated assignment block for the largest-degree factors, and one
  shared elimination whose right-hand sides sweep the assignments;
* ``invfact``: invariant factors all the way down.

``auto`` short-circuits to nullity-comb for small factor counts or fields
without a usable discrete-log subprime, and otherwise compares the predicted
rank-call load sum(j*d_i) against the index-calculus estimate k + 2*ceil(sqrt n).

Every driver validates deg = n and the trace identity before returning and
retries once with fresh randomness on an internal failure.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

import numpy as np

from .blackbox import (
    BlackBoxOperator,
    LowRankPerturbation,
    PolyOfMatrix,
    ShiftedOperator,
    det_blackbox,
    rank_blackbox,
    wiedemann_minpoly,
)
from .ff import DlogContext, PrimeField, index_calculus_subprime
from .multiplicity import (
    FactorProfile,
    InconsistentNullityError,
    IndexCalculusFailure,
    NoCandidateError,
    OccurrenceTable,
    SearchExplosionError,
    _EchelonTracker,
    combinatorial_search,
    index_calculus,
    nullities_to_occurrences,
    profiles_from_factorization,
    solve_mod_p,
)
from .poly import FieldPoly, factor, poly_gcd

METHODS = ("auto", "nullity-comb", "index", "hybrid", "invfact")


class AdaptiveError(RuntimeError):
    """A driver could not produce a validated characteristic polynomial."""


class MethodUnavailableError(AdaptiveError):
    """The requested method cannot run in this field."""


class TraceLog:
    """Structured JSON-lines record of driver decisions."""

    def __init__(self):
        self.events: list[dict] = []

    def emit(self, event: str, **fields):
        entry = {"event": event}
        entry.update(fields)
        self.events.append(entry)

    def lines(self) -> list[str]:
        return [json.dumps(e, sort_keys=True, default=str) for e in self.events]


@dataclass
class AdaptiveConfig:
    threshold: int = 5
    explosion_cap: int = 10**6
    confidence_rounds: int = 2
    method: str = "auto"
    seed: int | None = None
    jobs: int = 1
    trace_log: TraceLog | None = None

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")

    def _emit(self, event, **fields):
        if self.trace_log is not None:
            self.trace_log.emit(event, **fields)


@dataclass
class CharpolyResult:
    charpoly: FieldPoly
    minpoly: FieldPoly
    profiles: list[FactorProfile]
    multiplicities: list[int]
    method: str


def _ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def _charpoly_from(profiles, mults, p: int) -> FieldPoly:
    out = FieldPoly.one(p)
    for prof, m in zip(profiles, mults):
        out = out * prof.poly**m
    return out


def _validate(A: BlackBoxOperator, profiles, mults) -> FieldPoly:
    n, p = A.dimension, A.p
    cp = _charpoly_from(profiles, mults, p)
    if cp.degree != n:
        raise AdaptiveError(f"charpoly degree {cp.degree} != {n}")
    if (cp.coefficient(n - 1) + int(A.trace())) % p != 0:
        raise AdaptiveError("trace identity violated")
    return cp


def _compute_nullity(A, prof, j, rng, cfg, repetitions=2):
    op = PolyOfMatrix(A, prof.poly, j)
    r = rank_blackbox(op, rng, repetitions=repetitions)
    nu = A.dimension - r
    cfg._emit("rank", factor=list(prof.poly.coeffs), power=j, nullity=nu)
    return nu


def nullity_comb_search(A: BlackBoxOperator, profiles, cfg: AdaptiveConfig, rng=None):
    """Kernel dimensions until at most T slots remain, then search.

    Slots (i, j), j <= e_i, are processed by increasing j*d_i.  For each
    factor one extra nullity beyond its computed prefix pins the residual
    block total, which prunes the search sharply.
    """
    if rng is None:
        rng = random.Random(cfg.seed)
    profiles = list(profiles)
    slots = [
        (prof.degree * j, i, j)
        for i, prof in enumerate(profiles)
        for j in range(1, prof.minpoly_mult + 1)
    ]
    slots.sort()
    table = OccurrenceTable(profiles)
    remaining = len(slots)
    for _, i, j in slots:
        if remaining <= cfg.threshold:
            break
        table.nullities[i][j] = _compute_nullity(A, profiles[i], j, rng, cfg)
        remaining -= 1

    for attempt in range(2):
        try:
            tails = {}
            for i, prof in enumerate(profiles):
                ji = table.frontier(i)
                if ji < prof.minpoly_mult and (ji + 1) not in table.nullities[i]:
                    table.nullities[i][ji + 1] = _compute_nullity(
                        A, prof, ji + 1, rng, cfg
                    )
                nus = [table.nullities[i][j] for j in range(1, table.frontier(i) + 1)]
                if len(nus) >= 2 or prof.minpoly_mult == 1:
                    counts = nullities_to_occurrences(
                        nus, prof.degree, minpoly_mult=prof.minpoly_mult
                    )
                else:
                    counts = []  # a single nullity only pins the block total
                for j, c in enumerate(counts, start=1):
                    table.occurrences[i][j] = c
                if len(counts) < prof.minpoly_mult:
                    # residual block total from the frontier nullity step
                    covered = len(counts)
                    prev = table.nullities[i].get(covered, 0)
                    tails[i] = (table.nullities[i][covered + 1] - prev) // prof.degree
            census = combinatorial_search(
                A,
                profiles,
                table,
                rng,
                tail_counts=tails or None,
                explosion_cap=cfg.explosion_cap,
                trace_log=cfg.trace_log,
            )
            mults = [
                sum(j * c for (fi, j), c in census.items() if fi == i)
                for i in range(len(profiles))
            ]
            _validate(A, profiles, mults)
            for (fi, j), c in census.items():
                table.occurrences[fi][j] = c
            cfg._emit("census", table=table.to_json_dict())
            return mults
        except (InconsistentNullityError, NoCandidateError, AdaptiveError):
            if attempt == 1:
                raise
            # recompute every nullity with more repetitions and retry
            for i, prof in enumerate(profiles):
                table.occurrences[i].clear()
                for j in list(table.nullities[i]):
                    table.nullities[i][j] = _compute_nullity(
                        A, prof, j, rng, cfg, repetitions=3
                    )


def invariant_factor(
    A: BlackBoxOperator,
    j: int,
    rng,
    *,
    minpoly: FieldPoly | None = None,
    previous: FieldPoly | None = None,
    reps: int = 2,
    max_retries: int = 3,
    confidence_rounds: int = 2,
) -> FieldPoly:
    """j-th invariant factor via rank-(j-1) random additive perturbations.

    Intersects gcd(minpoly(A), minpoly(A + U V)) over `reps` draws; the
    result must divide the previous invariant factor, else fresh factors are
    drawn.
    """
    if j < 1:
        raise ValueError("invariant factor index must be >= 1")
    if minpoly is None:
        minpoly = wiedemann_minpoly(A, rng, confidence_rounds)
    if j == 1:
        return minpoly
    n, p = A.dimension, A.p
    r = j - 1
    for _ in range(max_retries):
        acc = None
        for _ in range(reps):
            U = np.array(
                [[rng.randrange(p) for _ in range(r)] for _ in range(n)],
                dtype=np.int64,
            )
            V = np.array(
                [[rng.randrange(p) for _ in range(n)] for _ in range(r)],
                dtype=np.int64,
            )
            perturbed = wiedemann_minpoly(
                LowRankPerturbation(A, U, V), rng, confidence_rounds
            )
            g = poly_gcd(minpoly, perturbed)
            acc = g if acc is None else poly_gcd(acc, g)
        if previous is None or (previous % acc).is_zero:
            return acc
    raise AdaptiveError(
        f"invariant factor {j} failed the divisibility chain check"
    )


def _peel_invariant_factors(A, profiles, cfg, rng, minpoly, stop_size, max_iters):
    """Shared loop: accumulate multiplicities from f_2, f_3, ... until at
    most `stop_size` factors remain unresolved.  Returns (mults, live set)."""
    mults = [prof.minpoly_mult for prof in profiles]
    live = set(range(len(profiles)))
    previous = minpoly
    j = 2
    iters = 0
    while len(live) > stop_size:
        iters += 1
        if iters > max_iters:
            raise AdaptiveError(
                f"invariant-factor loop exceeded {max_iters} iterations"
            )
        fj = invariant_factor(
            A,
            j,
            rng,
            minpoly=minpoly,
            previous=previous,
            confidence_rounds=cfg.confidence_rounds,
        )
        cfg._emit("invfact", index=j, degree=fj.degree)
        for i in sorted(live):
            alpha = 0
            rest = fj
            while True:
                q, rem = divmod(rest, profiles[i].poly)
                if not rem.is_zero:
                    break
                rest = q
                alpha += 1
            if alpha == 0:
                live.discard(i)
            else:
                mults[i] += alpha
        previous = fj
        j += 1
        if fj.degree == 0:
            break
    return mults, live


def invfact_multiplicities(A, profiles, cfg, rng, minpoly):
    """Resolve every factor by peeling invariant factors until none remain."""
    mults, live = _peel_invariant_factors(
        A, profiles, cfg, rng, minpoly, stop_size=0, max_iters=A.dimension + 1
    )
    return mults


def _alg5_multiplicities(A, profiles, cfg, rng, minpoly, ctx, subprime):
    """Invariant factors down to ceil(sqrt(n)) unknowns, then the log system."""
    n = A.dimension
    cap = _ceil_sqrt(n)
    mults, live = _peel_invariant_factors(
        A, profiles, cfg, rng, minpoly, stop_size=cap, max_iters=cap
    )
    if live:
        Q = FieldPoly.one(A.p)
        for i in range(len(profiles)):
            if i not in live:
                Q = Q * profiles[i].poly ** mults[i]
        unknown = sorted(live)
        result = None
        for attempt in range(2):
            try:
                result = index_calculus(
                    A,
                    profiles,
                    unknown,
                    Q,
                    ctx,
                    subprime,
                    rng,
                    trace_log=cfg.trace_log,
                )
                break
            except IndexCalculusFailure:
                if attempt == 1:
                    cfg._emit("fallback", to="nullity-comb")
                    return nullity_comb_search(
                        A,
                        profiles,
                        AdaptiveConfig(
                            threshold=cfg.threshold,
                            explosion_cap=1 << 62,
                            confidence_rounds=cfg.confidence_rounds,
                            method="nullity-comb",
                            trace_log=cfg.trace_log,
                        ),
                        rng,
                    )
        for i in unknown:
            mults[i] = result.multiplicities[i]
    return mults


def hybrid_multiplicities(A, profiles, cfg, ctx, subprime, rng=None):
    """Kernel dimensions for cheap factors, enumeration for the big ones,
    one shared elimination for the rest.

    The split s over the largest-degree factors minimizes the cost estimate
    2*m*n*Omega + (2/3)m^3 + 4*m^2*tau_s where m is the residual system
    dimension and tau_s the number of enumerated assignments; every
    assignment shifts the right-hand side of the same eliminated system and
    survivors are discriminated by the total-degree identity.
    """
    if rng is None:
        rng = random.Random(cfg.seed)
    profiles = list(profiles)
    n, q = A.dimension, A.p
    p = subprime
    mults: list[int | None] = [None] * len(profiles)
    cheap = [
        i
        for i, prof in enumerate(profiles)
        if prof.degree == 1 and prof.minpoly_mult == 1
    ]
    for i in cheap:
        op = PolyOfMatrix(A, profiles[i].poly, 1)
        mults[i] = n - rank_blackbox(op, rng)
        cfg._emit("hybrid-nullity", factor=i, multiplicity=mults[i])
    rest = sorted(
        (i for i in range(len(profiles)) if mults[i] is None),
        key=lambda i: profiles[i].degree,
        reverse=True,
    )
    known_degree = sum(mults[i] * profiles[i].degree for i in cheap)
    if not rest:
        if known_degree != n:
            raise AdaptiveError("nullity-resolved degrees do not sum to n")
        return [int(m) for m in mults]

    floor_degree = {i: profiles[i].degree * profiles[i].minpoly_mult for i in rest}

    def enumerate_assignments(indices, budget, cap):
        """All multiplicity tuples with m_i >= e_i and sum d_i m_i <= budget."""
        out = [[]]
        for idx in indices:
            d = profiles[idx].degree
            e = profiles[idx].minpoly_mult
            new = []
            for partial in out:
                used = sum(
                    profiles[j].degree * v for j, v in zip(indices, partial)
                )
                for m in range(e, (budget - used) // d + 1):
                    new.append(partial + [m])
                    if len(new) > cap:
                        return None
            out = new
        return [tuple(t) for t in out]

    best = None
    omega = A.cost
    tau_cap = 10**4
    for s in range(0, min(8, len(rest)) + 1):
        m_dim = len(rest) - s
        budget = n - known_degree - sum(floor_degree[i] for i in rest[s:])
        assignments = enumerate_assignments(rest[:s], budget, tau_cap)
        if assignments is None:
            continue
        tau = max(1, len(assignments))
        cost = 2 * m_dim * n * omega + (2 * m_dim**3) / 3 + 4 * m_dim**2 * tau
        if best is None or cost < best[0]:
            best = (cost, s, assignments)
    if best is None:
        raise AdaptiveError("no feasible enumeration split")
    _, s, assignments = best
    cfg._emit("hybrid-split", s=s, assignments=len(assignments), system=len(rest) - s)
    enum_set = rest[:s]
    unknown = rest[s:]

    if not assignments:
        raise AdaptiveError("enumeration produced no candidate assignments")

    q_base = FieldPoly.one(q)
    for i in cheap:
        q_base = q_base * profiles[i].poly ** mults[i]

    if not unknown:
        candidates = [
            dict(zip(enum_set, assign)) for assign in assignments
        ]
    else:
        k = len(unknown)
        chosen = []
        used = set()
        sampled = 0
        tracker = _EchelonTracker(k, p)
        while tracker.rank < k:
            if sampled >= n:
                raise AdaptiveError("hybrid system never reached full rank")
            for _ in range(64 * (n + 4)):
                lam = rng.randrange(q)
                if lam in used:
                    continue
                if q_base(lam) == 0:
                    continue
                if any(profiles[i].poly(lam) == 0 for i in rest):
                    continue
                break
            else:
                raise AdaptiveError("could not sample an evaluation point")
            used.add(lam)
            sampled += 1
            row = [ctx.dlog(profiles[i].poly(lam)) % p for i in unknown]
            if tracker.try_add(row):
                chosen.append((row, lam))
        base_b = []
        enum_logs = []  # per chosen row: logs of the enumerated factors
        for row, lam in chosen:
            det = int(det_blackbox(ShiftedOperator(A, lam), rng))
            if det == 0:
                raise AdaptiveError("determinant vanished at a guarded point")
            base = (ctx.dlog(det) - ctx.dlog(q_base(lam))) % (q - 1) % p
            base_b.append(base)
            enum_logs.append([ctx.dlog(profiles[i].poly(lam)) % p for i in enum_set])
        B = [row for row, _ in chosen]
        candidates = []
        for assign in assignments:
            rhs = [
                (base_b[r] - sum(a * lg for a, lg in zip(assign, enum_logs[r]))) % p
                for r in range(k)
            ]
            try:
                x = solve_mod_p(B, rhs, p)
            except IndexCalculusFailure:
                continue
            cand = dict(zip(enum_set, assign))
            cand.update(dict(zip(unknown, x)))
            candidates.append(cand)

    survivors = []
    for cand in candidates:
        total = known_degree + sum(
            profiles[i].degree * cand[i] for i in rest
        )
        if total == n:
            survivors.append(cand)
    max_rounds = 4 * n + 16
    rounds = 0
    while len(survivors) > 1:
        if rounds >= max_rounds:
            raise AdaptiveError("hybrid discrimination did not converge")
        rounds += 1
        lam = rng.randrange(q)
        delta = int(det_blackbox(ShiftedOperator(A, lam), rng))
        kept = []
        for cand in survivors:
            value = 1
            for i in cheap:
                value = value * pow(profiles[i].poly(lam), mults[i], q) % q
            for i in rest:
                value = value * pow(profiles[i].poly(lam), cand[i], q) % q
            if value == delta:
                kept.append(cand)
        survivors = kept
    if not survivors:
        raise AdaptiveError("hybrid search eliminated every assignment")
    winner = survivors[0]
    for i in rest:
        mults[i] = int(winner[i])
    return [int(m) for m in mults]


def _choose_method(A, profiles, cfg) -> tuple[str, int | None]:
    n, q = A.dimension, A.p
    subprime = index_calculus_subprime(q, n)
    if cfg.method != "auto":
        if cfg.method in ("index", "hybrid") and subprime is None:
            raise MethodUnavailableError(
                f"GF({q}) has no prime factor of q-1 exceeding n={n}; "
                f"the {cfg.method} method needs one"
            )
        return cfg.method, subprime
    k = len(profiles)
    if subprime is None or k <= cfg.threshold:
        return "nullity-comb", subprime
    cost_nc = sum(
        prof.degree * j
        for prof in profiles
        for j in range(1, prof.minpoly_mult + 1)
    )
    cost_ic = k + 2 * _ceil_sqrt(n)
    return ("nullity-comb" if cost_nc < cost_ic else "index"), subprime


def charpoly_with_details(A: BlackBoxOperator, cfg: AdaptiveConfig | None = None):
    """Run the adaptive pipeline; returns a CharpolyResult."""
    if cfg is None:
        cfg = AdaptiveConfig()
    rng = random.Random(cfg.seed)
    n, q = A.dimension, A.p
    last_error = None
    for attempt in range(2):
        try:
            minpoly = wiedemann_minpoly(A, rng, cfg.confidence_rounds)
            fac = factor(minpoly, rng)
            profiles = profiles_from_factorization(fac)
            if sum(pr.degree * pr.minpoly_mult for pr in profiles) == n:
                mults = [pr.minpoly_mult for pr in profiles]
                cfg._emit("method", chosen="trivial", reason="minpoly degree = n")
                cp = _validate(A, profiles, mults)
                return CharpolyResult(cp, minpoly, profiles, mults, "trivial")
            method, subprime = _choose_method(A, profiles, cfg)
            cfg._emit("method", chosen=method, factors=len(profiles))
            if method in ("index", "hybrid"):
                ctx = DlogContext(PrimeField(q))
            if method == "nullity-comb":
                mults = nullity_comb_search(A, profiles, cfg, rng)
            elif method == "index":
                mults = _alg5_multiplicities(
                    A, profiles, cfg, rng, minpoly, ctx, subprime
                )
            elif method == "hybrid":
                mults = hybrid_multiplicities(A, profiles, cfg, ctx, subprime, rng)
            elif method == "invfact":
                mults = invfact_multiplicities(A, profiles, cfg, rng, minpoly)
            else:  # pragma: no cover
                raise AdaptiveError(f"unknown method {method}")
            cp = _validate(A, profiles, mults)
            return CharpolyResult(cp, minpoly, profiles, mults, method)
        except MethodUnavailableError:
            raise
        except (
            AdaptiveError,
            InconsistentNullityError,
            IndexCalculusFailure,
            NoCandidateError,
            SearchExplosionError,
        ) as err:
            last_error = err
            cfg._emit("retry", error=str(err))
    raise AdaptiveError(f"adaptive driver failed twice: {last_error}")


def blackbox_charpoly_field(
    A: BlackBoxOperator, cfg: AdaptiveConfig | None = None
) -> FieldPoly:
    """Characteristic polynomial of a black-box operator over GF(p)."""
    return charpoly_with_details(A, cfg).charpoly
