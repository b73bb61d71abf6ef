"""Shared constructions for the test suite."""

from bbcharpoly.blackbox import SparseMatrix, block_diagonal, build_block_jordan
from bbcharpoly.poly import FieldPoly, is_irreducible


def linear(a, p):
    return FieldPoly([-a, 1], p)


def rand_irreducible(d, p, rng):
    while True:
        f = FieldPoly([rng.randrange(p) for _ in range(d)] + [1], p)
        if is_irreducible(f):
            return f


def distinct_irreducibles(count, max_degree, p, rng):
    out = []
    while len(out) < count:
        f = rand_irreducible(rng.randrange(1, max_degree + 1), p, rng)
        if f not in out:
            out.append(f)
    return out


def planted_primary_form(census, p):
    """Block-diagonal matrix from a [(poly, {power: count})] block census.

    Returns (matrix, expected multiplicities aligned with the census order).
    """
    parts = []
    mults = []
    for poly, counts in census:
        m = 0
        for j, c in sorted(counts.items()):
            for _ in range(c):
                parts.append(build_block_jordan(poly, j))
            m += j * c
        mults.append(m)
    return block_diagonal(parts), mults


def random_sparse_matrix(n, p, rng, min_per_row=2, max_per_row=10):
    entries = {}
    for i in range(n):
        for _ in range(rng.randrange(min_per_row, max_per_row + 1)):
            j = rng.randrange(n)
            v = rng.randrange(1, p)
            entries[(i, j)] = v
    return SparseMatrix(n, [(i, j, v) for (i, j), v in entries.items()])


def random_census_instance(rng, max_factors=4, max_e=3, max_d=2, pad_blocks=2):
    """Planted primary form over an index-calculus-compatible field.

    Returns (matrix, factor polys, census dict, multiplicities, q, p).
    """
    from bbcharpoly.ff import find_index_calculus_field

    k = rng.randrange(2, max_factors + 1)
    shapes = []
    n = 0
    for _ in range(k):
        d = rng.randrange(1, max_d + 1)
        e = rng.randrange(1, max_e + 1)
        counts = {j: rng.randrange(0, pad_blocks + 1) for j in range(1, e + 1)}
        counts[e] = max(1, counts.get(e, 0))
        shapes.append((d, counts))
        n += d * sum(j * c for j, c in counts.items())
    q, p = find_index_calculus_field(n, rng)
    polys = distinct_irreducibles(k, max_d, q, rng)
    polys = [
        f if f.degree == d else rand_irreducible(d, q, rng)
        for f, (d, _) in zip(polys, shapes)
    ]
    # re-draw until degrees match and all polys distinct
    while len(set(polys)) != k or any(
        f.degree != d for f, (d, _) in zip(polys, shapes)
    ):
        polys = [rand_irreducible(d, q, rng) for d, _ in shapes]
    census = [(f, counts) for f, (_, counts) in zip(polys, shapes)]
    matrix, mults = planted_primary_form(census, q)
    return matrix, polys, [c for _, c in census], mults, q, p


def random_sparse_integer_matrix(n, rng, lo=-9, hi=9, min_per_row=2, max_per_row=10):
    entries = {}
    for i in range(n):
        for _ in range(rng.randrange(min_per_row, max_per_row + 1)):
            j = rng.randrange(n)
            v = rng.randrange(lo, hi + 1)
            if v:
                entries[(i, j)] = v
    return SparseMatrix(n, [(i, j, v) for (i, j), v in entries.items()])
