"""Shared fixtures and independent reference implementations.

Every checker here is deliberately written with a different strategy than
the package modules it cross-checks: permutation scans instead of partite
backtracking, plain coefficient enumeration instead of HNF solving, minor
gcds instead of Smith form.  Tests freeze values computed by these first.
"""

import itertools
import math
from fractions import Fraction
from pathlib import Path

import pytest

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


# --- matching / packing references ---------------------------------------


def naive_pm(h) -> bool:
    """Perfect matching by recursion on the lowest unmatched vertex."""
    edges = [frozenset(e) for e in h.edges]
    if h.n % h.k != 0:
        return False

    def go(free: frozenset) -> bool:
        if not free:
            return True
        v = min(free)
        for e in edges:
            if v in e and e <= free:
                if go(free - e):
                    return True
        return False

    return go(frozenset(range(h.n)))


def perm_spans(h, vertices, pattern) -> bool:
    """Does some labelling of `vertices` realize the pattern edge-for-edge?"""
    vs = tuple(vertices)
    if len(vs) != pattern.m:
        return False
    pedges = [tuple(e) for e in pattern.graph.edges]
    host = {frozenset(e) for e in h.edges}
    for perm in itertools.permutations(vs):
        if all(frozenset(perm[i] for i in e) in host for e in pedges):
            return True
    return False


def naive_packing(h, pattern) -> bool:
    """Perfect pattern-packing by lowest-uncovered-vertex recursion."""
    if pattern.m == 0 or h.n % pattern.m != 0:
        return h.n == 0
    verts = list(range(h.n))

    def go(free: frozenset) -> bool:
        if not free:
            return True
        v = min(free)
        rest = sorted(free - {v})
        for combo in itertools.combinations(rest, pattern.m - 1):
            cand = (v,) + combo
            if perm_spans(h, cand, pattern):
                if go(free - set(cand)):
                    return True
        return False

    return go(frozenset(verts))


# --- lattice references ---------------------------------------------------


def brute_member(generators, v, bound: int) -> bool:
    """Is v an integer combination with all coefficients in [-bound, bound]?"""
    gens = [tuple(g) for g in generators]
    d = len(v)
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(gens)):
        if all(
            sum(c * g[i] for c, g in zip(coeffs, gens)) == v[i] for i in range(d)
        ):
            return True
    return False


def _det(rows) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _det(minor)
    return total


def sumzero_coords(vec, m):
    """Coordinates of vec in the basis e1-e2, ..., e_{d-1}-e_d, m*e_d.

    Valid exactly when m divides sum(vec); returns None otherwise.  This is
    an ambient basis chosen independently of the package's convention.
    """
    s = sum(vec)
    if s % m != 0:
        return None
    prefix = list(itertools.accumulate(vec))
    return tuple(prefix[:-1]) + (s // m,)


def minor_gcd_order(generators, m, d):
    """Independent coset-group order: gcd of all d x d coordinate minors.

    Returns None when the generators do not span full rank (infinite group)
    and raises ValueError if some generator falls outside the ambient
    lattice.
    """
    coords = []
    for g in generators:
        c = sumzero_coords(g, m)
        if c is None:
            raise ValueError(f"generator {g} has sum not divisible by {m}")
        coords.append(list(c))
    if len(coords) < d:
        return None
    g = 0
    for rows in itertools.combinations(coords, d):
        g = math.gcd(g, abs(_det([list(r) for r in rows])))
    return g if g != 0 else None


def box_residue_count(generators, m, d, bound: int, coeff_bound: int) -> int:
    """Count cosets among ambient vectors in [-bound, bound]^d.

    Classes vectors by brute-force difference membership; only sound when
    every relevant difference has a coefficient witness within coeff_bound,
    so callers keep the lattices small.
    """
    members = [
        v
        for v in itertools.product(range(-bound, bound + 1), repeat=d)
        if sum(v) % m == 0
    ]
    reps: list[tuple] = []
    for v in members:
        for r in reps:
            diff = tuple(a - b for a, b in zip(v, r))
            if brute_member(generators, diff, coeff_bound):
                break
        else:
            reps.append(v)
    return len(reps)


# --- misc -----------------------------------------------------------------


def edge_sets_equal(h1, h2) -> bool:
    return (
        h1.k == h2.k
        and h1.n == h2.n
        and {frozenset(e) for e in h1.edges} == {frozenset(e) for e in h2.edges}
    )


@pytest.fixture(scope="session")
def corpus_dir():
    assert CORPUS.is_dir(), "corpus fixtures missing"
    return CORPUS


@pytest.fixture(scope="session")
def manifest_path(corpus_dir):
    return corpus_dir / "manifest.json"


def frac(s) -> Fraction:
    return Fraction(s)
