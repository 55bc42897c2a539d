"""Instance generators: barrier constructions, hardness-reduction transformers,
and seeded random hosts for the test corpus.

All generators are deterministic functions of their parameters (including the
seed), so regenerated corpora are byte-identical in the .khg serialisation.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from .hgraph import Hypergraph
from .pattern import Pattern, partite_stats

__all__ = [
    "NonLinearInputError",
    "GenBudgetError",
    "is_linear",
    "gen_divisibility_barrier",
    "gen_space_barrier",
    "gen_complete",
    "gen_complete_partite",
    "gen_complete_multipartite_graph",
    "gen_union_of_cliques",
    "reduce_lin_uplift",
    "reduce_edge_blowup",
    "reduce_degree_padding",
    "gen_random_dense",
]


class NonLinearInputError(ValueError):
    """A reduction that requires a linear input was fed a non-linear one."""


class GenBudgetError(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""


def is_linear(h: Hypergraph) -> bool:
    """True iff every two edges share at most one vertex."""
    edges = [set(e) for e in h.edges]
    for a, b in itertools.combinations(edges, 2):
        if len(a & b) > 1:
            return False
    return True


def gen_divisibility_barrier(n: int, k: int, a: int) -> Hypergraph:
    """Host whose edges are the k-sets meeting A = {0..a-1} in an even count.

    With a odd there is no perfect matching: every matching covers an even
    number of A-vertices.  a = 0 degenerates to the complete k-graph.
    """
    if not 0 <= a <= n:
        raise ValueError(f"need 0 <= a <= n, got a={a}, n={n}")
    edges = [
        e for e in itertools.combinations(range(n), k) if sum(v < a for v in e) % 2 == 0
    ]
    return Hypergraph(k, n, edges)


def gen_space_barrier(n: int, k: int, core_size: int) -> Hypergraph:
    """Host whose edges are the k-sets intersecting the core {0..core_size-1}.

    With core_size = n/k - 1 the codegree is exactly n/k - 1 and no perfect
    matching exists: each matching edge eats a core vertex.
    """
    if not 0 <= core_size <= n:
        raise ValueError(f"need 0 <= core_size <= n, got {core_size}")
    edges = [
        e for e in itertools.combinations(range(n), k) if any(v < core_size for v in e)
    ]
    return Hypergraph(k, n, edges)


def gen_complete(n: int, k: int) -> Hypergraph:
    return Hypergraph(k, n, itertools.combinations(range(n), k))


def gen_complete_partite(sizes: tuple[int, ...]) -> Hypergraph:
    """Complete k-partite k-graph with the given class sizes (k = len(sizes))."""
    from .pattern import _complete_partite_kgraph

    return _complete_partite_kgraph(tuple(sizes))


def gen_complete_multipartite_graph(sizes: tuple[int, ...]) -> Hypergraph:
    """Complete multipartite graph: every pair from distinct classes is an edge."""
    bounds = list(itertools.accumulate(sizes, initial=0))
    n = bounds[-1]
    cls = [0] * n
    for i in range(len(sizes)):
        for v in range(bounds[i], bounds[i + 1]):
            cls[v] = i
    edges = [
        (u, v) for u, v in itertools.combinations(range(n), 2) if cls[u] != cls[v]
    ]
    return Hypergraph(2, n, edges)


def gen_union_of_cliques(sizes: tuple[int, ...], k: int = 2) -> Hypergraph:
    """Disjoint union of complete k-graphs with the given orders."""
    edges = []
    off = 0
    for sz in sizes:
        edges.extend(itertools.combinations(range(off, off + sz), k))
        off += sz
    return Hypergraph(k, off, edges)


def reduce_lin_uplift(h: Hypergraph) -> Hypergraph:
    """Lift a linear k-graph to a (k+1)-graph preserving perfect matchings.

    Layout: copy i of V(h) occupies [i*n, (i+1)*n) for i in 0..k; after the
    copies, one gadget vertex per (copy, edge) pair.  Per original edge e:
    the (k+1)-set of its gadget vertices, plus e's image in copy i extended
    by gadget (i, e).  Output has (k+1)(n+s) vertices and (k+2)s edges.
    """
    if not is_linear(h):
        raise NonLinearInputError("uplift needs a linear input")
    k, n, s = h.k, h.n, len(h.edges)
    base = (k + 1) * n

    def gadget(i: int, ei: int) -> int:
        return base + i * s + ei

    edges = []
    for ei in range(s):
        edges.append(tuple(gadget(i, ei) for i in range(k + 1)))
    for i in range(k + 1):
        off = i * n
        for ei, e in enumerate(h.edges):
            edges.append(tuple(sorted([v + off for v in e] + [gadget(i, ei)])))
    return Hypergraph(k + 1, (k + 1) * (n + s), edges)


def reduce_edge_blowup(h: Hypergraph, K: Pattern) -> Hypergraph:
    """Replace each edge of a linear m-graph with a copy of K (|V(K)| = m).

    The copy is embedded along the edge's sorted vertices, matching K's
    vertex order 0..m-1 (the lexicographic embedding).  Linearity keeps the
    images of distinct edges from colliding.
    """
    if K.m != h.k:
        raise ValueError(
            f"pattern has {K.m} vertices but edges have {h.k}; they must match"
        )
    if not is_linear(h):
        raise NonLinearInputError("edge blowup needs a linear input")
    edges = []
    for e in h.edges:
        for f in K.graph.edges:
            edges.append(tuple(sorted(e[j] for j in f)))
    return Hypergraph(K.k, h.n, edges)


def reduce_degree_padding(
    h: Hypergraph, K: Pattern, gamma: Fraction
) -> tuple[Hypergraph, dict]:
    """Pad h with an A|B block and all k-sets meeting A; codegree becomes |A|.

    A has a_1*ceil(n/gamma) vertices (a_1 = smallest class of K) and B the
    remaining (m-a_1)*ceil(n/gamma), so |V(H')| = n + m*ceil(n/gamma).  The
    returned info dict reports the layout and the exact computed codegree.
    """
    k, n = h.k, h.n
    if K.k != k:
        raise ValueError(f"pattern uniformity {K.k} differs from host {k}")
    m = K.m
    if n % m:
        raise ValueError(f"pattern order {m} must divide |V(h)| = {n}")
    sigma = partite_stats(K).sigma
    gamma = Fraction(gamma)
    if not 0 < gamma < sigma:
        raise ValueError(f"gamma must lie in (0, sigma(K)) = (0, {sigma}), got {gamma}")
    a1 = min(partite_stats(K).sset)
    t = math.ceil(Fraction(n) / gamma)
    size_a = a1 * t
    total = n + m * t
    a_lo, a_hi = n, n + size_a
    edges = list(h.edges)
    for e in itertools.combinations(range(total), k):
        if any(a_lo <= v < a_hi for v in e):
            edges.append(e)
    out = Hypergraph(k, total, edges)
    info = {
        "n": n,
        "m": m,
        "a1": a1,
        "t": t,
        "gamma": gamma,
        "sigma": sigma,
        "size_a": size_a,
        "size_b": (m - a1) * t,
        "total": total,
        "min_codegree": out.min_l_degree(k - 1),
    }
    return out, info


def gen_random_dense(
    n: int,
    k: int,
    edge_prob: float,
    seed: int,
    min_l_degree_floor: int = 0,
    *,
    floor_l: int | None = None,
    max_attempts: int = 200,
) -> Hypergraph:
    """Seeded binomial random k-graph, resampled until the degree floor holds.

    The floor applies to min_l_degree at l = floor_l (default k-1).  One RNG
    stream drives all attempts, so results are reproducible per seed.
    """
    if not 0 <= edge_prob <= 1:
        raise ValueError(f"edge probability must be in [0,1], got {edge_prob}")
    if min_l_degree_floor < 0:
        raise ValueError("degree floor must be >= 0")
    l = floor_l if floor_l is not None else k - 1
    if not 1 <= l <= k - 1:
        raise ValueError(f"need 1 <= floor_l <= k-1, got {l}")
    rng = random.Random(seed)
    p = float(edge_prob)
    for _ in range(max_attempts):
        edges = [e for e in itertools.combinations(range(n), k) if rng.random() < p]
        out = Hypergraph(k, n, edges)
        if out.min_l_degree(l) >= min_l_degree_floor:
            return out
    raise GenBudgetError(
        f"no sample met min_l_degree >= {min_l_degree_floor} in {max_attempts} attempts"
    )
