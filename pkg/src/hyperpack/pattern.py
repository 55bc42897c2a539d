"""Packing patterns: copy enumeration, exact packing search, pattern invariants.

A pattern F is a small k-uniform hypergraph with at least one edge.  A copy of
F in a host H is an m-subset of V(H) onto which the vertices of F inject so
that every edge of F lands on an edge of H (copies are unlabelled: the subset
counts once however many embeddings it supports).

The exact perfect-packing search in this module is the brute-force baseline
everything else is validated against.  It always branches on the lowest-id
uncovered vertex, which keeps it deterministic, and memoises failed
uncovered-vertex states as bitmasks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb, gcd
from typing import Iterable, Optional

from .hgraph import Hypergraph, vset

__all__ = [
    "DEFAULT_CAP",
    "Pattern",
    "PatternError",
    "CapExceededError",
    "pattern_from_name",
    "spans_copy",
    "enumerate_copies",
    "PackingSearch",
    "has_perfect_packing_small",
    "GraphChromaticStats",
    "PartiteStats",
    "graph_stats",
    "partite_stats",
    "completed_partite",
]

DEFAULT_CAP = 24


class PatternError(ValueError):
    """A hypergraph unsuitable as a packing pattern, or a bad registry name."""


class CapExceededError(RuntimeError):
    """An exact search was asked to exceed its small-instance cap.

    Raised instead of silently approximating; callers may retry with a larger
    explicit cap.
    """


class Pattern:
    """A packing pattern wrapping a k-uniform hypergraph with >= 1 edge."""

    def __init__(self, graph: Hypergraph, name: str | None = None):
        if not graph.edges:
            raise PatternError("a pattern must have at least one edge")
        self.graph = graph
        self.k = graph.k
        self.m = graph.n
        self.name = name or f"pattern:{graph.k}:{graph.n}:{len(graph.edges)}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.graph == other.graph

    def __hash__(self) -> int:
        return hash(self.graph)

    def __repr__(self) -> str:
        return f"Pattern({self.name}, k={self.k}, m={self.m})"

    @property
    def is_single_edge(self) -> bool:
        return self.m == self.k and len(self.graph.edges) == 1

    @cached_property
    def _embed_order(self) -> tuple[int, ...]:
        # Static embedding order: start at a max-degree vertex, then greedily
        # pick the vertex with the most edges into the already-ordered prefix,
        # so edge constraints bind as early as possible.
        g = self.graph
        degs = [len(g.incident(v)) for v in range(self.m)]
        order = [max(range(self.m), key=lambda v: (degs[v], -v))]
        chosen = {order[0]}
        while len(order) < self.m:
            best, best_key = None, None
            for v in range(self.m):
                if v in chosen:
                    continue
                tied = sum(1 for e in g.edges if v in e and any(u in chosen for u in e))
                key = (tied, degs[v], -v)
                if best_key is None or key > best_key:
                    best, best_key = v, key
            order.append(best)
            chosen.add(best)
        return tuple(order)

    @cached_property
    def _edges_ready_at(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        # For each prefix length of the embedding order, the pattern edges
        # whose vertices are all inside the prefix (checked once, when the
        # last vertex arrives).
        order = self._embed_order
        pos = {v: i for i, v in enumerate(order)}
        ready: list[list[tuple[int, ...]]] = [[] for _ in range(self.m + 1)]
        for e in self.graph.edges:
            ready[max(pos[v] for v in e) + 1].append(e)
        return tuple(tuple(r) for r in ready)


# -- pattern registry --------------------------------------------------------


def _complete_partite_kgraph(sizes: tuple[int, ...]) -> Hypergraph:
    k = len(sizes)
    bounds = list(itertools.accumulate(sizes, initial=0))
    classes = [range(bounds[i], bounds[i + 1]) for i in range(k)]
    edges = [tuple(sorted(t)) for t in itertools.product(*classes)]
    return Hypergraph(k, sum(sizes), edges)


def pattern_from_name(name: str) -> Pattern:
    """Resolve a registry name.

    Known names: ``edge:k`` (single k-edge), ``K3`` (triangle), ``P3`` (path
    on three vertices), ``Kkpartite:a1,...,ak`` (complete k-partite k-graph
    with the given class sizes; k is the number of sizes).
    """
    if name == "K3":
        return Pattern(Hypergraph(2, 3, [(0, 1), (0, 2), (1, 2)]), name)
    if name == "P3":
        return Pattern(Hypergraph(2, 3, [(0, 1), (1, 2)]), name)
    if name.startswith("edge:"):
        try:
            k = int(name.split(":", 1)[1])
        except ValueError:
            raise PatternError(f"bad edge pattern {name!r}") from None
        if k < 2:
            raise PatternError(f"edge pattern needs k >= 2, got {k}")
        return Pattern(Hypergraph(k, k, [tuple(range(k))]), name)
    if name.startswith("Kkpartite:"):
        try:
            sizes = tuple(int(t) for t in name.split(":", 1)[1].split(","))
        except ValueError:
            raise PatternError(f"bad class sizes in {name!r}") from None
        if len(sizes) < 2 or any(a < 1 for a in sizes):
            raise PatternError(f"Kkpartite needs >= 2 positive class sizes, got {sizes}")
        return Pattern(_complete_partite_kgraph(sizes), name)
    raise PatternError(f"unknown pattern name {name!r}")


# -- copies -------------------------------------------------------------------


def _edges_inside(h: Hypergraph, s: tuple[int, ...]) -> list[tuple[int, ...]]:
    hits: dict[int, int] = {}
    for v in s:
        for idx in h.incident(v):
            hits[idx] = hits.get(idx, 0) + 1
    return [h.edges[idx] for idx, c in hits.items() if c == h.k]


def spans_copy(h: Hypergraph, s: Iterable[int], p: Pattern) -> bool:
    """True iff the m-set s hosts a copy of p (every pattern edge maps onto a host edge)."""
    t = vset(s)
    if len(t) != p.m:
        raise ValueError(f"spans_copy needs |s| = {p.m}, got {len(t)}")
    h._check_vertices(t)
    if p.is_single_edge:
        return h.has_edge(t)
    inside = _edges_inside(h, t)
    if len(inside) < len(p.graph.edges):
        return False
    inside_set = set(inside)
    order = p._embed_order
    ready = p._edges_ready_at
    assign: dict[int, int] = {}
    used = [False] * len(t)

    def place(i: int) -> bool:
        if i == p.m:
            return True
        fv = order[i]
        for j, hv in enumerate(t):
            if used[j]:
                continue
            assign[fv] = hv
            ok = all(
                tuple(sorted(assign[u] for u in e)) in inside_set for e in ready[i + 1]
            )
            if ok:
                used[j] = True
                if place(i + 1):
                    return True
                used[j] = False
        assign.pop(fv, None)
        return False

    return place(0)


def enumerate_copies(h: Hypergraph, p: Pattern) -> tuple[tuple[int, ...], ...]:
    """All m-subsets of V(h) spanning a copy of p, in lexicographic order.

    Equivalent to filtering every m-subset through spans_copy; when the host
    is large and sparse the candidates are seeded from host edges instead
    (every copy contains at least one host edge), which is checked to agree
    with the direct scan in the test suite.
    """
    n, m, k = h.n, p.m, h.k
    if m > n:
        return ()
    if p.is_single_edge:
        return h.edges
    direct = comb(n, m)
    seeded = len(h.edges) * (comb(n - k, m - k) if m > k else 1)
    if seeded < direct:
        cands: set[tuple[int, ...]] = set()
        verts = range(n)
        for e in h.edges:
            es = set(e)
            rest = [v for v in verts if v not in es]
            if m == k:
                cands.add(e)
                continue
            for extra in itertools.combinations(rest, m - k):
                cands.add(tuple(sorted(e + extra)))
        pool: Iterable[tuple[int, ...]] = sorted(cands)
    else:
        pool = itertools.combinations(range(n), m)
    return tuple(s for s in pool if spans_copy(h, s, p))


# -- exact perfect-packing search ---------------------------------------------


class PackingSearch:
    """Memoised exact perfect-packing decisions for one host/pattern pair.

    Copies are precomputed once as bitmasks; queries ask whether a vertex
    subset (given as a mask or iterable) can be perfectly tiled by disjoint
    copies.  Branching is always on the lowest-id uncovered vertex and both
    outcomes are memoised, so repeated subset queries (the reachability
    oracle's workload) share work.
    """

    def __init__(self, host: Hypergraph, pattern: Pattern, cap: int = DEFAULT_CAP):
        self.host = host
        self.pattern = pattern
        self.cap = cap
        self._by_vertex: Optional[list[list[int]]] = None
        self._memo: dict[int, bool] = {0: True}

    def _ensure(self) -> list[list[int]]:
        if self._by_vertex is None:
            masks = []
            for c in enumerate_copies(self.host, self.pattern):
                m = 0
                for v in c:
                    m |= 1 << v
                masks.append(m)
            by_v: list[list[int]] = [[] for _ in range(self.host.n)]
            for m in sorted(masks):
                lead = m
                while lead:
                    by_v[(lead & -lead).bit_length() - 1].append(m)
                    lead &= lead - 1
            self._by_vertex = by_v
        return self._by_vertex

    def _mask_of(self, subset) -> int:
        if isinstance(subset, int):
            return subset
        m = 0
        for v in subset:
            if not 0 <= v < self.host.n:
                raise ValueError(f"vertex {v} outside host")
            m |= 1 << v
        return m

    def packing_exists(self, subset) -> bool:
        """True iff the subset is exactly covered by disjoint copies of the pattern."""
        mask = self._mask_of(subset)
        if mask.bit_count() % self.pattern.m:
            return False
        by_v = self._ensure()
        memo = self._memo

        def walk(rem: int) -> bool:
            got = memo.get(rem)
            if got is not None:
                return got
            v = (rem & -rem).bit_length() - 1
            for cm in by_v[v]:
                if cm & ~rem == 0 and walk(rem & ~cm):
                    memo[rem] = True
                    return True
            memo[rem] = False
            return False

        return walk(mask)

    def find_packing(self, subset) -> Optional[list[tuple[int, ...]]]:
        """A concrete perfect packing of the subset, or None."""
        mask = self._mask_of(subset)
        if mask.bit_count() % self.pattern.m:
            return None
        by_v = self._ensure()
        out: list[int] = []

        def walk(rem: int) -> bool:
            if rem == 0:
                return True
            if self._memo.get(rem) is False:
                return False
            v = (rem & -rem).bit_length() - 1
            for cm in by_v[v]:
                if cm & ~rem == 0:
                    out.append(cm)
                    if walk(rem & ~cm):
                        return True
                    out.pop()
            self._memo[rem] = False
            return False

        if not walk(mask):
            return None
        return [_mask_to_tuple(cm) for cm in out]


def _mask_to_tuple(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        out.append((mask & -mask).bit_length() - 1)
        mask &= mask - 1
    return tuple(out)


def has_perfect_packing_small(h: Hypergraph, p: Pattern, cap: int = DEFAULT_CAP) -> bool:
    """Exact perfect-packing existence for a small host.

    Requires m | n and n <= cap; refuses (CapExceededError) rather than
    approximating when the host is too large.
    """
    if h.n > cap:
        raise CapExceededError(f"host has {h.n} vertices, exact-search cap is {cap}")
    if h.n % p.m:
        raise ValueError(f"pattern order {p.m} does not divide host order {h.n}")
    return PackingSearch(h, p, cap).packing_exists(range(h.n))


# -- chromatic invariants of graph patterns -----------------------------------


@dataclass(frozen=True)
class GraphChromaticStats:
    """Colouring invariants of a 2-uniform pattern.

    ``hcf_chi`` is None when every chi-colouring is balanced (the difference
    set is {0}), encoding the infinite value.
    """

    chi: int
    sigma: int
    chi_cr: Fraction
    dset: frozenset[int]
    hcf_chi: int | None
    hcf_c: int
    hcf_is_one: bool
    chi_star: Fraction

    @property
    def balanced(self) -> bool:
        return self.chi_cr == self.chi


def _chromatic_number(g: Hypergraph) -> int:
    n = g.n
    if n == 0:
        return 0
    adj = [set() for _ in range(n)]
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    order = sorted(range(n), key=lambda v: -len(adj[v]))
    for q in range(1, n + 1):
        colour: dict[int, int] = {}

        def try_colour(i: int) -> bool:
            if i == n:
                return True
            v = order[i]
            seen = {colour[u] for u in adj[v] if u in colour}
            top = min(q, max(colour.values(), default=-1) + 2)
            for c in range(top):
                if c not in seen:
                    colour[v] = c
                    if try_colour(i + 1):
                        return True
                    del colour[v]
            return False

        if try_colour(0):
            return q
    return n


def _all_colour_size_multisets(g: Hypergraph, q: int) -> set[tuple[int, ...]]:
    """Sorted class-size tuples over all proper q-colourings (classes unordered)."""
    n = g.n
    adj = [set() for _ in range(n)]
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    sizes: set[tuple[int, ...]] = set()
    colour = [0] * n

    def walk(v: int, used: int) -> None:
        if v == n:
            counts = [0] * q
            for c in colour[:n]:
                counts[c] += 1
            if 0 not in counts:
                sizes.add(tuple(sorted(counts)))
            return
        seen = {colour[u] for u in adj[v] if u < v}
        top = min(q, used + 1)
        for c in range(top):
            if c not in seen:
                colour[v] = c
                walk(v + 1, max(used, c + 1))

    if n:
        walk(0, 0)
    return sizes


def _component_orders(g: Hypergraph) -> list[int]:
    n = g.n
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        r = find(e[0])
        for v in e[1:]:
            parent[find(v)] = r
    counts: dict[int, int] = {}
    for v in range(n):
        counts[find(v)] = counts.get(find(v), 0) + 1
    return sorted(counts.values())


def graph_stats(p: Pattern) -> GraphChromaticStats:
    """Chromatic statistics (chi, sigma, chi_cr, difference set, hcf data, chi*).

    Only defined for graph patterns (k = 2).
    """
    if p.k != 2:
        raise PatternError(f"graph_stats needs a 2-uniform pattern, got k={p.k}")
    g = p.graph
    m = p.m
    chi = _chromatic_number(g)
    size_multisets = _all_colour_size_multisets(g, chi)
    sigma = min(sizes[0] for sizes in size_multisets)
    dset: set[int] = set()
    for sizes in size_multisets:
        dset.update(sizes[i + 1] - sizes[i] for i in range(len(sizes) - 1))
    chi_cr = Fraction((chi - 1) * m, m - sigma)
    if dset == {0}:
        hcf_chi: int | None = None
    else:
        d = 0
        for x in dset:
            d = gcd(d, x)
        hcf_chi = d
    hcf_c = 0
    for c in _component_orders(g):
        hcf_c = gcd(hcf_c, c)
    if chi == 2:
        hcf_is_one = hcf_c == 1 and hcf_chi is not None and hcf_chi <= 2
    else:
        hcf_is_one = hcf_chi == 1
    chi_star = chi_cr if hcf_is_one else Fraction(chi)
    return GraphChromaticStats(
        chi=chi,
        sigma=sigma,
        chi_cr=chi_cr,
        dset=frozenset(dset),
        hcf_chi=hcf_chi,
        hcf_c=hcf_c,
        hcf_is_one=hcf_is_one,
        chi_star=chi_star,
    )


# -- k-partite invariants of k >= 3 patterns -----------------------------------


@dataclass(frozen=True)
class PartiteStats:
    """Class-size invariants over all k-partite realisations of a pattern.

    ``gcd_f`` is None when the difference set is {0} (the undefined case).
    """

    sset: frozenset[int]
    dset: frozenset[int]
    gcd_f: int | None
    sigma: Fraction


def _partite_realisations(p: Pattern) -> list[tuple[int, ...]]:
    """All class-size assignments (|U_1|,...,|U_k|) with every edge transversal."""
    g = p.graph
    k, m = p.k, p.m
    out: list[tuple[int, ...]] = []
    cls = [-1] * m

    def walk(v: int) -> None:
        if v == m:
            counts = [0] * k
            for c in cls:
                counts[c] += 1
            out.append(tuple(counts))
            return
        for c in range(k):
            ok = True
            for idx in g.incident(v):
                e = g.edges[idx]
                if any(u < v and cls[u] == c for u in e):
                    ok = False
                    break
            if ok:
                cls[v] = c
                walk(v + 1)
        cls[v] = -1

    walk(0)
    return out


def partite_stats(p: Pattern) -> PartiteStats:
    """S(F), D(F), gcd(F) and sigma(F) over all k-partite realisations.

    Raises PatternError when the pattern admits no k-partite realisation.
    """
    reals = _partite_realisations(p)
    if not reals:
        raise PatternError("pattern admits no k-partite realisation")
    sset: set[int] = set()
    dset: set[int] = set()
    for counts in reals:
        sset.update(counts)
        dset.update(abs(a - b) for a in counts for b in counts)
    if dset == {0}:
        gcd_f: int | None = None
    else:
        d = 0
        for x in dset:
            d = gcd(d, x)
        gcd_f = d
    sigma = Fraction(min(sset), p.m)
    return PartiteStats(
        sset=frozenset(sset), dset=frozenset(dset), gcd_f=gcd_f, sigma=sigma
    )


def completed_partite(p: Pattern) -> Pattern:
    """Complete the lexicographically first realisation whose smallest class is minimal.

    The result is a complete k-partite supergraph of p on the same vertices
    whose smallest class size equals min S(F) over realisations achieving it.
    """
    g = p.graph
    k, m = p.k, p.m
    best_cls: list[int] | None = None
    best_min = m + 1
    cls = [-1] * m

    def walk(v: int) -> None:
        nonlocal best_cls, best_min
        if v == m:
            counts = [0] * k
            for c in cls:
                counts[c] += 1
            if 0 in counts:
                return
            if min(counts) < best_min:
                best_min = min(counts)
                best_cls = list(cls)
            return
        for c in range(k):
            ok = True
            for idx in g.incident(v):
                e = g.edges[idx]
                if any(u < v and cls[u] == c for u in e):
                    ok = False
                    break
            if ok:
                cls[v] = c
                walk(v + 1)
        cls[v] = -1

    walk(0)
    if best_cls is None:
        raise PatternError("pattern admits no k-partite realisation with k non-empty classes")
    classes = [[v for v in range(m) if best_cls[v] == c] for c in range(k)]
    edges = sorted({tuple(sorted(t)) for t in itertools.product(*classes)})
    comp = Hypergraph(k, m, edges)
    # Every edge of p is transversal for the chosen realisation, hence kept.
    assert set(g.edges) <= comp.edge_set
    return Pattern(comp, name=f"completed:{p.name}")
