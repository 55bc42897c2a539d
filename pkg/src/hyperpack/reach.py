"""Reachability between vertices via shared packing-completable sets.

Two vertices u, v are reachable at depth i when enough (i*m-1)-sets S exist,
disjoint from {u, v}, such that both H[S+{u}] and H[S+{v}] have perfect
F-packings.  "Enough" is either an absolute count (exact mode, the desk-scale
default) or a density bound beta * n^(i*m-1) (density mode, the literal
asymptotic form).  S is required disjoint from {u, v} so that |S+{u}| = i*m.

The cumulative view (reachable within depth t = reachable at SOME depth
i <= t) is what the partition algorithm consumes: it guarantees the
neighborhood inclusion N~_i(v) <= N~_{i+1}(v) that the asymptotic argument
gets for free from its constant hierarchy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .hgraph import Hypergraph
from .pattern import DEFAULT_CAP, CapExceededError, PackingSearch, Pattern

__all__ = [
    "EXACT_ROBUST",
    "DENSITY",
    "ReachParams",
    "ThresholdSchedule",
    "count_reachable_sets",
    "ReachabilityOracle",
    "CumulativeReachability",
    "codegree_fastpath_hyper",
    "codegree_fastpath_graph",
]

EXACT_ROBUST = "exact"
DENSITY = "density"

_MODES = (EXACT_ROBUST, DENSITY)


@dataclass(frozen=True)
class ReachParams:
    """Threshold parameters for one reachability depth."""

    i: int = 1
    mode: str = EXACT_ROBUST
    beta: Fraction = Fraction(1, 100)
    explicit_count: int = 1

    def __post_init__(self):
        if self.i < 1:
            raise ValueError(f"depth must be >= 1, got {self.i}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must be in (0,1), got {self.beta}")
        if self.explicit_count < 1:
            raise ValueError(f"explicit_count must be >= 1, got {self.explicit_count}")

    def required(self, n: int, m: int):
        """Minimum qualifying-set count for reachability at this depth."""
        if self.mode == EXACT_ROBUST:
            return self.explicit_count
        return Fraction(self.beta) * n ** (self.i * m - 1)


@dataclass(frozen=True)
class ThresholdSchedule:
    """Depth-indexed thresholds.

    Exact mode applies the same absolute count at every depth.  Density mode
    assigns beta * cascade^j to depths in (2^(j-1), 2^j], mirroring the proof's
    geometric weakening of beta along the power-of-two ladder.
    """

    mode: str = EXACT_ROBUST
    explicit_count: int = 1
    beta: Fraction = Fraction(1, 100)
    cascade: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.explicit_count < 1:
            raise ValueError(f"explicit_count must be >= 1, got {self.explicit_count}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must be in (0,1), got {self.beta}")
        if not 0 < self.cascade <= 1:
            raise ValueError(f"cascade must be in (0,1], got {self.cascade}")

    def params_at(self, depth: int) -> ReachParams:
        if self.mode == EXACT_ROBUST:
            return ReachParams(depth, self.mode, explicit_count=self.explicit_count)
        level = (depth - 1).bit_length()
        beta = self.beta * self.cascade**level
        return ReachParams(depth, self.mode, beta=Fraction(beta))

    def required(self, depth: int, n: int, m: int):
        return self.params_at(depth).required(n, m)


def count_reachable_sets(
    h: Hypergraph,
    p: Pattern,
    u: int,
    v: int,
    i: int,
    cap: int = DEFAULT_CAP,
    search: PackingSearch | None = None,
) -> int:
    """Number of (i*m-1)-sets S disjoint from {u,v} with both S+{u} and S+{v} packable.

    Refuses (CapExceededError) when i*m-1 exceeds the small-instance cap; when
    the host simply has too few vertices the count is 0, not an error.
    """
    if u == v:
        raise ValueError("reachability needs two distinct vertices")
    if i < 1:
        raise ValueError(f"depth must be >= 1, got {i}")
    h._check_vertices((u, v))
    size = i * p.m - 1
    if size > cap:
        raise CapExceededError(
            f"reachable-set size {size} exceeds small-instance cap {cap}"
        )
    if size > h.n - 2:
        return 0
    if search is None:
        search = PackingSearch(h, p, cap)
    bit_u, bit_v = 1 << u, 1 << v
    rest = [1 << w for w in h.vertices() if w != u and w != v]
    count = 0
    for combo in itertools.combinations(rest, size):
        base = 0
        for b in combo:
            base |= b
        if search.packing_exists(base | bit_u) and search.packing_exists(base | bit_v):
            count += 1
    return count


class ReachabilityOracle:
    """Memoised pairwise reachability at one fixed depth/threshold."""

    def __init__(
        self,
        host: Hypergraph,
        pattern: Pattern,
        params: ReachParams,
        cap: int = DEFAULT_CAP,
        search: PackingSearch | None = None,
    ):
        self.host = host
        self.pattern = pattern
        self.params = params
        self.cap = cap
        self.search = search or PackingSearch(host, pattern, cap)
        self._counts: dict[tuple[int, int], int] = {}

    def count(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        got = self._counts.get(key)
        if got is None:
            got = count_reachable_sets(
                self.host, self.pattern, key[0], key[1], self.params.i,
                cap=self.cap, search=self.search,
            )
            self._counts[key] = got
        return got

    def is_reachable(self, u: int, v: int) -> bool:
        return self.count(u, v) >= self.params.required(self.host.n, self.pattern.m)

    def reachable_neighborhood(self, v: int) -> tuple[int, ...]:
        """All vertices reachable to v at the oracle's depth; v itself excluded."""
        return tuple(
            u for u in self.host.vertices() if u != v and self.is_reachable(u, v)
        )

    def is_closed(self, subset) -> bool:
        verts = sorted(set(subset))
        return all(
            self.is_reachable(u, v) for u, v in itertools.combinations(verts, 2)
        )


class CumulativeReachability:
    """Reachability across depths with within-depth (cumulative) semantics.

    reachable_within(u, v, t) holds when the pair is reachable at some depth
    i <= t under the schedule's depth-i threshold.  Depths are probed in
    ascending order, so the usual dense case settles at depth 1 and deeper
    counting only happens for genuinely separated pairs.
    """

    def __init__(
        self,
        host: Hypergraph,
        pattern: Pattern,
        schedule: ThresholdSchedule | None = None,
        cap: int = DEFAULT_CAP,
    ):
        self.host = host
        self.pattern = pattern
        self.schedule = schedule or ThresholdSchedule()
        self.cap = cap
        self.search = PackingSearch(host, pattern, cap)
        self._counts: dict[tuple[int, int, int], int] = {}

    def count_at(self, u: int, v: int, depth: int) -> int:
        a, b = (u, v) if u < v else (v, u)
        key = (a, b, depth)
        got = self._counts.get(key)
        if got is None:
            got = count_reachable_sets(
                self.host, self.pattern, a, b, depth, cap=self.cap, search=self.search
            )
            self._counts[key] = got
        return got

    def reachable_at(self, u: int, v: int, depth: int) -> bool:
        if depth * self.pattern.m - 1 > self.host.n - 2:
            return False
        required = self.schedule.required(depth, self.host.n, self.pattern.m)
        return self.count_at(u, v, depth) >= required

    def reachable_within(self, u: int, v: int, depth: int) -> bool:
        return any(self.reachable_at(u, v, i) for i in range(1, depth + 1))

    def neighborhood_within(self, v: int, depth: int) -> tuple[int, ...]:
        return tuple(
            u
            for u in self.host.vertices()
            if u != v and self.reachable_within(u, v, depth)
        )

    def oracle_at(self, depth: int) -> ReachabilityOracle:
        """Single-depth view sharing this engine's packing-search memo."""
        oracle = ReachabilityOracle(
            self.host,
            self.pattern,
            self.schedule.params_at(depth),
            cap=self.cap,
            search=self.search,
        )
        return oracle


# -- optional codegree accelerators -------------------------------------------


def codegree_fastpath_hyper(h: Hypergraph, u: int, v: int, gamma: Fraction) -> bool:
    """Sufficient condition for depth-1 reachability in a k-graph, k >= 3.

    Counts the (k-1)-sets in the common link of u and v whose own neighborhood
    has at least gamma*n vertices; passes when the count reaches
    gamma^2 * C(n, k-1).  An accelerator only: a False verdict says nothing.
    """
    if h.k < 3:
        raise ValueError(f"hypergraph fast path needs k >= 3, got k={h.k}")
    h._check_vertices((u, v))
    gamma = Fraction(gamma)
    n = h.n
    common = h.link_set(u) & h.link_set(v)
    need_nbhd = gamma * n
    hits = sum(1 for s in common if h.degree(s) >= need_nbhd)
    return hits >= gamma * gamma * comb(n, h.k - 1)


def codegree_fastpath_graph(
    g: Hypergraph, chi: int, u: int, v: int, gamma_prime: Fraction
) -> bool:
    """Sufficient condition for depth-1 reachability of a chi-chromatic graph pattern.

    Counts common (chi-1)-sets S that are cliques inside both N(u) and N(v)
    with joint neighborhood of size >= gamma'*n; passes at gamma'^2 * C(n, chi-1).
    """
    if g.k != 2:
        raise ValueError(f"graph fast path needs a 2-uniform host, got k={g.k}")
    if chi < 2:
        raise ValueError(f"pattern chromatic number must be >= 2, got {chi}")
    g._check_vertices((u, v))
    gamma_prime = Fraction(gamma_prime)
    n = g.n
    adj = [set() for _ in range(n)]
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    common = sorted(adj[u] & adj[v])
    need_nbhd = gamma_prime * n
    hits = 0
    for s in itertools.combinations(common, chi - 1):
        if any(b not in adj[a] for a, b in itertools.combinations(s, 2)):
            continue
        joint = set(range(n))
        for w in s:
            joint &= adj[w]
        if len(joint) >= need_nbhd:
            hits += 1
    return hits >= gamma_prime * gamma_prime * comb(n, chi - 1)
