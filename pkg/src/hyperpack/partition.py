"""Closed-partition construction and goodness certification.

find_closed_partition splits a vertex set into classes that are each
internally reachable (closed) at a prescribed depth, following the witness
construction: find the largest r admitting r pairwise-far witnesses, carve a
class around each witness's reachable neighborhood, then greedily reassign
the leftover vertices.  certify_goodness then checks the result explicitly;
the pipelines trust the certificate, never the construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .hgraph import Hypergraph, vset
from .pattern import DEFAULT_CAP, CapExceededError, Pattern
from .reach import CumulativeReachability, ThresholdSchedule

__all__ = [
    "Partition",
    "GoodnessCertificate",
    "PartitionPreconditionError",
    "SparseNeighborhoodError",
    "UnreachableClusterError",
    "find_closed_partition",
    "certify_goodness",
    "parse_partition",
    "render_partition",
]


class PartitionPreconditionError(ValueError):
    """A checked hypothesis of the partition algorithm fails on this input."""


class SparseNeighborhoodError(PartitionPreconditionError):
    """Some vertex has fewer than delta'*n depth-1 reachable partners in the set."""

    def __init__(self, vertex: int, have: int, need: Fraction):
        self.vertex = vertex
        self.have = have
        self.need = need
        super().__init__(
            f"vertex {vertex} has {have} reachable partners in the target set, "
            f"needs at least {need}"
        )


class UnreachableClusterError(PartitionPreconditionError):
    """A (c+1)-subset of the target set contains no depth-1 reachable pair."""

    def __init__(self, witness: tuple[int, ...]):
        self.witness = witness
        super().__init__(f"no reachable pair among vertices {witness}")


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint vertex classes; the order is part of the value."""

    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        norm = []
        for cls in self.classes:
            c = vset(cls)
            if not c:
                raise ValueError("partition classes must be non-empty")
            if seen & set(c):
                raise ValueError("partition classes must be disjoint")
            seen.update(c)
            norm.append(c)
        object.__setattr__(self, "classes", tuple(norm))

    @property
    def d(self) -> int:
        return len(self.classes)

    def target(self) -> tuple[int, ...]:
        return tuple(sorted(v for cls in self.classes for v in cls))

    def class_index(self) -> dict[int, int]:
        return {v: i for i, cls in enumerate(self.classes) for v in cls}


@dataclass(frozen=True)
class GoodnessCertificate:
    """Outcome of checking a partition against the closedness/size contract.

    c is a fraction of the HOST order n; sizes are absolute.  A class verdict
    of False comes with the first pair that failed the within-depth check.
    """

    t: int
    c: Fraction
    n: int
    sizes: tuple[int, ...]
    closed: tuple[bool, ...]
    size_ok: tuple[bool, ...]
    failing_pairs: tuple[Optional[tuple[int, int]], ...]

    @property
    def valid(self) -> bool:
        return all(self.closed) and all(self.size_ok)


def _independent_subset(adj: dict[int, set[int]], verts: list[int], size: int):
    """A size-subset of verts pairwise non-adjacent, or None (lex-first search)."""
    chosen: list[int] = []

    def extend(start: int) -> bool:
        if len(chosen) == size:
            return True
        for idx in range(start, len(verts)):
            v = verts[idx]
            if len(verts) - idx < size - len(chosen):
                return False
            if all(v not in adj[u] for u in chosen):
                chosen.append(v)
                if extend(idx + 1):
                    return True
                chosen.pop()
        return False

    return tuple(chosen) if extend(0) else None


def find_closed_partition(
    h: Hypergraph,
    p: Pattern,
    s: Sequence[int],
    c_cap: int,
    delta_prime: Fraction,
    *,
    alpha: Fraction | None = None,
    schedule: ThresholdSchedule | None = None,
    cap: int = DEFAULT_CAP,
    reach: CumulativeReachability | None = None,
) -> Partition:
    """Partition s into at most min(c_cap, 1/delta') classes closed at depth 2^(c_cap-1).

    Checked preconditions (each its own error type): every v in s has at least
    delta'*n depth-1 reachable partners inside s, and every (c_cap+1)-subset
    of s contains a reachable pair.  Closedness of the output is NOT asserted
    here; run certify_goodness on it.
    """
    if c_cap < 2:
        raise ValueError(f"class cap must be >= 2, got {c_cap}")
    delta_prime = Fraction(delta_prime)
    if not 0 < delta_prime <= 1:
        raise ValueError(f"delta' must be in (0,1], got {delta_prime}")
    alpha = Fraction(alpha) if alpha is not None else delta_prime / 2
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    target = vset(s)
    h._check_vertices(target)
    if reach is None:
        reach = CumulativeReachability(h, p, schedule, cap)
    if not target:
        return Partition(())

    n = h.n
    # Depth-1 reachability restricted to the target set, used by both
    # precondition checks and the leftover reassignment.
    nbhd1: dict[int, set[int]] = {v: set() for v in target}
    for u, v in itertools.combinations(target, 2):
        if reach.reachable_within(u, v, 1):
            nbhd1[u].add(v)
            nbhd1[v].add(u)

    for v in target:
        if len(nbhd1[v]) < delta_prime * n:
            raise SparseNeighborhoodError(v, len(nbhd1[v]), delta_prime * n)
    if len(target) >= c_cap + 1:
        bad = _independent_subset(nbhd1, list(target), c_cap + 1)
        if bad is not None:
            raise UnreachableClusterError(bad)

    max_r = min(c_cap, int(Fraction(1) / delta_prime))
    target_set = set(target)
    witnesses: tuple[int, ...] | None = None
    chosen_r = 0
    for r in range(max_r, 1, -1):
        depth = 2 ** (c_cap + 1 - r)
        far: dict[int, set[int]] = {v: set() for v in target}
        for u, v in itertools.combinations(target, 2):
            if not reach.reachable_within(u, v, depth):
                far[u].add(v)
                far[v].add(u)
        # Witnesses are pairwise non-reachable at this depth, i.e. an
        # independent set in the complement of `far`.
        non_far = {v: target_set - far[v] - {v} for v in target}
        found = _independent_subset(non_far, list(target), r)
        if found is not None:
            witnesses = found
            chosen_r = r
            break

    if witnesses is None:
        return Partition((target,))

    r = chosen_r
    depth0 = 2 ** (c_cap - r)
    nb = [set(reach.neighborhood_within(v, depth0)) for v in witnesses]
    raw: list[set[int]] = []
    for i, v in enumerate(witnesses):
        others = set().union(*(nb[j] for j in range(r) if j != i))
        raw.append(((nb[i] | {v}) & target_set) - others)
    leftovers = target_set - set().union(*raw)

    eps = alpha / c_cap
    classes = [set(u) for u in raw]
    for v in sorted(leftovers):
        # Counted against the original classes, so the outcome does not
        # depend on the order leftovers are processed in.
        scores = [len(nbhd1[v] & raw[i]) for i in range(r)]
        pick = next((i for i, sc in enumerate(scores) if sc >= eps * n), None)
        if pick is None:
            pick = max(range(r), key=lambda i: (scores[i], -i))
        classes[pick].add(v)
    return Partition(tuple(tuple(sorted(c)) for c in classes))


def certify_goodness(
    h: Hypergraph,
    p: Pattern,
    part: Partition,
    t: int,
    c: Fraction,
    *,
    schedule: ThresholdSchedule | None = None,
    cap: int = DEFAULT_CAP,
    reach: CumulativeReachability | None = None,
) -> GoodnessCertificate:
    """Check every class of part for within-depth-t closedness and size >= c*n.

    Refuses when t*m-1 exceeds the small-instance cap: the check would need
    packing decisions on sets larger than the exact engine is allowed.
    """
    if t < 1:
        raise ValueError(f"closure depth must be >= 1, got {t}")
    c = Fraction(c)
    if t * p.m - 1 > cap:
        raise CapExceededError(
            f"certifying depth {t} needs {t * p.m - 1}-sets, over cap {cap}"
        )
    h._check_vertices(part.target())
    if reach is None:
        reach = CumulativeReachability(h, p, schedule, cap)
    sizes = tuple(len(cls) for cls in part.classes)
    closed: list[bool] = []
    failing: list[Optional[tuple[int, int]]] = []
    for cls in part.classes:
        bad = None
        for u, v in itertools.combinations(cls, 2):
            if not reach.reachable_within(u, v, t):
                bad = (u, v)
                break
        closed.append(bad is None)
        failing.append(bad)
    size_ok = tuple(sz >= c * h.n for sz in sizes)
    return GoodnessCertificate(
        t=t,
        c=c,
        n=h.n,
        sizes=sizes,
        closed=tuple(closed),
        size_ok=size_ok,
        failing_pairs=tuple(failing),
    )


def parse_partition(text: str) -> Partition:
    """One class per line, whitespace-separated vertex ids; '#' comments."""
    classes = []
    for line_no, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            verts = tuple(int(t) for t in line.split())
        except ValueError:
            raise ValueError(f"line {line_no}: vertex ids must be integers") from None
        classes.append(verts)
    return Partition(tuple(classes))


def render_partition(part: Partition) -> str:
    return "".join(" ".join(str(v) for v in cls) + "\n" for cls in part.classes)
