"""k-uniform hypergraphs with degree, link, and induced-subgraph queries.

Vertices are dense integers 0..n-1; edges are canonical sorted k-tuples held
in lexicographic order together with a per-vertex incidence index.  Instances
are immutable after construction, so every query is pure and safe to share
across threads.

The text serialisation (".khg") is one header line ``k n`` followed by one
edge per line (k whitespace-separated vertex ids).  ``#`` starts a comment,
blank lines are ignored, and ordinary graphs simply use k = 2.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterable, Iterator

__all__ = [
    "Hypergraph",
    "KhgFormatError",
    "vset",
    "parse_khg",
    "render_khg",
    "load_khg",
    "save_khg",
]


class KhgFormatError(ValueError):
    """Malformed .khg input.  Carries the 1-based offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


def vset(vertices: Iterable[int]) -> tuple[int, ...]:
    """Canonicalise vertex ids into a strictly increasing tuple (duplicates collapse)."""
    return tuple(sorted(set(vertices)))


class Hypergraph:
    """An immutable k-uniform hypergraph on vertex set {0, ..., n-1}.

    Edges are stored as sorted k-tuples in lexicographic order.  Construction
    validates uniformity, vertex ranges, and duplicate edges; ``k <= n`` is
    required as soon as the edge set is non-empty.
    """

    __slots__ = ("k", "n", "edges", "_edge_set", "_incidence", "_links")

    def __init__(self, k: int, n: int, edges: Iterable[Iterable[int]] = ()):
        if k < 2:
            raise ValueError(f"uniformity must be an integer >= 2, got {k}")
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        canon: list[tuple[int, ...]] = []
        seen: set[tuple[int, ...]] = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != k or len(set(t)) != k:
                raise ValueError(f"edge {tuple(e)} must have exactly {k} distinct vertices")
            if t[0] < 0 or t[-1] >= n:
                raise ValueError(f"edge {t} has a vertex outside 0..{n - 1}")
            if t in seen:
                raise ValueError(f"duplicate edge {t}")
            seen.add(t)
            canon.append(t)
        if canon and k > n:
            raise ValueError(f"k={k} exceeds n={n} with a non-empty edge set")
        canon.sort()
        self.k = k
        self.n = n
        self.edges: tuple[tuple[int, ...], ...] = tuple(canon)
        self._edge_set = frozenset(canon)
        inc: list[list[int]] = [[] for _ in range(n)]
        for idx, t in enumerate(canon):
            for v in t:
                inc[v].append(idx)
        self._incidence = tuple(frozenset(ix) for ix in inc)
        self._links: dict[int, frozenset[tuple[int, ...]]] = {}

    # -- basic protocol ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.k, self.n, self.edges) == (other.k, other.n, other.edges)

    def __hash__(self) -> int:
        return hash((self.k, self.n, self.edges))

    def __repr__(self) -> str:
        return f"Hypergraph(k={self.k}, n={self.n}, m={len(self.edges)} edges)"

    def vertices(self) -> range:
        return range(self.n)

    def has_edge(self, s: Iterable[int]) -> bool:
        return tuple(sorted(s)) in self._edge_set

    @property
    def edge_set(self) -> frozenset[tuple[int, ...]]:
        return self._edge_set

    def incident(self, v: int) -> frozenset[int]:
        """Indices into ``edges`` of the edges containing v."""
        self._check_vertices((v,))
        return self._incidence[v]

    def _check_vertices(self, s: Iterable[int]) -> None:
        for v in s:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} outside 0..{self.n - 1}")

    # -- degree and link queries -------------------------------------------

    def degree(self, s: Iterable[int]) -> int:
        """Number of edges containing every vertex of s.

        d(empty set) is the edge count.  |s| may equal k, in which case the
        result is edge membership (0 or 1); |s| > k is an invalid query.
        """
        t = vset(s)
        if len(t) > self.k:
            raise ValueError(f"degree query of size {len(t)} exceeds uniformity {self.k}")
        if not t:
            return len(self.edges)
        self._check_vertices(t)
        sets = sorted((self._incidence[v] for v in t), key=len)
        common = sets[0]
        for other in sets[1:]:
            common = common & other
            if not common:
                return 0
        return len(common)

    def min_l_degree(self, l: int) -> int:
        """Minimum degree over all l-element vertex sets, 0 <= l <= k-1."""
        if not 0 <= l <= self.k - 1:
            raise ValueError(f"l must satisfy 0 <= l <= {self.k - 1}, got {l}")
        if l == 0:
            return len(self.edges)
        if self.n < l:
            raise ValueError(f"no {l}-element vertex sets in a host on {self.n} vertices")
        return min(self.degree(c) for c in itertools.combinations(range(self.n), l))

    def link(self, s: Iterable[int]) -> tuple[tuple[int, ...], ...]:
        """The (k-|s|)-sets T with T union s an edge, in lexicographic order."""
        t = vset(s)
        if len(t) >= self.k:
            raise ValueError(f"link requires |s| < k, got |s|={len(t)}")
        self._check_vertices(t)
        if not t:
            return self.edges
        idxs = self._incidence[t[0]]
        for v in t[1:]:
            idxs = idxs & self._incidence[v]
        ts = set(t)
        out = [tuple(w for w in self.edges[i] if w not in ts) for i in idxs]
        return tuple(sorted(out))

    def link_set(self, v: int) -> frozenset[tuple[int, ...]]:
        """Cached frozenset form of link({v}), used by reachability hot paths."""
        got = self._links.get(v)
        if got is None:
            got = frozenset(self.link((v,)))
            self._links[v] = got
        return got

    def induced(self, s: Iterable[int]) -> "Hypergraph":
        """Subgraph on s with vertices relabelled 0..|s|-1 preserving order."""
        t = vset(s)
        self._check_vertices(t)
        pos = {v: i for i, v in enumerate(t)}
        ts = set(t)
        kept = [tuple(pos[v] for v in e) for e in self.edges if ts.issuperset(e)]
        return Hypergraph(self.k, len(t), kept)

    def degree_profile(self) -> tuple[int, ...]:
        """(min_l_degree(l) for l = 0..k-1); small hosts only."""
        return tuple(self.min_l_degree(l) for l in range(self.k))


# -- .khg serialisation ------------------------------------------------------


def _data_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def parse_khg(text: str) -> Hypergraph:
    """Parse .khg text.  Rejects malformed input with the offending line number."""
    lines = _data_lines(text)
    try:
        no, header = next(lines)
    except StopIteration:
        raise KhgFormatError("missing 'k n' header line") from None
    if len(header) != 2:
        raise KhgFormatError("header must be two integers 'k n'", no)
    try:
        k, n = int(header[0]), int(header[1])
    except ValueError:
        raise KhgFormatError("header must be two integers 'k n'", no) from None
    if k < 2:
        raise KhgFormatError(f"uniformity must be >= 2, got {k}", no)
    if n < 0:
        raise KhgFormatError(f"vertex count must be >= 0, got {n}", no)
    edges: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for no, toks in lines:
        if len(toks) != k:
            raise KhgFormatError(f"expected {k} vertex ids, got {len(toks)}", no)
        try:
            e = tuple(int(t) for t in toks)
        except ValueError:
            raise KhgFormatError("vertex ids must be integers", no) from None
        t = tuple(sorted(e))
        if len(set(t)) != k:
            raise KhgFormatError(f"edge {e} repeats a vertex", no)
        if t[0] < 0 or t[-1] >= n:
            raise KhgFormatError(f"edge {e} has a vertex outside 0..{n - 1}", no)
        if t in seen:
            raise KhgFormatError(f"duplicate edge {e}", no)
        seen.add(t)
        edges.append(t)
    try:
        return Hypergraph(k, n, edges)
    except ValueError as exc:
        raise KhgFormatError(str(exc)) from None


def render_khg(h: Hypergraph) -> str:
    """Canonical .khg text: header then sorted edges, LF line endings."""
    out = [f"{h.k} {h.n}"]
    out.extend(" ".join(str(v) for v in e) for e in h.edges)
    return "\n".join(out) + "\n"


def load_khg(path) -> Hypergraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_khg(fh.read())


def save_khg(h: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_khg(h))
