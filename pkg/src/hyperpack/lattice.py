"""Index vectors, robust index sets, integer lattices and the coset group.

Every computation here is exact integer arithmetic.  Lattices are stored by a
row-style Hermite normal form basis (non-negative pivots, entries above each
pivot reduced into [0, pivot)), together with the transform expressing the
basis in terms of the original generators so that membership witnesses can be
pulled back to generator coefficients.

The ambient lattice consists of the integer vectors whose coordinate sum is
divisible by the pattern order m.  The quotient by a full-rank sublattice is a
finite abelian group; its order and elementary divisors come from the Smith
normal form of the sublattice expressed in ambient coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .hgraph import Hypergraph
from .partition import Partition
from .pattern import Pattern, enumerate_copies
from .reach import DENSITY, EXACT_ROBUST

__all__ = [
    "index_vector",
    "RobustIndexSet",
    "robust_index_set",
    "IndexLattice",
    "lattice_from",
    "member",
    "member_witness",
    "lmax_member",
    "CosetGroup",
    "Residue",
    "coset_group",
    "residue",
    "NotInAmbientLatticeError",
    "InfiniteGroupError",
]


class NotInAmbientLatticeError(ValueError):
    """A vector (or generator) whose coordinate sum is not divisible by m."""


class InfiniteGroupError(ValueError):
    """Residue queried on an infinite coset group."""


def index_vector(part: Partition, s: Iterable[int]) -> tuple[int, ...]:
    """Per-class intersection sizes of s, in class order."""
    where = part.class_index()
    counts = [0] * part.d
    for v in set(s):
        try:
            counts[where[v]] += 1
        except KeyError:
            raise ValueError(f"vertex {v} lies in no partition class") from None
    return tuple(counts)


# -- robust index set ----------------------------------------------------------


@dataclass(frozen=True)
class RobustIndexSet:
    """Index vectors realised by enough copies, with exact per-vector counts.

    counts records every realizable vector; vectors holds the ones meeting
    the threshold (exact mode: an absolute count; density mode: mu * n^m).
    """

    d: int
    m: int
    vectors: tuple[tuple[int, ...], ...]
    counts: tuple[tuple[tuple[int, ...], int], ...]
    mode: str
    threshold: Fraction

    def count_of(self, vec: tuple[int, ...]) -> int:
        for v, c in self.counts:
            if v == vec:
                return c
        return 0


def robust_index_set(
    h: Hypergraph,
    p: Pattern,
    part: Partition,
    *,
    mode: str = EXACT_ROBUST,
    count_threshold: int = 1,
    mu: Fraction = Fraction(1, 100),
    copies: Sequence[tuple[int, ...]] | None = None,
) -> RobustIndexSet:
    """Group the copies of p in h by index vector and keep the well-represented ones."""
    if mode not in (EXACT_ROBUST, DENSITY):
        raise ValueError(f"unknown mode {mode!r}")
    if copies is None:
        copies = enumerate_copies(h, p)
    tally: dict[tuple[int, ...], int] = {}
    for c in copies:
        vec = index_vector(part, c)
        tally[vec] = tally.get(vec, 0) + 1
    if mode == EXACT_ROBUST:
        if count_threshold < 1:
            raise ValueError(f"count threshold must be >= 1, got {count_threshold}")
        threshold = Fraction(count_threshold)
    else:
        if not 0 < mu < 1:
            raise ValueError(f"mu must be in (0,1), got {mu}")
        threshold = Fraction(mu) * h.n**p.m
    vectors = tuple(sorted(v for v, c in tally.items() if c >= threshold))
    return RobustIndexSet(
        d=part.d,
        m=p.m,
        vectors=vectors,
        counts=tuple(sorted(tally.items())),
        mode=mode,
        threshold=threshold,
    )


# -- Hermite and Smith normal forms -------------------------------------------


def _hnf_with_transform(rows: Sequence[Sequence[int]], d: int):
    """Row HNF of an integer matrix plus the transform T with basis = T * rows.

    Only the rank-many basis rows are returned; pivots are positive and the
    entries above each pivot are reduced into [0, pivot).
    """
    nr = len(rows)
    a = [list(map(int, r)) for r in rows]
    t = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]

    def combine(i: int, j: int, q: int) -> None:
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        t[i] = [x - q * y for x, y in zip(t[i], t[j])]

    pr = 0
    for col in range(d):
        while True:
            live = [i for i in range(pr, nr) if a[i][col] != 0]
            if not live:
                break
            piv = min(live, key=lambda i: (abs(a[i][col]), i))
            a[pr], a[piv] = a[piv], a[pr]
            t[pr], t[piv] = t[piv], t[pr]
            clean = True
            for i in range(pr + 1, nr):
                if a[i][col]:
                    combine(i, pr, a[i][col] // a[pr][col])
                    if a[i][col]:
                        clean = False
            if clean:
                break
        if [i for i in range(pr, nr) if a[i][col] != 0]:
            if a[pr][col] < 0:
                a[pr] = [-x for x in a[pr]]
                t[pr] = [-x for x in t[pr]]
            for i in range(pr):
                q = a[i][col] // a[pr][col]
                if q:
                    combine(i, pr, q)
            pr += 1
    return [tuple(r) for r in a[:pr]], [tuple(r) for r in t[:pr]]


def _snf_divisors(rows: Sequence[Sequence[int]], d: int) -> list[int]:
    """Diagonal of the Smith normal form (positive, each dividing the next)."""
    a = [list(map(int, r)) for r in rows]
    nr = len(a)
    out: list[int] = []
    top = 0
    while top < min(nr, d):
        # Find any nonzero entry in the active block.
        pos = None
        for i in range(top, nr):
            for j in range(top, d):
                if a[i][j]:
                    if pos is None or abs(a[i][j]) < abs(a[pos[0]][pos[1]]):
                        pos = (i, j)
        if pos is None:
            break
        i0, j0 = pos
        a[top], a[i0] = a[i0], a[top]
        for r in a:
            r[top], r[j0] = r[j0], r[top]
        # Clear the pivot row and column by Euclidean steps.
        dirty = True
        while dirty:
            dirty = False
            for i in range(top + 1, nr):
                if a[i][top]:
                    q = a[i][top] // a[top][top]
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    if a[i][top]:
                        a[top], a[i] = a[i], a[top]
                        dirty = True
            for j in range(top + 1, d):
                if a[top][j]:
                    q = a[top][j] // a[top][top]
                    for r in a:
                        r[j] -= q * r[top]
                    if a[top][j]:
                        for r in a:
                            r[top], r[j] = r[j], r[top]
                        dirty = True
        # Enforce divisibility of the trailing block by the pivot.
        p = abs(a[top][top])
        fixed = False
        for i in range(top + 1, nr):
            for j in range(top + 1, d):
                if a[i][j] % p:
                    a[top] = [x + y for x, y in zip(a[top], a[i])]
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        out.append(p)
        top += 1
    return out


# -- lattices ------------------------------------------------------------------


@dataclass(frozen=True)
class IndexLattice:
    """Integer span of the generators, held as an HNF basis plus transform."""

    d: int
    generators: tuple[tuple[int, ...], ...]
    basis: tuple[tuple[int, ...], ...]
    transform: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)


def lattice_from(gens, d: int | None = None) -> IndexLattice:
    """Lattice generated by an iterable of integer vectors (or a RobustIndexSet)."""
    if isinstance(gens, RobustIndexSet):
        if d is not None and d != gens.d:
            raise ValueError("dimension disagrees with the robust index set")
        d = gens.d
        vecs = list(gens.vectors)
    else:
        vecs = [tuple(int(x) for x in v) for v in gens]
        if d is None:
            if not vecs:
                raise ValueError("empty generator set needs an explicit dimension")
            d = len(vecs[0])
    if any(len(v) != d for v in vecs):
        raise ValueError("generators must share one dimension")
    vecs = sorted(set(vecs))
    basis, transform = _hnf_with_transform(vecs, d)
    return IndexLattice(
        d=d, generators=tuple(vecs), basis=tuple(basis), transform=tuple(transform)
    )


def _pivot_col(row: tuple[int, ...]) -> int:
    for j, x in enumerate(row):
        if x:
            return j
    raise ValueError("zero basis row")


def _solve_in_basis(
    basis: Sequence[tuple[int, ...]], v: Sequence[int]
) -> Optional[list[int]]:
    x = list(v)
    coeffs = []
    for row in basis:
        col = _pivot_col(row)
        q, rem = divmod(x[col], row[col])
        if rem:
            return None
        coeffs.append(q)
        x = [a - q * b for a, b in zip(x, row)]
    return coeffs if not any(x) else None


def member(lat: IndexLattice, v: Sequence[int]) -> bool:
    """True iff v is an integer combination of the generators (HNF back-substitution)."""
    v = tuple(int(x) for x in v)
    if len(v) != lat.d:
        raise ValueError(f"vector has dimension {len(v)}, lattice {lat.d}")
    return _solve_in_basis(lat.basis, v) is not None


def member_witness(lat: IndexLattice, v: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Generator coefficients expressing v, or None; aligned with lat.generators."""
    v = tuple(int(x) for x in v)
    if len(v) != lat.d:
        raise ValueError(f"vector has dimension {len(v)}, lattice {lat.d}")
    basis_coeffs = _solve_in_basis(lat.basis, v)
    if basis_coeffs is None:
        return None
    gen_coeffs = [0] * len(lat.generators)
    for c, trow in zip(basis_coeffs, lat.transform):
        for j, t in enumerate(trow):
            gen_coeffs[j] += c * t
    return tuple(gen_coeffs)


def lmax_member(d: int, m: int, v: Sequence[int]) -> bool:
    """True iff the coordinate sum of v is divisible by m."""
    v = tuple(int(x) for x in v)
    if len(v) != d:
        raise ValueError(f"vector has dimension {len(v)}, expected {d}")
    return sum(v) % m == 0


# -- coset group ---------------------------------------------------------------


@dataclass(frozen=True)
class Residue:
    """Canonical coset label: mixed-radix id plus reduced ambient coordinates."""

    id: int
    coords: tuple[int, ...]

    @property
    def is_identity(self) -> bool:
        return self.id == 0


@dataclass(frozen=True)
class CosetGroup:
    """The quotient of the ambient sum-divisible-by-m lattice by L.

    divisors lists the Smith normal form diagonal of L written in ambient
    coordinates, padded with zeros when L has deficient rank (each zero is a
    free factor, making the group infinite).
    """

    d: int
    m: int
    finite: bool
    order: Optional[int]
    divisors: tuple[int, ...]
    coord_basis: tuple[tuple[int, ...], ...]

    def to_coords(self, v: Sequence[int]) -> tuple[int, ...]:
        """Ambient-basis coordinates of an ambient-lattice vector."""
        v = tuple(int(x) for x in v)
        if len(v) != self.d:
            raise ValueError(f"vector has dimension {len(v)}, group {self.d}")
        total = sum(v)
        if total % self.m:
            raise NotInAmbientLatticeError(
                f"coordinate sum {total} not divisible by m={self.m}"
            )
        return (total // self.m,) + v[1:]

    def lift(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Inverse of to_coords."""
        coords = tuple(int(x) for x in coords)
        if len(coords) != self.d:
            raise ValueError(f"coords have dimension {len(coords)}, group {self.d}")
        first = self.m * coords[0] - sum(coords[1:])
        return (first,) + coords[1:]

    def residue(self, v: Sequence[int]) -> Residue:
        if not self.finite:
            raise InfiniteGroupError("residues are only canonical in a finite group")
        x = list(self.to_coords(v))
        for row in self.coord_basis:
            col = _pivot_col(row)
            q = x[col] // row[col]
            if q:
                x = [a - q * b for a, b in zip(x, row)]
        rid = 0
        for xi, row in zip(x, self.coord_basis):
            rid = rid * row[_pivot_col(row)] + xi
        return Residue(id=rid, coords=tuple(x))

    @property
    def identity(self) -> Residue:
        if not self.finite:
            raise InfiniteGroupError("identity residue needs a finite group")
        return Residue(id=0, coords=(0,) * self.d)

    def representatives(self) -> tuple[Residue, ...]:
        """All residues, ordered by id (identity first)."""
        if not self.finite:
            raise InfiniteGroupError("cannot enumerate an infinite group")
        ranges = [range(row[_pivot_col(row)]) for row in self.coord_basis]
        out = []
        for coords in itertools.product(*ranges):
            rid = 0
            for xi, row in zip(coords, self.coord_basis):
                rid = rid * row[_pivot_col(row)] + xi
            out.append(Residue(id=rid, coords=tuple(coords)))
        return tuple(sorted(out, key=lambda r: r.id))


def coset_group(lat: IndexLattice, m: int) -> CosetGroup:
    """Quotient of the ambient lattice by lat; finite iff lat has full rank.

    Every generator must lie in the ambient lattice (sum divisible by m);
    a violating generator raises NotInAmbientLatticeError.
    """
    if m < 1:
        raise ValueError(f"pattern order must be >= 1, got {m}")
    for g in lat.generators:
        if sum(g) % m:
            raise NotInAmbientLatticeError(
                f"generator {g} has coordinate sum {sum(g)}, not divisible by {m}"
            )
    d = lat.d
    coords_rows = []
    for b in lat.basis:
        total = sum(b)
        coords_rows.append((total // m,) + b[1:])
    coord_basis, _ = _hnf_with_transform(coords_rows, d)
    rank = len(coord_basis)
    divisors = _snf_divisors(coords_rows, d)
    finite = rank == d
    if finite:
        order = 1
        for e in divisors:
            order *= e
    else:
        order = None
        divisors = divisors + [0] * (d - rank)
    return CosetGroup(
        d=d,
        m=m,
        finite=finite,
        order=order,
        divisors=tuple(divisors),
        coord_basis=tuple(coord_basis),
    )


def residue(q: CosetGroup, v: Sequence[int]) -> Residue:
    """Canonical residue of v in q; v must be ambient and q finite."""
    return q.residue(v)
