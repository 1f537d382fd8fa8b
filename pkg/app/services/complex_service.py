import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from app import config
from app.errors import CapExceededError, InfeasibleInstanceError, NotNullhomotopicError, ParameterError
from app.schemas.complex_schema import (
    CellRecord, ChainCounts, ChainRecord, ChainTerm, ComplexReport, ComplexStats, FaceIncidence
)
from app.services.cayley_service import GroupBall
from app.services.words_service import Word, format_word, get_engine, inverse, multiply

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cell:
    dim: int
    index: int
    boundary: Tuple[Tuple[int, int], ...]  # (face index, sign)
    vertices: Tuple[int, ...]
    anchor: Hashable
    shape: Hashable
    label: str


@dataclass(frozen=True)
class Chain:
    """Sparse integer chain; ``items`` is sorted by cell index and holds no zeros."""
    dim: int
    items: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, dim: int, mapping: Mapping[int, int]) -> "Chain":
        return cls(dim, tuple(sorted((i, c) for i, c in mapping.items() if c != 0)))

    @classmethod
    def cell(cls, dim: int, index: int, coeff: int = 1) -> "Chain":
        return cls.from_mapping(dim, {index: coeff})

    def as_dict(self) -> Dict[int, int]:
        return dict(self.items)

    def coeff(self, index: int) -> int:
        return self.as_dict().get(index, 0)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, _ in self.items)

    def is_zero(self) -> bool:
        return not self.items

    def _combine(self, other: "Chain", sign: int) -> "Chain":
        if other.dim != self.dim and self.items and other.items:
            raise ValueError(f"Cannot add chains of dimensions {self.dim} and {other.dim}")
        acc = self.as_dict()
        for i, c in other.items:
            acc[i] = acc.get(i, 0) + sign * c
        return Chain.from_mapping(self.dim if self.items else other.dim, acc)

    def __add__(self, other: "Chain") -> "Chain":
        return self._combine(other, 1)

    def __sub__(self, other: "Chain") -> "Chain":
        return self._combine(other, -1)

    def __neg__(self) -> "Chain":
        return Chain(self.dim, tuple((i, -c) for i, c in self.items))

    def __rmul__(self, scalar: int) -> "Chain":
        return Chain.from_mapping(self.dim, {i: scalar * c for i, c in self.items})

    def canonical_sign(self) -> "Chain":
        return -self if self.items and self.items[0][1] < 0 else self


@dataclass(eq=False)
class CellComplex:
    name: str
    cells: Dict[int, List[Cell]]
    vertex_lengths: Tuple[int, ...]
    base_vertex: int
    relative_anchor: Optional[Callable[[Hashable, Hashable], Hashable]] = None
    ball: Optional[GroupBall] = None
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def top_dim(self) -> int:
        return max((d for d, cs in self.cells.items() if cs), default=0)

    def num_cells(self, n: int) -> int:
        return len(self.cells.get(n, []))

    def cell_length(self, n: int, i: int) -> int:
        return int(self.cell_lengths(n)[i])

    def cell_lengths(self, n: int) -> np.ndarray:
        cache = self.extra.setdefault("lengths", {})
        if n not in cache:
            lengths = np.asarray(self.vertex_lengths, dtype=np.int64)
            cache[n] = np.array([int(lengths[list(c.vertices)].sum()) for c in self.cells.get(n, [])],
                                dtype=np.int64)
        return cache[n]

    def J(self, n: int) -> int:
        """Most faces on any n-cell; for 2-cells of a presentation complex, at most the longest relator."""
        return max((len(c.boundary) for c in self.cells.get(n, [])), default=0)

    def J_prime(self, n: int) -> int:
        """Most vertices on any n-cell."""
        return max((len(c.vertices) for c in self.cells.get(n, [])), default=0)

    def boundary_matrix(self, n: int) -> sparse.csr_matrix:
        """Rows are (n-1)-cells, columns are n-cells."""
        cache = self.extra.setdefault("matrices", {})
        if n not in cache:
            rows, cols, vals = [], [], []
            for c in self.cells.get(n, []):
                for face, sign in c.boundary:
                    rows.append(face)
                    cols.append(c.index)
                    vals.append(sign)
            shape = (self.num_cells(n - 1), self.num_cells(n))
            cache[n] = sparse.csr_matrix((vals, (rows, cols)), shape=shape, dtype=np.int64)
        return cache[n]

    @cached_property
    def cofaces(self) -> Dict[int, Dict[int, List[Tuple[int, int]]]]:
        """dim n -> (n-1)-face -> [(n-cell, sign)]."""
        out: Dict[int, Dict[int, List[Tuple[int, int]]]] = {}
        for n, cs in self.cells.items():
            table = out.setdefault(n, {})
            for c in cs:
                for face, sign in c.boundary:
                    table.setdefault(face, []).append((c.index, sign))
        return out


# ---------------------------------------------------------------------------
# Chain operations
# ---------------------------------------------------------------------------

def boundary(X: CellComplex, c: Chain) -> Chain:
    if c.dim < 1:
        raise ValueError("Boundary is defined for chains of dimension >= 1")
    acc: Dict[int, int] = {}
    cells = X.cells[c.dim]
    for i, coeff in c.items:
        for face, sign in cells[i].boundary:
            acc[face] = acc.get(face, 0) + sign * coeff
    return Chain.from_mapping(c.dim - 1, acc)


def counts(X: CellComplex, c: Chain, k_max: int = None) -> ChainCounts:
    """Plain, weighted and polynomially weighted sizes, all exact integers."""
    k_max = config.NORM_K_MAX if k_max is None else k_max
    lengths = X.cell_lengths(c.dim) if c.items else np.zeros(0, dtype=np.int64)
    count = weighted = support_weighted = 0
    norms = [0] * (k_max + 1)
    for i, coeff in c.items:
        a = abs(coeff)
        ell = int(lengths[i])
        count += a
        weighted += a * ell
        support_weighted += ell
        for k in range(k_max + 1):
            norms[k] += a * (1 + ell) ** k
    return ChainCounts(
        count=count, weighted_count=weighted, support_count=len(c.items),
        weighted_support_count=support_weighted, norms=norms,
    )


def check_boundary_squared(X: CellComplex) -> bool:
    for n in range(2, X.top_dim + 1):
        product = X.boundary_matrix(n - 1) @ X.boundary_matrix(n)
        if abs(product).sum() != 0:
            logger.error(f"❌ Boundary squared is nonzero in dimension {n} of {X.name}")
            return False
    return True


def is_connected_chain(X: CellComplex, c: Chain) -> bool:
    """Support cells are linked through shared faces (shared vertices for 1-chains)."""
    support = c.support
    if len(support) <= 1:
        return True
    cells = X.cells[c.dim]
    by_face: Dict[int, List[int]] = {}
    for i in support:
        for face, _ in cells[i].boundary:
            by_face.setdefault(face, []).append(i)
    seen = {support[0]}
    stack = [support[0]]
    while stack:
        i = stack.pop()
        for face, _ in cells[i].boundary:
            for j in by_face[face]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
    return len(seen) == len(support)


def translation_key(X: CellComplex, c: Chain) -> Hashable:
    """Key shared by a chain and its translates (when the complex knows how to translate)."""
    if X.relative_anchor is None or not c.items:
        return (c.dim, c.items)
    cells = X.cells[c.dim]
    best = None
    for i, _ in c.items:
        a0 = cells[i].anchor
        key = tuple(sorted((X.relative_anchor(a0, cells[j].anchor), cells[j].shape, coeff)
                           for j, coeff in c.items))
        if best is None or key < best:
            best = key
    return (c.dim, best)


def chain_to_record(c: Chain) -> ChainRecord:
    return ChainRecord(dim=c.dim, cells=[ChainTerm(id=i, coeff=k) for i, k in c.items])


def record_to_chain(X: CellComplex, record: ChainRecord) -> Chain:
    acc: Dict[int, int] = {}
    for term in record.cells:
        if term.id < 0 or term.id >= X.num_cells(record.dim):
            raise InfeasibleInstanceError(f"Cell {term.id} does not exist in dimension {record.dim}")
        acc[term.id] = acc.get(term.id, 0) + term.coeff
    return Chain.from_mapping(record.dim, acc)


# ---------------------------------------------------------------------------
# Complex builders
# ---------------------------------------------------------------------------

def _neighbor_table(ball: GroupBall) -> Dict[Tuple[int, int], Optional[int]]:
    engine = get_engine(ball.presentation)
    table = {}
    for i, v in enumerate(ball.vertices):
        for s in range(1, ball.presentation.rank + 1):
            for x in (s, -s):
                table[(i, x)] = ball.index.get(engine.normal_form(v + (x,)))
    return table


def trace_loop(X: CellComplex, start: int, word: Sequence[int]) -> Optional[Tuple[List[int], Dict[int, int]]]:
    """Follow ``word`` from vertex ``start``; returns visited vertices and the signed edge chain,
    or None when the path leaves the ball."""
    step = X.extra["step"]
    edge_of = X.extra["edge_of"]
    cur = start
    vertices = [start]
    coeffs: Dict[int, int] = {}
    for x in word:
        nxt = step.get((cur, x))
        if nxt is None:
            return None
        if nxt != cur:
            if x > 0:
                e, sign = edge_of[(cur, x)], 1
            else:
                e, sign = edge_of[(nxt, -x)], -1
            coeffs[e] = coeffs.get(e, 0) + sign
        cur = nxt
        vertices.append(cur)
    return vertices, coeffs


def loop_chain(X: CellComplex, start: int, word: Sequence[int]) -> Chain:
    traced = trace_loop(X, start, word)
    if traced is None:
        raise NotNullhomotopicError("Loop leaves the ball")
    vertices, coeffs = traced
    if vertices[-1] != start:
        raise InfeasibleInstanceError("Word does not trace a closed loop")
    return Chain.from_mapping(1, coeffs)


def presentation_complex(ball: GroupBall) -> CellComplex:
    """Cayley 2-complex of the presentation restricted to the ball."""
    p = ball.presentation
    engine = get_engine(p)
    if not engine.geodesic:
        logger.warning("⚠️ Presentation complex built under a rewriting engine; relator loops rely on its normal forms")

    cells0 = [Cell(0, i, (), (i,), w, ("v",), format_word(p, w)) for i, w in enumerate(ball.vertices)]
    cells1 = []
    edge_of: Dict[Tuple[int, int], int] = {}
    skipped = 0
    for u, v, s in ball.edges:
        if u == v:
            skipped += 1
            continue
        idx = len(cells1)
        edge_of[(u, s)] = idx
        label = f"{format_word(p, ball.vertices[u])}-{p.generator_names[s - 1]}"
        cells1.append(Cell(1, idx, ((u, -1), (v, 1)), tuple(sorted((u, v))), ball.vertices[u], ("e", s), label))
    if skipped:
        logger.warning(f"⚠️ Skipped {skipped} loop edges (generators trivial in the group)")

    X = CellComplex(
        name=f"cayley2({','.join(p.generator_names)};R={ball.radius})",
        cells={0: cells0, 1: cells1, 2: []},
        vertex_lengths=ball.lengths,
        base_vertex=0,
        relative_anchor=lambda a0, a: engine.normal_form(multiply(inverse(a0), a)),
        ball=ball,
    )
    X.extra["step"] = _neighbor_table(ball)
    X.extra["edge_of"] = edge_of

    seen = set()
    cells2 = X.cells[2]
    for g in range(len(ball)):
        for ri, r in enumerate(p.relators):
            traced = trace_loop(X, g, r)
            if traced is None:
                continue
            vertices, coeffs = traced
            chain = Chain.from_mapping(1, coeffs)
            if chain.is_zero():
                continue
            key = chain.canonical_sign().items
            if key in seen:
                continue
            seen.add(key)
            idx = len(cells2)
            label = f"{format_word(p, ball.vertices[g])}:{format_word(p, r)}"
            cells2.append(Cell(2, idx, chain.items, tuple(sorted(set(vertices))), ball.vertices[g], ("r", ri), label))

    logger.info(f"✅ {X.name}: {len(cells0)} vertices, {len(cells1)} edges, {len(cells2)} relator cells")
    return X


def cubical_lattice(k: int, R: int, maxdim: Optional[int] = None) -> CellComplex:
    """Standard cubical complex of Z^k on the box [-R, R]^k with l1 vertex lengths."""
    if k not in (2, 3):
        raise ParameterError("cubical_lattice supports k in {2, 3}")
    if R < 1:
        raise ParameterError("cubical_lattice needs R >= 1")
    maxdim = k if maxdim is None else maxdim
    if not 0 <= maxdim <= min(k, 3):
        raise ParameterError("maxdim must lie between 0 and min(k, 3)")

    points = list(itertools.product(range(-R, R + 1), repeat=k))
    estimate = len(points) * 2 ** k
    if estimate > config.VERTEX_CAP:
        raise CapExceededError(f"Cubical lattice k={k}, R={R} exceeds the size cap")

    def shift(x, axes):
        y = list(x)
        for s in axes:
            y[s] += 1
        return tuple(y)

    index: Dict[int, Dict[Tuple, int]] = {}
    cells: Dict[int, List[Cell]] = {}
    for d in range(maxdim + 1):
        index[d] = {}
        cells[d] = []
        for x in points:
            for S in itertools.combinations(range(k), d):
                if any(x[s] + 1 > R for s in S):
                    continue
                bnd = []
                for i, s in enumerate(S):
                    rest = tuple(t for t in S if t != s)
                    sign = (-1) ** i
                    bnd.append((index[d - 1][(shift(x, (s,)), rest)], sign))
                    bnd.append((index[d - 1][(x, rest)], -sign))
                idx = len(cells[d])
                index[d][(x, S)] = idx
                verts = sorted(index[0][(shift(x, T), ())]
                               for m in range(d + 1) for T in itertools.combinations(S, m))
                cells[d].append(Cell(d, idx, tuple(sorted(bnd)), tuple(verts), x, S, f"[{x};{S}]"))

    origin = tuple([0] * k)
    X = CellComplex(
        name=f"cubical(Z^{k};R={R})",
        cells=cells,
        vertex_lengths=tuple(sum(abs(t) for t in x) for x in points),
        base_vertex=index[0][(origin, ())],
        relative_anchor=lambda a0, a: tuple(u - v for u, v in zip(a, a0)),
    )
    X.extra["index"] = index
    logger.info(f"✅ {X.name}: " + ", ".join(f"{len(cells[d])} {d}-cells" for d in range(maxdim + 1)))
    return X


def cube_cell(X: CellComplex, corner: Sequence[int], axes: Sequence[int]) -> int:
    return X.extra["index"][len(axes)][(tuple(corner), tuple(axes))]


def box_surface(X: CellComplex, lo: Sequence[int], size: int) -> Chain:
    """Boundary of the union of top cells in the box [lo, lo+size]^k."""
    k = len(lo)
    total: Dict[int, int] = {}
    for offset in itertools.product(range(size), repeat=k):
        corner = tuple(l + o for l, o in zip(lo, offset))
        total[cube_cell(X, corner, tuple(range(k)))] = 1
    return boundary(X, Chain.from_mapping(k, total))


def complex_report(X: CellComplex) -> ComplexReport:
    cells = {}
    for n in sorted(X.cells):
        lengths = X.cell_lengths(n)
        cells[n] = [
            CellRecord(
                id=c.index, label=c.label, vertices=list(c.vertices), length=int(lengths[c.index]),
                boundary=[FaceIncidence(face=f, sign=s) for f, s in c.boundary],
            )
            for c in X.cells[n]
        ]
    stats = [ComplexStats(dim=n, cells=X.num_cells(n), J=X.J(n), J_prime=X.J_prime(n)) for n in sorted(X.cells)]
    return ComplexReport(
        name=X.name, base_vertex=X.base_vertex, vertex_lengths=list(X.vertex_lengths),
        cells=cells, stats=stats, boundary_squared_zero=check_boundary_squared(X),
    )


def chains_from_cells(dim: int, cells: Iterable[Tuple[int, int]]) -> Chain:
    acc: Dict[int, int] = {}
    for i, c in cells:
        acc[i] = acc.get(i, 0) + c
    return Chain.from_mapping(dim, acc)
