import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from app import config
from app.errors import DisconnectedError
from app.schemas.coned_schema import (
    AnnotatedPathRecord, BcpReport, BcpWitness, DeltaReport, PenetrationRecord
)
from app.services.cayley_service import GroupBall, build_ball
from app.services.words_service import Word, coset_key, distance, format_word

logger = logging.getLogger(__name__)

# doubled edge weights: Cayley edges have length 1, cone edges 1/2
EDGE_WEIGHT = 2
CONE_WEIGHT = 1


@dataclass(eq=False)
class ConedGraph:
    """Ball of the Cayley graph plus one vertex per coset gH meeting the ball.

    Vertices 0..n-1 are the ball elements; coset vertices follow, ordered by
    subgroup and then by least representative.
    """
    ball: GroupBall
    subgroups: Tuple[Tuple[str, FrozenSet[int]], ...]
    cosets: List[Tuple[str, Word, int]]  # (subgroup, coset key, representative element)
    members: List[Tuple[int, ...]]
    graph: nx.Graph
    _dg_cache: Dict[Tuple[int, int], int] = field(default_factory=dict, repr=False)

    @property
    def n_elements(self) -> int:
        return len(self.ball)

    def is_coset(self, v: int) -> bool:
        return v >= self.n_elements

    def label(self, v: int) -> str:
        p = self.ball.presentation
        if v < self.n_elements:
            return format_word(p, self.ball.vertices[v])
        name, _, rep = self.cosets[v - self.n_elements]
        rep_word = self.ball.vertices[rep]
        return name if not rep_word else f"{format_word(p, rep_word)}{name}"

    @cached_property
    def doubled_distances(self) -> np.ndarray:
        """Exact doubled distances between all vertices of the coned graph."""
        size = self.graph.number_of_nodes()
        D = np.full((size, size), -1, dtype=np.int64)
        for src, lengths in nx.all_pairs_dijkstra_path_length(self.graph, weight="weight"):
            for dst, dd in lengths.items():
                D[src, dst] = int(dd)
        if (D < 0).any():
            raise DisconnectedError("Coned-off graph is disconnected")
        return D

    def element_distances(self) -> np.ndarray:
        return self.doubled_distances[: self.n_elements, : self.n_elements] // 2

    def cayley_distance(self, u: int, v: int) -> int:
        """d_G between element vertices, through the word-problem engine."""
        key = (u, v) if u <= v else (v, u)
        if key not in self._dg_cache:
            self._dg_cache[key] = distance(self.ball.presentation, self.ball.vertices[u], self.ball.vertices[v])
        return self._dg_cache[key]

    def coset_members(self, v: int) -> Tuple[int, ...]:
        return self.members[v - self.n_elements]


def cone_off(ball: GroupBall, subgroups: Optional[Sequence[str]] = None) -> ConedGraph:
    p = ball.presentation
    names = list(subgroups) if subgroups is not None else [s.name for s in p.subgroups]
    specs = tuple((name, frozenset(p.subgroup(name).generators)) for name in names)

    g = nx.Graph()
    n = len(ball)
    g.add_nodes_from(range(n))
    for u, v, _ in ball.edges:
        if u != v:
            g.add_edge(u, v, weight=EDGE_WEIGHT)

    cosets: List[Tuple[str, Word, int]] = []
    members: List[Tuple[int, ...]] = []
    for name, gens in specs:
        groups: Dict[Word, List[int]] = {}
        for i, w in enumerate(ball.vertices):
            groups.setdefault(coset_key(p, w, gens), []).append(i)
        for key, elems in sorted(groups.items(), key=lambda kv: kv[1][0]):
            vid = n + len(cosets)
            cosets.append((name, key, elems[0]))
            members.append(tuple(elems))
            g.add_node(vid)
            for i in elems:
                g.add_edge(i, vid, weight=CONE_WEIGHT)

    logger.info(f"✅ Coned-off graph: {n} elements, {len(cosets)} coset vertices ({', '.join(names) or 'no subgroups'})")
    return ConedGraph(ball=ball, subgroups=specs, cosets=cosets, members=members, graph=g)


# ---------------------------------------------------------------------------
# Four-point hyperbolicity
# ---------------------------------------------------------------------------

@dataclass
class DeltaResult:
    value_doubled: int
    mode: str
    quadruples: int
    witness: Tuple[int, ...]


def _four_point(d: np.ndarray, x, y, z, w) -> np.ndarray:
    sums = np.stack([d[x, y] + d[z, w], d[x, z] + d[y, w], d[x, w] + d[y, z]])
    sums.sort(axis=0)
    return sums[2] - sums[1]


def delta_hyperbolicity(G: ConedGraph, quadruple_cap: int = None, seed: int = None) -> DeltaResult:
    """Least delta for the four-point condition over element vertices, reported as 2*delta.

    Distances between elements are integers, so the doubled value is exact. Above the
    quadruple cap a seeded uniform sample is scanned instead.
    """
    cap = quadruple_cap or config.QUADRUPLE_CAP
    d = G.element_distances()
    n = len(d)
    total = comb(n, 4)
    if n < 4:
        return DeltaResult(0, "exhaustive", total, ())

    if total <= cap:
        best, witness = -1, ()
        for x in range(n):
            for y in range(x + 1, n - 2):
                zs = np.arange(y + 1, n)
                iu = np.triu_indices(len(zs), 1)
                zz, ww = zs[iu[0]], zs[iu[1]]
                vals = _four_point(d, x, y, zz, ww)
                j = int(np.argmax(vals))
                if vals[j] > best:
                    best, witness = int(vals[j]), (x, y, int(zz[j]), int(ww[j]))
        return DeltaResult(best, "exhaustive", total, witness)

    logger.warning(f"⚠️ {total} quadruples exceed the cap {cap}; sampling (lower estimate)")
    rng = np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)
    best, witness = -1, ()
    remaining = cap
    while remaining > 0:
        m = min(remaining, 200_000)
        q = rng.integers(0, n, size=(m, 4))
        vals = _four_point(d, q[:, 0], q[:, 1], q[:, 2], q[:, 3])
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, witness = int(vals[j]), tuple(sorted(int(t) for t in q[j]))
        remaining -= m
    return DeltaResult(best, "sampled", cap, witness)


def delta_report(G: ConedGraph, result: DeltaResult) -> DeltaReport:
    return DeltaReport(
        value_doubled=result.value_doubled, R=G.ball.radius, mode=result.mode, quadruples=result.quadruples,
        witness=[G.label(v) for v in result.witness],
    )


def delta_by_radius(p, radii: Sequence[int], subgroups: Optional[Sequence[str]] = None,
                    seed: int = None) -> List[DeltaReport]:
    reports = []
    for R in radii:
        G = cone_off(build_ball(p, R), subgroups)
        reports.append(delta_report(G, delta_hyperbolicity(G, seed=seed)))
    values = [r.value_doubled for r in reports]
    if any(b < a for a, b in zip(values, values[1:])):
        logger.warning(f"⚠️ Restricted delta estimates are not monotone in R: {values}")
    return reports


# ---------------------------------------------------------------------------
# Bounded coset penetration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Penetration:
    coset: int
    entry: int
    exit: int
    entry_index: int
    exit_index: int


@dataclass(frozen=True)
class AnnotatedPath:
    vertices: Tuple[int, ...]
    penetrations: Tuple[Penetration, ...]

    def backtracks(self) -> bool:
        cosets = [pen.coset for pen in self.penetrations]
        return len(cosets) != len(set(cosets))


def annotate(G: ConedGraph, path: Sequence[int]) -> AnnotatedPath:
    """Mark each pass through a coset vertex with its entry and exit elements."""
    pens = []
    for i, v in enumerate(path):
        if G.is_coset(v) and 0 < i < len(path) - 1:
            pens.append(Penetration(v, path[i - 1], path[i + 1], i - 1, i + 1))
    return AnnotatedPath(tuple(path), tuple(pens))


def path_record(G: ConedGraph, path: AnnotatedPath) -> AnnotatedPathRecord:
    return AnnotatedPathRecord(
        vertices=[G.label(v) for v in path.vertices],
        penetrations=[
            PenetrationRecord(coset=G.label(pen.coset), entry=G.label(pen.entry), exit=G.label(pen.exit),
                              entry_index=pen.entry_index, exit_index=pen.exit_index)
            for pen in path.penetrations
        ],
    )


@dataclass
class BcpResult:
    c1_entry_exit: int = 0
    c1_pairwise: int = 0
    mode: str = "exhaustive"
    endpoint_pairs: int = 0
    geodesics: int = 0
    witnesses: Dict[str, Tuple[int, int, AnnotatedPath, AnnotatedPath]] = field(default_factory=dict)

    @property
    def c1(self) -> int:
        return max(self.c1_entry_exit, self.c1_pairwise)


def geodesics_between(G: ConedGraph, u: int, v: int, cap: int) -> Tuple[List[AnnotatedPath], bool]:
    paths = []
    capped = False
    for path in nx.all_shortest_paths(G.graph, u, v, weight="weight"):
        paths.append(tuple(path))
        if len(paths) >= cap:
            capped = True
            break
    return [annotate(G, path) for path in sorted(paths)], capped


def witness_value(G: ConedGraph, kind: str, coset: int, p: AnnotatedPath, q: AnnotatedPath) -> int:
    """Recompute a BCP witness value from the two paths alone."""
    pc = {pen.coset: pen for pen in p.penetrations}
    qc = {pen.coset: pen for pen in q.penetrations}
    if kind == "entry_exit":
        pen = pc[coset]
        return G.cayley_distance(pen.entry, pen.exit)
    a, b = pc[coset], qc[coset]
    return max(G.cayley_distance(a.entry, b.entry), G.cayley_distance(a.exit, b.exit))


def bcp_estimate(G: ConedGraph, geodesic_cap: int = None) -> BcpResult:
    """Constants of bounded coset penetration for pairs of geodesics without backtracking."""
    cap = geodesic_cap or config.GEODESIC_CAP
    result = BcpResult()
    if not G.cosets:
        return result
    n = G.n_elements
    for u in range(n):
        for v in range(u + 1, n):
            paths, capped = geodesics_between(G, u, v, cap)
            if capped:
                result.mode = "sampled"
            paths = [p for p in paths if not p.backtracks()]
            result.endpoint_pairs += 1
            result.geodesics += len(paths)
            for p in paths:
                qsets = None
                for q in paths:
                    if p is q:
                        continue
                    qsets = {pen.coset for pen in q.penetrations}
                    for pen in p.penetrations:
                        if pen.coset not in qsets:
                            val = G.cayley_distance(pen.entry, pen.exit)
                            if val > result.c1_entry_exit:
                                result.c1_entry_exit = val
                                result.witnesses["entry_exit"] = (val, pen.coset, p, q)
                        else:
                            val = witness_value(G, "pairwise", pen.coset, p, q)
                            if val > result.c1_pairwise:
                                result.c1_pairwise = val
                                result.witnesses["pairwise"] = (val, pen.coset, p, q)
    if result.mode == "sampled":
        logger.warning(f"⚠️ Geodesic enumeration capped at {cap} per pair; BCP constants are lower bounds")
    logger.info(f"📊 BCP: c1_entry_exit={result.c1_entry_exit}, c1_pairwise={result.c1_pairwise}")
    return result


def bcp_report(G: ConedGraph, result: BcpResult) -> BcpReport:
    witnesses = [
        BcpWitness(kind=kind, value=val, coset=G.label(coset), paths=[path_record(G, p), path_record(G, q)])
        for kind, (val, coset, p, q) in sorted(result.witnesses.items())
    ]
    return BcpReport(
        c1_entry_exit=result.c1_entry_exit, c1_pairwise=result.c1_pairwise, mode=result.mode,
        endpoint_pairs=result.endpoint_pairs, geodesics=result.geodesics, witnesses=witnesses,
    )
