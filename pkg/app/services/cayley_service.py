import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from app import config
from app.errors import CapExceededError, DisconnectedError, ParameterError
from app.schemas.presentation_schema import Presentation
from app.services.words_service import (
    IDENTITY, Word, generator_letters, get_engine, shortlex_key
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupBall:
    """Ball of radius R around e in the Cayley graph, vertices in shortlex order."""
    presentation: Presentation
    radius: int
    vertices: Tuple[Word, ...]
    lengths: Tuple[int, ...]
    edges: Tuple[Tuple[int, int, int], ...]  # (v, v*s, s) with s a positive generator
    index: Dict[Word, int] = field(repr=False)

    def __len__(self):
        return len(self.vertices)

    def index_of(self, w: Word) -> int:
        nf = get_engine(self.presentation).normal_form(w)
        if nf not in self.index:
            raise KeyError(f"{w} is not in the ball of radius {self.radius}")
        return self.index[nf]

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.vertices)))
        g.add_edges_from((u, v) for u, v, _ in self.edges if u != v)
        return g

    @cached_property
    def edge_lookup(self) -> Dict[Tuple[int, int], int]:
        """(from vertex, generator) -> edge position."""
        return {(u, s): i for i, (u, _, s) in enumerate(self.edges)}

    def layer_sizes(self) -> List[int]:
        sizes = [0] * (self.radius + 1)
        for r in self.lengths:
            sizes[r] += 1
        return sizes


@dataclass(frozen=True)
class BallPath:
    vertices: Tuple[int, ...]
    ball_restricted: bool

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


def build_ball(p: Presentation, R: int, vertex_cap: Optional[int] = None) -> GroupBall:
    if R < 0:
        raise ParameterError("Radius must be nonnegative")
    cap = vertex_cap or config.VERTEX_CAP
    engine = get_engine(p)
    letters = generator_letters(p.rank)

    layers: List[List[Word]] = [[IDENTITY]]
    seen = {IDENTITY}
    for r in range(1, R + 1):
        fresh = set()
        for v in layers[-1]:
            for s in letters:
                w = engine.normal_form(v + (s,))
                if w not in seen:
                    fresh.add(w)
        if len(seen) + len(fresh) > cap:
            raise CapExceededError(f"Ball of radius {R} exceeds the vertex cap {cap} at radius {r}")
        seen |= fresh
        layers.append(sorted(fresh, key=shortlex_key))

    vertices = tuple(w for layer in layers for w in layer)
    lengths = tuple(r for r, layer in enumerate(layers) for _ in layer)
    index = {w: i for i, w in enumerate(vertices)}

    edges = []
    for i, v in enumerate(vertices):
        for s in range(1, p.rank + 1):
            j = index.get(engine.normal_form(v + (s,)))
            if j is not None:
                edges.append((i, j, s))

    logger.info(f"✅ Ball R={R}: {len(vertices)} vertices, {len(edges)} edges")
    return GroupBall(
        presentation=p, radius=R, vertices=vertices, lengths=lengths,
        edges=tuple(edges), index=index,
    )


def volume_profile(p: Presentation, R: int, vertex_cap: Optional[int] = None) -> Tuple[List[int], bool]:
    """Cumulative ball volumes V(0..R) by breadth-first layers.

    Stops early when the cap is reached; the flag says whether all R+1 values are exact.
    """
    cap = vertex_cap or config.VERTEX_CAP
    engine = get_engine(p)
    letters = generator_letters(p.rank)
    seen = {IDENTITY}
    frontier = [IDENTITY]
    volumes = [1]
    for _ in range(R):
        fresh = set()
        for v in frontier:
            for s in letters:
                w = engine.normal_form(v + (s,))
                if w not in seen and w not in fresh:
                    fresh.add(w)
        if len(seen) + len(fresh) > cap:
            logger.warning(f"⚠️ Volume profile stopped at radius {len(volumes) - 1} (cap {cap})")
            return volumes, False
        seen |= fresh
        frontier = list(fresh)
        volumes.append(len(seen))
    return volumes, True


def geodesic(ball: GroupBall, v: int, w: int) -> BallPath:
    """Lexicographically least shortest path from v to w inside the ball."""
    dist = nx.single_source_shortest_path_length(ball.graph, w)
    if v not in dist:
        raise DisconnectedError(f"Vertices {v} and {w} are disconnected within the ball")
    path = [v]
    cur = v
    while cur != w:
        cur = min(u for u in ball.graph.neighbors(cur) if dist.get(u) == dist[cur] - 1)
        path.append(cur)
    restricted = ball.lengths[v] + ball.lengths[w] > ball.radius
    return BallPath(vertices=tuple(path), ball_restricted=restricted)


def ball_distance(ball: GroupBall, v: int, w: int) -> int:
    return geodesic(ball, v, w).length


def is_edge_path(ball: GroupBall, path: Sequence[int]) -> bool:
    return all(ball.graph.has_edge(a, b) for a, b in zip(path, path[1:]))
