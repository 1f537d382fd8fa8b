import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from app import config
from app.errors import (
    BudgetExhaustedError, CapExceededError, InfeasibleInstanceError, NotABoundaryError, ParameterError,
    NotACycleError, NotNullhomotopicError
)
from app.schemas.filling_schema import (
    BridgeReport, BridgeViolation, DehnTableEntry, DehnTableReport, DehnWitness, DominationReport,
    FillingReport, PolyFitReport, RadiusComparisonReport, RadiusDiff
)
from app.services.complex_service import (
    CellComplex, Chain, boundary, chain_to_record, counts, loop_chain, trace_loop, translation_key
)
from app.services.words_service import cyclic_conjugates, cyclic_reduce, free_reduce, inverse

logger = logging.getLogger(__name__)

EPS = 1e-6


@dataclass
class FillingResult:
    filling: Optional[Chain]
    count: Optional[int]
    weighted_count: Optional[int]
    status: str  # 'exact', 'upper-bound', 'lp-lower-bound'
    lower_bound: Fraction
    solver: str  # 'diagram-bfs', 'ilp', 'lp'
    objective: str = "count"
    nodes: int = 0

    @property
    def value(self) -> Optional[int]:
        return self.weighted_count if self.objective == "weighted" else self.count


def _lp_fraction(z: float) -> Fraction:
    return Fraction(math.floor(z * 10 ** 6 + 1e-3), 10 ** 6)


def _ceil(z: float) -> int:
    return int(math.ceil(z - EPS))


# ---------------------------------------------------------------------------
# Integer programming
# ---------------------------------------------------------------------------

@dataclass
class _Outcome:
    solution: Optional[np.ndarray]
    value: Optional[int]
    closed: bool
    lower_bound: int
    nodes: int
    root_infeasible: bool = False


def _branch_and_bound(c: np.ndarray, A, b: np.ndarray, max_nodes: int, deadline: float) -> _Outcome:
    """Depth-first branch and bound over nonnegative integer x with A x = b, LP bounds from HiGHS."""
    n = len(c)
    stack: List[Tuple[np.ndarray, np.ndarray, float]] = [
        (np.zeros(n), np.full(n, np.inf), -np.inf)
    ]
    best_x, best = None, math.inf
    nodes = 0
    root_infeasible = False
    exhausted = False
    while stack:
        if nodes >= max_nodes or time.monotonic() > deadline:
            exhausted = True
            break
        lo, hi, parent = stack.pop()
        if parent > -np.inf and _ceil(parent) >= best:
            continue
        nodes += 1
        bounds = [(l, None if np.isinf(h) else h) for l, h in zip(lo, hi)]
        res = linprog(c, A_eq=A, b_eq=b, bounds=bounds, method="highs")
        if res.status != 0:
            if nodes == 1 and res.status == 2:
                root_infeasible = True
            continue
        if _ceil(res.fun) >= best:
            continue
        x = res.x
        frac = x - np.floor(x)
        score = np.minimum(frac, 1 - frac)
        j = int(np.argmax(score))
        if score[j] < EPS:
            cand = np.rint(x).astype(np.int64)
            if np.array_equal(A @ cand, b):
                val = int(c @ cand)
                if val < best:
                    best, best_x = val, cand
            continue
        down_hi = hi.copy()
        down_hi[j] = math.floor(x[j])
        up_lo = lo.copy()
        up_lo[j] = math.floor(x[j]) + 1
        stack.append((up_lo, hi, res.fun))
        stack.append((lo, down_hi, res.fun))

    if exhausted:
        pending = [_ceil(p) for _, _, p in stack if p > -np.inf]
        lower = min(pending + ([best] if best_x is not None else [])) if pending else (best if best_x is not None else 0)
    else:
        lower = best if best_x is not None else 0
    return _Outcome(best_x, None if best_x is None else best, not exhausted, int(lower), nodes, root_infeasible)


def _filling_system(X: CellComplex, b: Chain, weighted: bool):
    D = X.boundary_matrix(b.dim + 1).astype(np.int64)
    m = D.shape[1]
    A = sparse.hstack([D, -D]).tocsr()
    rhs = np.zeros(D.shape[0], dtype=np.int64)
    for i, coeff in b.items:
        rhs[i] = coeff
    w = X.cell_lengths(b.dim + 1) if weighted else np.ones(m, dtype=np.int64)
    c = np.concatenate([w, w]).astype(np.int64)
    return A, rhs, c, m


def _lex_least(A, rhs: np.ndarray, c: np.ndarray, m: int, value: int, x: np.ndarray,
               max_nodes: int, deadline: float) -> Tuple[np.ndarray, int]:
    """Fix coefficients cell by cell to the least value any optimal filling allows.

    The result is the optimal filling whose coefficient vector is lexicographically least.
    Stops early, keeping the current optimum, if the node or time budget runs out.
    """
    rows = [A, sparse.csr_matrix(c.reshape(1, -1))]
    rhs_rows = [rhs, np.array([value], dtype=np.int64)]
    nodes = 0
    for j in range(m):
        goal = np.zeros(2 * m, dtype=np.int64)
        goal[j], goal[m + j] = 1, -1
        A_j = sparse.vstack(rows).tocsr()
        b_j = np.concatenate(rhs_rows)
        current = int(x[j] - x[m + j])
        relaxed = linprog(goal, A_eq=A_j, b_eq=b_j, bounds=(0, None), method="highs")
        if relaxed.status == 0 and _ceil(relaxed.fun) >= current:
            least = current
        else:
            outcome = _branch_and_bound(goal, A_j, b_j, max_nodes, deadline)
            nodes += outcome.nodes
            if not outcome.closed or outcome.solution is None:
                logger.warning(f"⚠️ Tie-break stopped at cell {j}; keeping the current optimal filling")
                return x, nodes
            x, least = outcome.solution, int(outcome.value)
        rows.append(sparse.csr_matrix(goal.reshape(1, -1)))
        rhs_rows.append(np.array([least], dtype=np.int64))
    return x, nodes


def lex_key(chain: Chain, m: int) -> Tuple[int, ...]:
    """Coefficient vector of a chain over ``m`` cells, the order used to break ties."""
    vec = [0] * m
    for i, k in chain.items:
        vec[i] = k
    return tuple(vec)


def _check_cycle(X: CellComplex, b: Chain):
    if b.dim >= 1 and not boundary(X, b).is_zero():
        raise NotACycleError(f"Chain of dimension {b.dim} has nonzero boundary")


def min_filling(X: CellComplex, b: Chain, objective: str = "count", max_nodes: int = None,
                max_seconds: float = None, solver: str = "ilp", tie_break: bool = True) -> FillingResult:
    """Least (weighted) size of an integer chain a with boundary(a) = b."""
    weighted = objective == "weighted"
    max_nodes = max_nodes or config.MAX_NODES
    max_seconds = max_seconds or config.MAX_SECONDS
    _check_cycle(X, b)
    if b.is_zero():
        empty = Chain(b.dim + 1)
        return FillingResult(empty, 0, 0, "exact", Fraction(0), solver, objective)
    if X.num_cells(b.dim + 1) == 0:
        raise NotABoundaryError(f"No {b.dim + 1}-cells are available to fill a nonzero {b.dim}-cycle")

    A, rhs, c, m = _filling_system(X, b, weighted)

    if solver == "lp":
        res = linprog(c, A_eq=A, b_eq=rhs, bounds=(0, None), method="highs")
        if res.status == 2:
            raise NotABoundaryError("Cycle is not a boundary (LP relaxation infeasible)")
        return FillingResult(None, None, None, "lp-lower-bound", _lp_fraction(res.fun), "lp", objective, 1)

    deadline = time.monotonic() + max_seconds
    outcome = _branch_and_bound(c, A, rhs, max_nodes, deadline)
    if outcome.root_infeasible:
        raise NotABoundaryError("Cycle is not a boundary (LP relaxation infeasible)")
    if outcome.solution is None:
        if outcome.closed:
            raise NotABoundaryError("Cycle is not an integral boundary")
        raise BudgetExhaustedError(f"No feasible filling found within {outcome.nodes} nodes")

    x = outcome.solution
    nodes = outcome.nodes
    if tie_break and outcome.closed:
        x, extra = _lex_least(A, rhs, c, m, outcome.value, x, max_nodes, deadline)
        nodes += extra

    filling = Chain.from_mapping(b.dim + 1, {i: int(x[i] - x[m + i]) for i in range(m) if x[i] != x[m + i]})
    if boundary(X, filling) != b:
        raise InfeasibleInstanceError("Internal error: filling boundary does not match")
    sizes = counts(X, filling, 0)
    status = "exact" if outcome.closed else "upper-bound"
    lower = outcome.value if outcome.closed else outcome.lower_bound
    if not outcome.closed:
        logger.warning(f"⚠️ Filling budget exhausted after {nodes} nodes; reporting upper bound {outcome.value}")
    return FillingResult(filling, sizes.count, sizes.weighted_count, status, Fraction(lower), "ilp", objective, nodes)


def enumerate_min_filling(X: CellComplex, b: Chain, max_count: int, candidates: Sequence[int] = None,
                          signs: Sequence[int] = (1, -1), objective: str = "count") -> Optional[FillingResult]:
    """Brute-force minimal filling over sub-multisets of candidate cells (test oracle)."""
    _check_cycle(X, b)
    cells = X.cells[b.dim + 1]
    cands = sorted(candidates) if candidates is not None else list(range(len(cells)))
    signed = [(i, s) for i in cands for s in signs]
    lengths = X.cell_lengths(b.dim + 1)
    best: Optional[Chain] = None
    best_value = math.inf
    for size in range(max_count + 1):
        for combo in itertools.combinations_with_replacement(signed, size):
            acc: Dict[int, int] = {}
            clash = False
            for i, s in combo:
                if acc.get(i, 0) * s < 0:
                    clash = True
                    break
                acc[i] = acc.get(i, 0) + s
            if clash:
                continue
            chain = Chain.from_mapping(b.dim + 1, acc)
            if (chain.is_zero() and b.is_zero()) or (not chain.is_zero() and boundary(X, chain) == b):
                value = size if objective == "count" else int(sum(abs(k) * lengths[i] for i, k in chain.items))
                if value < best_value or (value == best_value and lex_key(chain, len(cells)) < lex_key(best, len(cells))):
                    best, best_value = chain, value
        if best is not None and objective == "count":
            break
    if best is None:
        return None
    sizes = counts(X, best, 0)
    return FillingResult(best, sizes.count, sizes.weighted_count, "exact", Fraction(best_value), "enumeration", objective)


# ---------------------------------------------------------------------------
# Van Kampen diagrams by iterative deepening
# ---------------------------------------------------------------------------

class _DiagramSearch:
    def __init__(self, X: CellComplex, max_nodes: int, deadline: float, use_lp: bool):
        self.X = X
        self.max_nodes = max_nodes
        self.deadline = deadline
        self.use_lp = use_lp
        self.nodes = 0
        p = X.ball.presentation
        self.max_len = max(len(r) for r in p.relators)
        self.variants: List[Tuple[Tuple[int, ...], int]] = []
        seen = set()
        for ri, r in enumerate(p.relators):
            for v in cyclic_conjugates(r) + cyclic_conjugates(inverse(r)):
                if v not in seen:
                    seen.add(v)
                    self.variants.append((v, ri))
        self.cell_of = {}
        for cell in X.cells[2]:
            chain = Chain(1, cell.boundary)
            self.cell_of[chain.items] = (cell.index, 1)
            self.cell_of[(-chain).items] = (cell.index, -1)
        self.lp_cache: Dict[Tuple, float] = {}
        self.table: Dict[Tuple, int] = {}

    def walk(self, v: int, word) -> int:
        step = self.X.extra["step"]
        for x in word:
            v = step[(v, x)]
        return v

    def normalize(self, v: int, word) -> Tuple[int, Tuple[int, ...]]:
        core, k = cyclic_reduce(free_reduce(word))
        return self.walk(v, free_reduce(word)[:k]), core

    def positions(self, v: int, word) -> List[int]:
        step = self.X.extra["step"]
        out = [v]
        for x in word[:-1]:
            v = step[(v, x)]
            out.append(v)
        return out

    def key(self, v: int, word) -> Tuple:
        if not word:
            return ()
        pos = self.positions(v, word)
        return min((pos[i], word[i:] + word[:i]) for i in range(len(word)))

    def heuristic(self, v: int, word) -> float:
        if not word:
            return 0
        h = math.ceil(len(word) / self.max_len)
        if self.use_lp:
            chain = loop_chain(self.X, v, word)
            if chain.items not in self.lp_cache:
                if chain.is_zero():
                    self.lp_cache[chain.items] = 0
                else:
                    A, rhs, c, _ = _filling_system(self.X, chain, False)
                    res = linprog(c, A_eq=A, b_eq=rhs, bounds=(0, None), method="highs")
                    self.lp_cache[chain.items] = math.inf if res.status == 2 else _ceil(res.fun)
            h = max(h, self.lp_cache[chain.items])
        return h

    def children(self, v: int, word):
        pos = self.positions(v, word)
        for i in range(len(word)):
            rotated = word[i:] + word[:i]
            base = pos[i]
            for r, _ in self.variants:
                if r[0] != rotated[0]:
                    continue
                traced = trace_loop(self.X, base, r)
                if traced is None or traced[0][-1] != base:
                    continue
                cell = self.cell_of.get(Chain.from_mapping(1, traced[1]).items)
                if cell is None:
                    continue
                nv, nw = self.normalize(base, inverse(r[1:]) + rotated[1:])
                yield cell, nv, nw

    def search(self, v, word, g, bound, path):
        f = g + self.heuristic(v, word)
        if f > bound:
            return f
        if not word:
            return -1
        key = self.key(v, word)
        if self.table.get(key, math.inf) <= g:
            return math.inf
        self.table[key] = g
        self.nodes += 1
        if self.nodes > self.max_nodes or time.monotonic() > self.deadline:
            raise BudgetExhaustedError(f"Diagram search exhausted its budget after {self.nodes} nodes")
        least = math.inf
        for cell, nv, nw in self.children(v, word):
            path.append(cell)
            t = self.search(nv, nw, g + 1, bound, path)
            if t == -1:
                return -1
            path.pop()
            least = min(least, t)
        return least


def min_area_diagram(X: CellComplex, start: int, word: Sequence[int], max_nodes: int = None,
                     max_seconds: float = None, use_lp: Optional[bool] = None) -> FillingResult:
    """Exact van Kampen area of the loop ``word`` read from vertex ``start``, by IDA*."""
    if X.ball is None:
        raise ParameterError("min_area_diagram needs a presentation complex")
    max_nodes = max_nodes or config.MAX_NODES
    max_seconds = max_seconds or config.MAX_SECONDS
    loop = loop_chain(X, start, word)
    reduced = free_reduce(word)
    if not reduced:
        return FillingResult(Chain(2), 0, 0, "exact", Fraction(0), "diagram-bfs")
    if X.num_cells(2) == 0:
        raise NotNullhomotopicError("Loop is not freely trivial and the complex has no 2-cells")

    search = _DiagramSearch(X, max_nodes, time.monotonic() + max_seconds,
                            use_lp if use_lp is not None else True)
    v, w = search.normalize(start, reduced)
    if not w:
        return FillingResult(Chain(2), 0, 0, "exact", Fraction(0), "diagram-bfs")
    bound = search.heuristic(v, w)
    if bound == math.inf:
        raise NotNullhomotopicError("Loop does not bound inside the ball")
    while True:
        path: List[Tuple[int, int]] = []
        search.table = {}
        t = search.search(v, w, 0, bound, path)
        if t == -1:
            break
        if t == math.inf:
            raise NotNullhomotopicError("Loop is not null-homotopic within the ball")
        logger.info(f"📊 Diagram search deepening to bound {t}")
        bound = t

    acc: Dict[int, int] = {}
    for idx, sign in path:
        acc[idx] = acc.get(idx, 0) + sign
    filling = Chain.from_mapping(2, acc)
    if boundary(X, filling) != loop:
        raise InfeasibleInstanceError("Internal error: diagram cells do not fill the loop")
    weighted = counts(X, filling, 0).weighted_count
    return FillingResult(filling, len(path), weighted, "exact", Fraction(len(path)), "diagram-bfs",
                         nodes=search.nodes)


# ---------------------------------------------------------------------------
# Boundary enumeration and Dehn tables
# ---------------------------------------------------------------------------

def _skeleton_distances(X: CellComplex) -> Dict[int, Dict[int, int]]:
    if "skeleton_dist" not in X.extra:
        g = nx.Graph()
        g.add_nodes_from(range(X.num_cells(0)))
        for c in X.cells.get(1, []):
            ends = [f for f, _ in c.boundary]
            if len(ends) == 2:
                g.add_edge(*ends)
        X.extra["skeleton_dist"] = dict(nx.all_pairs_shortest_path_length(g))
    return X.extra["skeleton_dist"]


def enumerate_cycles(X: CellComplex, n: int, k_max: int, weighted: bool = False, cap: int = None) -> List[Chain]:
    """All connected nonzero n-cycles of size at most k_max, least cell carrying a positive coefficient.

    Chains grow by repairing the least unbalanced face; balanced chains are recorded and
    extended by one more adjacent cell.
    """
    cap = cap or config.BOUNDARY_CAP
    cells = X.cells.get(n, [])
    cof = X.cofaces.get(n, {})
    weights = X.cell_lengths(n) if weighted else np.ones(len(cells), dtype=np.int64)
    if len(cells) == 0:
        return []
    wmin = int(weights.min())
    J = max(sum(abs(s) for _, s in c.boundary) for c in cells)
    dist = _skeleton_distances(X) if n == 1 else None

    found: Dict[Tuple, Chain] = {}
    visited = set()

    def need(bnd: Dict[int, int]) -> int:
        total = sum(abs(v) for v in bnd.values())
        if total == 0:
            return 0
        est = _ceil(total / J)
        if dist is not None and len(bnd) == 2:
            u, v = bnd
            est = max(est, dist[u].get(v, math.inf))
        return est

    def grow(s0: int, chain: Dict[int, int], bnd: Dict[int, int], measure: int):
        key = tuple(sorted(chain.items()))
        if key in visited:
            return
        visited.add(key)
        if len(visited) > cap:
            raise CapExceededError(f"Boundary enumeration exceeded {cap} states")
        if measure + need(bnd) * wmin > k_max:
            return
        if not bnd:
            found.setdefault(key, Chain(n, key))
            moves = set()
            for i, coeff in chain.items():
                moves.add((i, 1 if coeff > 0 else -1))
                for face, _ in cells[i].boundary:
                    for j, _ in cof.get(face, ()):
                        if j >= s0 and j not in chain:
                            moves.add((j, 1))
                            moves.add((j, -1))
        else:
            face = min(bnd)
            v = bnd[face]
            moves = set()
            for j, sgn in cof.get(face, ()):
                if j < s0:
                    continue
                moves.add((j, -1 if v * sgn > 0 else 1))
        for j, eps in sorted(moves):
            if chain.get(j, 0) * eps < 0 or measure + int(weights[j]) > k_max:
                continue
            chain[j] = chain.get(j, 0) + eps
            for f, s in cells[j].boundary:
                nv = bnd.get(f, 0) + eps * s
                if nv:
                    bnd[f] = nv
                else:
                    bnd.pop(f, None)
            grow(s0, chain, bnd, measure + int(weights[j]))
            for f, s in cells[j].boundary:
                nv = bnd.get(f, 0) - eps * s
                if nv:
                    bnd[f] = nv
                else:
                    bnd.pop(f, None)
            chain[j] -= eps
            if chain[j] == 0:
                del chain[j]

    for s0 in range(len(cells)):
        if int(weights[s0]) > k_max:
            continue
        bnd = {}
        for f, s in cells[s0].boundary:
            bnd[f] = bnd.get(f, 0) + s
        bnd = {f: v for f, v in bnd.items() if v}
        grow(s0, {s0: 1}, bnd, int(weights[s0]))

    cycles = list(found.values())
    lengths = weights
    cycles.sort(key=lambda c: (sum(abs(k) * int(lengths[i]) for i, k in c.items), c.items))
    logger.info(f"📊 Enumerated {len(cycles)} connected {n}-cycles with size <= {k_max} ({len(visited)} states)")
    return cycles


@dataclass
class DehnInstance:
    id: int
    boundary: Chain
    size: int
    weighted_size: int
    result: FillingResult


@dataclass
class DehnTable:
    dim: int
    weighted: bool
    k_max: int
    radius: Optional[int]
    values: List[int]
    statuses: List[str]
    witness_ids: List[Optional[int]]
    instances: List[DehnInstance] = field(default_factory=list)
    enumerated: int = 0
    skipped: int = 0
    complex_name: str = ""

    def as_dict(self) -> Dict[int, int]:
        return {k: v for k, v in enumerate(self.values)}

    def to_report(self) -> DehnTableReport:
        by_id = {inst.id: inst for inst in self.instances}
        used = sorted({w for w in self.witness_ids if w is not None})
        witnesses = [
            DehnWitness(
                id=i, size=by_id[i].weighted_size if self.weighted else by_id[i].size,
                value=by_id[i].result.value, status=by_id[i].result.status,
                boundary=chain_to_record(by_id[i].boundary),
            )
            for i in used
        ]
        entries = [
            DehnTableEntry(k=k, value=v, status=s, witness_id=w)
            for k, (v, s, w) in enumerate(zip(self.values, self.statuses, self.witness_ids))
        ]
        return DehnTableReport(
            complex=self.complex_name, dim=self.dim, weighted=self.weighted, radius=self.radius,
            entries=entries, witnesses=witnesses, boundaries_enumerated=self.enumerated,
            instances_solved=len(self.instances), skipped_non_boundaries=self.skipped,
        )


def dehn_table(X: CellComplex, n: int, k_max: int, weighted: bool = False, threads: int = 1,
               max_nodes: int = None, max_seconds: float = None,
               prune_translates: Optional[bool] = None) -> DehnTable:
    """Maxima of minimal (weighted) filling sizes over connected n-boundaries of size <= k."""
    objective = "weighted" if weighted else "count"
    if weighted and prune_translates:
        raise ParameterError("Translate pruning is unavailable for weighted tables: weighted sizes depend on position")
    prune = (not weighted) if prune_translates is None else prune_translates
    cycles = enumerate_cycles(X, n, k_max, weighted)

    representatives: List[Chain] = []
    rep_of: Dict[int, int] = {}
    seen_keys: Dict = {}
    for idx, cyc in enumerate(cycles):
        key = translation_key(X, cyc) if prune else (cyc.dim, cyc.items)
        if key not in seen_keys:
            seen_keys[key] = len(representatives)
            representatives.append(cyc)
        rep_of[idx] = seen_keys[key]

    def solve(chain: Chain) -> Optional[FillingResult]:
        try:
            return min_filling(X, chain, objective, max_nodes, max_seconds, tie_break=False)
        except NotABoundaryError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, representatives))
    else:
        results = [solve(c) for c in representatives]

    instances: List[DehnInstance] = []
    skipped = 0
    for idx, cyc in enumerate(cycles):
        result = results[rep_of[idx]]
        if result is None:
            skipped += 1
            continue
        sizes = counts(X, cyc, 0)
        instances.append(DehnInstance(idx, cyc, sizes.count, sizes.weighted_count, result))

    values = [0] * (k_max + 1)
    statuses = ["exact"] * (k_max + 1)
    witnesses: List[Optional[int]] = [None] * (k_max + 1)
    best_at: Dict[int, Tuple[int, str, int]] = {}
    for inst in instances:
        size = inst.weighted_size if weighted else inst.size
        if size > k_max:
            continue
        res = inst.result
        value = res.value if res.status == "exact" else int(res.lower_bound)
        status = "exact" if res.status == "exact" else "lower-bound"
        cur = best_at.get(size)
        if cur is None or value > cur[0] or (value == cur[0] and status == "lower-bound" and cur[1] == "exact"):
            best_at[size] = (value, status, inst.id)
    running, run_status, run_witness = 0, "exact", None
    for k in range(k_max + 1):
        if k in best_at:
            value, status, wid = best_at[k]
            if value > running:
                running, run_status, run_witness = value, status, wid
            elif status == "lower-bound":
                run_status = "lower-bound"
        values[k], statuses[k], witnesses[k] = running, run_status, run_witness

    radius = X.ball.radius if X.ball is not None else None
    logger.info(f"✅ Dehn table dim={n} weighted={weighted} up to k={k_max}: {values}")
    return DehnTable(n, weighted, k_max, radius, values, statuses, witnesses, instances,
                     len(cycles), skipped, X.name)


# ---------------------------------------------------------------------------
# Comparisons of tabulated functions
# ---------------------------------------------------------------------------

TableLike = Union[DehnTable, Mapping[int, int], Sequence[int]]


def as_table(t: TableLike) -> Dict[int, int]:
    if isinstance(t, DehnTable):
        return t.as_dict()
    if isinstance(t, Mapping):
        return {int(k): int(v) for k, v in t.items()}
    return {k: int(v) for k, v in enumerate(t)}


def dominates(f: TableLike, g: TableLike, box: int = None) -> Optional[Tuple[int, int, int, int, int]]:
    """Lexicographically least (A, B, C, D, E) in [0, box]^5 with f(n) <= A g(Bn+C) + Dn + E on f's range.

    A tuple is admissible only when every argument Bn+C lies in g's tabulated range.
    """
    box = config.DOMINATION_BOX if box is None else box
    ft, gt = as_table(f), as_table(g)
    ns = np.array(sorted(ft), dtype=np.int64)
    fv = np.array([ft[n] for n in ns], dtype=np.int64)
    for A in range(box + 1):
        for B in range(box + 1):
            for C in range(box + 1):
                args = B * ns + C
                if not all(int(a) in gt for a in args):
                    continue
                gv = np.array([gt[int(a)] for a in args], dtype=np.int64)
                residual = fv - A * gv
                for D in range(box + 1):
                    E = max(0, int((residual - D * ns).max())) if len(ns) else 0
                    if E <= box:
                        return (A, B, C, D, E)
    return None


def equivalent(f: TableLike, g: TableLike, box: int = None) -> DominationReport:
    box = config.DOMINATION_BOX if box is None else box
    fg = dominates(f, g, box)
    gf = dominates(g, f, box)
    return DominationReport(
        box=box, f_dominated_by_g=list(fg) if fg else None, g_dominated_by_f=list(gf) if gf else None,
        equivalent=fg is not None and gf is not None,
    )


def poly_bound_fit(table: TableLike) -> PolyFitReport:
    """Polynomial degree and coefficient bounding the table.

    The degree is the least d consistent with the log-log slope of the upper envelope; the
    coefficient is the least multiple of 1/16 with table(k) <= C k^d on the nonzero range.
    """
    t = as_table(table)
    positive = {k: v for k, v in t.items() if k >= 1 and v > 0}
    if not positive:
        return PolyFitReport(degree=0, coefficient="0")
    if len(positive) < 4:
        raise InfeasibleInstanceError("poly_bound_fit needs at least 4 nonzero entries")
    envelope = []
    top = 0
    for k in sorted(positive):
        if positive[k] > top:
            top = positive[k]
            envelope.append((k, positive[k]))
    if len(envelope) >= 2:
        xs = np.log([k for k, _ in envelope])
        ys = np.log([v for _, v in envelope])
        slope, intercept = np.polyfit(xs, ys, 1)
        residual = float(np.max(np.abs(ys - (slope * xs + intercept))))
    else:
        slope, residual = 0.0, 0.0
    degree = max(0, math.ceil(slope - 0.25))
    ratio = max(Fraction(v, k ** degree) for k, v in positive.items())
    coefficient = Fraction(math.ceil(ratio * 16), 16)
    return PolyFitReport(degree=degree, coefficient=str(coefficient), slope=round(float(slope), 6),
                         max_residual=round(residual, 6))


def _table_value(t: Dict[int, int], x: int) -> Optional[int]:
    return t.get(x)


def bridge_check(X: CellComplex, plain: DehnTable, weighted: DehnTable, L: int = 0,
                 max_nodes: int = None, max_seconds: float = None) -> BridgeReport:
    """Per-instance weighted/plain inequalities on the weighted table's exactly solved boundaries."""
    n = weighted.dim
    J_top, Jp_top = X.J(n + 1), X.J_prime(n + 1)
    J_n, Jp_n = X.J(n), X.J_prime(n)
    d, dw = plain.as_dict(), weighted.as_dict()
    kw = weighted.k_max
    report = BridgeReport(J_top=J_top, J_top_prime=Jp_top, J_n=J_n, J_n_prime=Jp_n, L=L)

    for inst in weighted.instances:
        if inst.result.status != "exact" or inst.weighted_size > kw:
            continue
        x = inst.weighted_size
        fw = inst.result.weighted_count
        plain_res = min_filling(X, inst.boundary, "count", max_nodes, max_seconds, tie_break=False)
        if plain_res.status != "exact":
            continue
        dx = _table_value(d, x)
        if dx is None:
            report.inconclusive.append(BridgeViolation(boundary_id=inst.id, check="forward", lhs=fw, rhs=-1,
                                                       status="inconclusive"))
        else:
            rhs = dx * (Jp_top * x + J_top * Jp_top * dx)
            report.forward_checked += 1
            if fw > rhs:
                report.violations.append(BridgeViolation(boundary_id=inst.id, check="forward", lhs=fw, rhs=rhs,
                                                         status="violation"))
        u = inst.size
        arg = Jp_n * u * (L + J_n * u)
        rhs = u * dw[min(arg, kw)]
        report.converse_checked += 1
        if plain_res.count > rhs:
            status = "violation" if arg <= kw else "inconclusive"
            entry = BridgeViolation(boundary_id=inst.id, check="converse", lhs=plain_res.count, rhs=rhs, status=status)
            (report.violations if status == "violation" else report.inconclusive).append(entry)

    for x in sorted(d):
        if x < 1:
            continue
        arg = Jp_n * x * (L + J_n * x)
        rhs = x * dw[min(arg, kw)]
        report.pointwise_checked += 1
        if d[x] > rhs:
            status = "violation" if arg <= kw else "inconclusive"
            entry = BridgeViolation(boundary_id=-1, check=f"pointwise@{x}", lhs=d[x], rhs=rhs, status=status)
            (report.violations if status == "violation" else report.inconclusive).append(entry)

    logger.info(f"📊 Bridge check: {len(report.violations)} violations, {len(report.inconclusive)} inconclusive")
    return report


def compare_tables_over_radii(tables: Sequence[DehnTable]) -> RadiusComparisonReport:
    """Tables built at increasing radii must be pointwise nondecreasing; report where they differ."""
    radii = [t.radius if t.radius is not None else i for i, t in enumerate(tables)]
    k_common = min(t.k_max for t in tables)
    nondecreasing = True
    diffs = []
    for k in range(k_common + 1):
        vals = [t.values[k] for t in tables]
        if any(b < a for a, b in zip(vals, vals[1:])):
            nondecreasing = False
        if len(set(vals)) > 1:
            diffs.append(RadiusDiff(k=k, values=vals))
    stabilized = all(tables[-1].values[k] == tables[-2].values[k] for k in range(k_common + 1)) if len(tables) > 1 else True
    if not nondecreasing:
        logger.error("❌ Dehn tables decrease as the radius grows")
    return RadiusComparisonReport(radii=radii, nondecreasing=nondecreasing, stabilized=stabilized, diffs=diffs)


def filling_report(X: CellComplex, b: Chain, result: FillingResult) -> FillingReport:
    return FillingReport(
        complex=X.name, objective=result.objective, solver=result.solver, status=result.status,
        count=result.count, weighted_count=result.weighted_count, lower_bound=str(result.lower_bound),
        nodes=result.nodes, boundary=chain_to_record(b),
        filling=chain_to_record(result.filling) if result.filling is not None else None,
    )
