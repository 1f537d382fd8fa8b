import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from app import config
from app.errors import InfeasibleInstanceError, MissingCombingPathError, ParameterError
from app.schemas.combing_schema import (
    AlphaCheckReport, BetaCheckReport, CombingConstants, CombingPathRecord, CombReport, ConstantWitness,
    LengthBoundReport, LengthProfileEntry, SettleCheckReport, StabilityDiff, StabilityReport
)
from app.schemas.presentation_schema import Presentation
from app.services.cayley_service import build_ball, volume_profile
from app.services.coned_service import ConedGraph, bcp_estimate, cone_off
from app.services.words_service import (
    IDENTITY, Word, coset_key, distance, format_word, inverse, multiply, normal_form, word_length
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """Stretch of a lifted path covering one unit step of its coned-off path."""
    step: int
    start: int
    end: int
    coset: Optional[int] = None  # coned-off vertex crossed, None for an edge move


@dataclass(frozen=True)
class CombingPath:
    """Eventually constant path p(0..T) from the identity to ``target``; positions are normal forms."""
    target: Word
    positions: Tuple[Word, ...]
    vias: Tuple[Optional[int], ...] = ()
    segments: Tuple[Segment, ...] = ()

    @property
    def settle_time(self) -> int:
        return len(self.positions) - 1

    def at(self, t: int) -> Word:
        return self.positions[min(t, len(self.positions) - 1)]

    @property
    def length(self) -> int:
        return sum(1 for u, v in zip(self.positions, self.positions[1:]) if u != v)


def _trim(positions: Sequence[Word]) -> Tuple[Word, ...]:
    end = len(positions)
    while end > 1 and positions[end - 1] == positions[end - 2]:
        end -= 1
    return tuple(positions[:end])


def make_path(target: Word, positions: Sequence[Word], vias=(), segments=(),
              metric: Optional[Callable[[Word, Word], int]] = None) -> CombingPath:
    """Eventually constant path from e to target; with a metric, every step must have length at most 1."""
    path = CombingPath(target, _trim(positions), tuple(vias), tuple(segments))
    if path.positions[0] != IDENTITY or path.positions[-1] != target:
        raise InfeasibleInstanceError(f"Combing path does not run from e to {target}")
    if metric is not None:
        for t, (u, v) in enumerate(zip(path.positions, path.positions[1:])):
            if u != v and metric(u, v) > 1:
                raise InfeasibleInstanceError(
                    f"Combing path to {target} jumps from {u} to {v} at time {t} (distance {metric(u, v)})")
    return path


@dataclass(eq=False)
class Combing:
    space: str  # 'group' or 'coned'
    presentation: Presentation
    paths: Dict[Word, CombingPath]
    metric: Callable[[Word, Word], int]
    coned: Optional[ConedGraph] = None

    def label(self, w: Word) -> str:
        return format_word(self.presentation, w)

    def record(self, w: Word) -> CombingPathRecord:
        path = self.paths[w]
        return CombingPathRecord(
            g=self.label(w), positions=[self.label(x) for x in path.positions],
            settle_time=path.settle_time, length=path.length,
        )


def group_metric(p: Presentation) -> Callable[[Word, Word], int]:
    @lru_cache(maxsize=None)
    def metric(u: Word, v: Word) -> int:
        return distance(p, u, v)
    return metric


def coned_metric(G: ConedGraph) -> Callable[[Word, Word], int]:
    D = G.element_distances()
    index_of = G.ball.index_of

    def metric(u: Word, v: Word) -> int:
        return int(D[index_of(u), index_of(v)])
    return metric


@dataclass(frozen=True)
class Witness:
    constant: str
    value: str
    elements: Tuple[Word, ...]
    time: Optional[int] = None
    detail: str = ""

    def to_record(self, p: Presentation) -> ConstantWitness:
        return ConstantWitness(
            constant=self.constant, value=self.value, elements=[format_word(p, w) for w in self.elements],
            time=self.time, detail=self.detail,
        )


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    text: str
    coefficients: Tuple[int, ...]  # constant term first

    def __call__(self, x: int) -> int:
        return sum(c * x ** i for i, c in enumerate(self.coefficients))


def parse_polynomial(text: str) -> Polynomial:
    """Polynomial in x with nonnegative integer coefficients, e.g. ``x``, ``2*x**2 + 1``."""
    x = sympy.Symbol("x")
    try:
        poly = sympy.Poly(sympy.sympify(text, locals={"x": x}), x)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as e:
        raise ParameterError(f"Cannot read polynomial {text!r}: {e}")
    coeffs = list(reversed(poly.all_coeffs()))
    if not all(c.is_integer and c.is_nonnegative for c in coeffs):
        raise ParameterError(f"Polynomial {text!r} needs nonnegative integer coefficients")
    return Polynomial(text=text, coefficients=tuple(int(c) for c in coeffs))


# ---------------------------------------------------------------------------
# Subgroup combings
# ---------------------------------------------------------------------------

class SubgroupCombing:
    """Paths inside one subgroup H, from e to h, used for coset excursions."""

    def __init__(self, p: Presentation, name: str):
        self.presentation = p
        self.name = name
        self.generators = frozenset(p.subgroup(name).generators)
        self.used: Dict[Word, CombingPath] = {}
        self.metric = group_metric(p)

    def _build(self, h: Word) -> Sequence[Word]:
        raise NotImplementedError

    def path(self, h: Word) -> CombingPath:
        h = normal_form(self.presentation, h)
        if h not in self.used:
            self.used[h] = make_path(h, self._build(h), metric=self.metric)
        return self.used[h]

    def as_combing(self) -> Combing:
        paths = {h: self.used[h] for h in sorted(self.used, key=lambda w: (len(w), w))}
        return Combing("group", self.presentation, paths, self.metric)


class NormalFormSubgroupCombing(SubgroupCombing):
    """Prefixes of the normal form; geodesic whenever the engine's normal forms are."""

    def _build(self, h: Word) -> Sequence[Word]:
        if any(abs(x) not in self.generators for x in h):
            raise MissingCombingPathError(
                f"Normal form of {format_word(self.presentation, h)} leaves the generators of {self.name}")
        return [normal_form(self.presentation, h[:i]) for i in range(len(h) + 1)]


class TableSubgroupCombing(SubgroupCombing):
    """Combing given explicitly as a table h -> positions."""

    def __init__(self, p: Presentation, name: str, table: Dict[Word, Sequence[Word]]):
        super().__init__(p, name)
        self.table = {normal_form(p, h): [normal_form(p, x) for x in path] for h, path in table.items()}

    def _build(self, h: Word) -> Sequence[Word]:
        if h not in self.table:
            raise MissingCombingPathError(
                f"Combing of {self.name} has no path to {format_word(self.presentation, h)}")
        return self.table[h]


def normal_form_combing(p: Presentation, ball) -> Combing:
    """Straight-line combing along normal-form words, over every element of the ball."""
    metric = group_metric(p)
    paths = {}
    for w in ball.vertices:
        paths[w] = make_path(w, [normal_form(p, w[:i]) for i in range(len(w) + 1)], metric=metric)
    return Combing("group", p, paths, metric)


# ---------------------------------------------------------------------------
# Measured constants
# ---------------------------------------------------------------------------

def fellow_traveler_K(c: Combing) -> Tuple[Fraction, Optional[Witness]]:
    """max d(p_g(t), p_h(t)) / d(g, h) over all pairs of targets and all times."""
    best, witness = Fraction(0), None
    targets = list(c.paths)
    for i, g in enumerate(targets):
        pg = c.paths[g]
        for h in targets[i + 1:]:
            d = c.metric(g, h)
            if d == 0:
                continue
            ph = c.paths[h]
            worst, t_worst = 0, 0
            for t in range(max(pg.settle_time, ph.settle_time) + 1):
                x, y = pg.at(t), ph.at(t)
                if x != y:
                    dt = c.metric(x, y)
                    if dt > worst:
                        worst, t_worst = dt, t
            ratio = Fraction(worst, d)
            if ratio > best:
                best = ratio
                witness = Witness("K", str(ratio), (g, h), t_worst, f"{worst}/{d}")
    return best, witness


def return_bound_N(c: Combing) -> Tuple[int, Optional[Witness]]:
    """Largest number of times a path visits a vertex other than its target before settling."""
    best, witness = 0, None
    for g, path in c.paths.items():
        visits = Counter(path.positions[:-1])
        visits.pop(g, None)
        for y, count in sorted(visits.items()):
            if count > best:
                best = count
                witness = Witness("N", str(count), (g, y))
    return best, witness


def _volume_function(c: Combing, radius: int):
    if c.space == "coned":
        D = c.coned.element_distances()[0]
        cumulative = np.cumsum(np.bincount(D, minlength=radius + 1))
        return lambda r: int(cumulative[min(r, len(cumulative) - 1)]), True
    volumes, _ = volume_profile(c.presentation, radius, vertex_cap=config.SETTLE_VOLUME_CAP)
    return (lambda r: volumes[r] if r < len(volumes) else None), False


def settle_time_bound_check(c: Combing, K: Fraction, N: int) -> SettleCheckReport:
    """Check |t_y - t_x| <= N * V(K * d(x, y)) over all pairs of targets."""
    targets = list(c.paths)
    pairs = []
    for i, x in enumerate(targets):
        for y in targets[i + 1:]:
            d = c.metric(x, y)
            gap = abs(c.paths[y].settle_time - c.paths[x].settle_time)
            pairs.append((x, y, math.floor(K * d), gap))
    if not pairs:
        return SettleCheckReport()
    volume, restricted = _volume_function(c, max(r for _, _, r, _ in pairs))

    report = SettleCheckReport(ball_restricted=restricted)
    slacks = []
    for x, y, r, gap in pairs:
        v = volume(r)
        if v is None:
            report.inconclusive += 1
            continue
        report.checked += 1
        slack = N * v - gap
        slacks.append(slack)
        if slack < 0:
            report.violations.append(
                Witness("settle", str(gap), (x, y), detail=f"bound {N * v}").to_record(c.presentation))
    if slacks:
        report.min_slack, report.max_slack = min(slacks), max(slacks)
    if report.inconclusive:
        logger.warning(f"⚠️ Settle-time check inconclusive on {report.inconclusive} pairs (volume cap)")
    return report


# ---------------------------------------------------------------------------
# The coherent combing of the coned-off graph
# ---------------------------------------------------------------------------

def _lex_least_geodesic(G: ConedGraph, target: int) -> Tuple[List[int], List[Optional[int]]]:
    """Lexicographically least geodesic from e, split into element itinerary and crossed cosets."""
    D = G.doubled_distances
    graph = G.graph
    vertices, cur = [0], 0
    while cur != target:
        for u in sorted(graph.neighbors(cur)):
            if D[u, target] + graph[cur][u]["weight"] == D[cur, target]:
                cur = u
                break
        vertices.append(cur)
    itinerary, vias = [0], []
    pending = None
    for v in vertices[1:]:
        if G.is_coset(v):
            pending = v
            continue
        itinerary.append(v)
        vias.append(pending)
        pending = None
    return itinerary, vias


def build_alpha(G: ConedGraph) -> Combing:
    """Coherent geodesic combing of the coned-off graph, built by splicing in enumeration order.

    Each new geodesic [e, g_i] is cut at the last time it meets an earlier path alpha_j
    (largest j among those meeting it latest) and continued along alpha_j before that time.
    """
    ball = G.ball
    metric = coned_metric(G)
    latest: Dict[Tuple[int, int], int] = {}
    built: List[Tuple[List[int], List[Optional[int]]]] = []
    paths: Dict[Word, CombingPath] = {}
    for i in range(len(ball)):
        geo, geo_vias = _lex_least_geodesic(G, i)
        t_bar, j = 0, None
        for t in range(len(geo) - 1, -1, -1):
            if (t, geo[t]) in latest:
                t_bar, j = t, latest[(t, geo[t])]
                break
        if j is None:
            positions, vias = geo, geo_vias
        else:
            prev, prev_vias = built[j]
            positions = prev[: t_bar + 1] + geo[t_bar + 1:]
            vias = prev_vias[:t_bar] + geo_vias[t_bar:]
        built.append((positions, vias))
        for t, x in enumerate(positions):
            latest[(t, x)] = i
        w = ball.vertices[i]
        paths[w] = make_path(w, [ball.vertices[x] for x in positions], vias, metric=metric)
    logger.info(f"✅ Coherent combing of the coned-off graph built for {len(paths)} elements")
    return Combing("coned", ball.presentation, paths, metric, coned=G)


def check_alpha(alpha: Combing) -> AlphaCheckReport:
    """Geodesic lengths and prefix coherence over every pair of paths."""
    G = alpha.coned
    D = G.doubled_distances
    index_of = G.ball.index_of
    targets = list(alpha.paths)
    lengths = np.array([alpha.paths[w].settle_time for w in targets])
    T = int(lengths.max()) if len(targets) else 0
    P = np.array([[index_of(alpha.paths[w].at(t)) for t in range(T + 1)] for w in targets]).reshape(len(targets), T + 1)

    geodesic = all(int(D[0, index_of(w)]) == 2 * alpha.paths[w].settle_time for w in targets)
    witness: List[str] = []
    pairs = 0
    times = np.arange(T + 1)
    for i in range(len(targets)):
        others = np.arange(i + 1, len(targets))
        if not len(others):
            break
        pairs += len(others)
        valid = times[None, :] <= np.minimum(lengths[i], lengths[others])[:, None]
        agree = P[others] == P[i][None, :]
        prefix = np.logical_and.accumulate(agree | ~valid, axis=1) & valid
        bad = ((agree & valid) != prefix).any(axis=1)
        if bad.any() and not witness:
            j = int(others[np.argmax(bad)])
            witness = [alpha.label(targets[i]), alpha.label(targets[j])]
    if witness:
        logger.error(f"❌ Prefix coherence fails for {witness}")
    return AlphaCheckReport(coherent=not witness, geodesic=geodesic, pairs_checked=pairs, witness=witness)


# ---------------------------------------------------------------------------
# The lifted combing of the group
# ---------------------------------------------------------------------------

def build_beta(alpha: Combing, subgroup_combings: Dict[str, SubgroupCombing], P: Polynomial, c1: int) -> Combing:
    """Lift alpha to the group: every unit step of alpha takes at least P(c1) time units.

    Edge steps move then wait; coset steps follow the translated subgroup path and wait
    at the exit only when the subgroup path is shorter than P(c1).
    """
    unit = P(c1)
    if unit < 1:
        raise InfeasibleInstanceError(f"P(c1) = {unit} is less than 1")
    G = alpha.coned
    p = alpha.presentation
    metric = group_metric(p)
    paths: Dict[Word, CombingPath] = {}
    for g, apath in alpha.paths.items():
        positions: List[Word] = [IDENTITY]
        segments = []
        for step, via in enumerate(apath.vias):
            a, b = apath.positions[step], apath.positions[step + 1]
            start = len(positions) - 1
            if via is None:
                positions.append(b)
            else:
                name = G.cosets[via - G.n_elements][0]
                sub = subgroup_combings[name].path(multiply(inverse(a), b))
                positions.extend(normal_form(p, a + x) for x in sub.positions[1:])
            elapsed = len(positions) - 1 - start
            positions.extend([b] * (unit - elapsed))
            segments.append(Segment(step, start, len(positions) - 1, via))
        paths[g] = make_path(g, positions, apath.vias, segments, metric=metric)
    logger.info(f"✅ Lifted combing built with unit time P(c1) = {unit}")
    return Combing("group", p, paths, metric, coned=G)


def _common_steps(a: CombingPath, b: CombingPath) -> int:
    k = 0
    while (k < len(a.vias) and k < len(b.vias) and a.vias[k] == b.vias[k]
           and a.positions[k + 1] == b.positions[k + 1]):
        k += 1
    return k


def collapse_excursions(G: ConedGraph, positions: Sequence[Word]) -> List[Word]:
    """Project a group path to the coned-off graph: drop pauses, then replace every
    maximal run inside one coset of a coned subgroup by its first and last vertex."""
    p = G.ball.presentation
    seq = [w for i, w in enumerate(positions) if i == 0 or w != positions[i - 1]]
    out = [seq[0]]
    i = 0
    while i < len(seq) - 1:
        reach = i + 1
        for _, gens in G.subgroups:
            key = coset_key(p, seq[i], gens)
            j = i
            while j + 1 < len(seq) and coset_key(p, seq[j + 1], gens) == key:
                j += 1
            reach = max(reach, j)
        out.append(seq[reach])
        i = reach
    return out


def check_beta(beta: Combing, alpha: Combing) -> BetaCheckReport:
    """Endpoints, projection onto alpha, and prefix agreement of lifted paths."""
    ends_ok = projection_ok = prefix_ok = True
    witness: List[str] = []
    for g, path in beta.paths.items():
        if path.positions[-1] != g:
            ends_ok = False
            witness = witness or [beta.label(g)]
        if collapse_excursions(alpha.coned, path.positions) != list(alpha.paths[g].positions):
            projection_ok = False
            witness = witness or [beta.label(g)]

    targets = list(beta.paths)
    for i, g in enumerate(targets):
        for h in targets[i + 1:]:
            k = _common_steps(alpha.paths[g], alpha.paths[h])
            if k == 0:
                continue
            until = beta.paths[g].segments[k - 1].end
            bg, bh = beta.paths[g], beta.paths[h]
            if any(bg.at(t) != bh.at(t) for t in range(until + 1)):
                prefix_ok = False
                witness = witness or [beta.label(g), beta.label(h)]
    return BetaCheckReport(ends_ok=ends_ok, projection_ok=projection_ok, prefix_ok=prefix_ok, witness=witness)


@dataclass
class SynchronyReport:
    M: int = 0
    T: int = 0
    pairs: int = 0
    synchronous: int = 0
    witnesses: List[Witness] = field(default_factory=list)


def _penetrations(path: CombingPath):
    return [(s, via) for s, via in enumerate(path.vias) if via is not None]


def synchrony_report(beta: Combing, alpha: Combing) -> SynchronyReport:
    """Entry/exit distances (M) and entry/exit time gaps (T) over synchronous cosets of adjacent elements.

    Penetrations during alpha steps s and s' are synchronous when the steps share an
    integer time, i.e. |s - s'| <= 1.
    """
    G = alpha.coned
    ball = G.ball
    metric = beta.metric
    report = SynchronyReport()
    best_m: Optional[Witness] = None
    best_t: Optional[Witness] = None
    seen = set()
    for u, v, _ in ball.edges:
        if u == v or (min(u, v), max(u, v)) in seen:
            continue
        seen.add((min(u, v), max(u, v)))
        g, h = ball.vertices[min(u, v)], ball.vertices[max(u, v)]
        report.pairs += 1
        ag, ah = alpha.paths[g], alpha.paths[h]
        bg, bh = beta.paths[g], beta.paths[h]
        for s, cg in _penetrations(ag):
            for s2, ch in _penetrations(ah):
                if abs(s - s2) > 1:
                    continue
                report.synchronous += 1
                d_in = metric(ag.positions[s], ah.positions[s2])
                d_out = metric(ag.positions[s + 1], ah.positions[s2 + 1])
                m = max(d_in, d_out)
                if m > report.M:
                    report.M = m
                    best_m = Witness("M", str(m), (g, h), s, f"cosets {G.label(cg)}, {G.label(ch)}")
                gap = max(abs(bg.segments[s].start - bh.segments[s2].start),
                          abs(bg.segments[s].end - bh.segments[s2].end))
                if gap > report.T:
                    report.T = gap
                    best_t = Witness("T", str(gap), (g, h), s, f"cosets {G.label(cg)}, {G.label(ch)}")
    report.witnesses = [w for w in (best_m, best_t) if w is not None]
    return report


def length_bound_check(beta: Combing, P: Polynomial, c_table: Callable[[int], int]) -> Tuple[LengthBoundReport, List[LengthProfileEntry]]:
    """Check length(beta_g) <= l(g) * P(l(g) + 2 c(l(g) + 1)) and fit the growth exponent."""
    p = beta.presentation
    report = LengthBoundReport()
    profile = []
    envelope: Dict[int, int] = {}
    for g, path in beta.paths.items():
        lg = word_length(p, g)
        bound = lg * P(lg + 2 * c_table(lg + 1))
        report.checked += 1
        profile.append(LengthProfileEntry(len_g=lg, len_beta=path.length))
        if path.length > bound:
            report.violations.append(format_word(p, g))
        if lg > 0 and path.length > 0:
            envelope[lg] = max(envelope.get(lg, 0), path.length)
    if len(envelope) >= 2:
        xs = np.log(np.array(sorted(envelope), dtype=float))
        ys = np.log(np.array([envelope[k] for k in sorted(envelope)], dtype=float))
        report.fitted_exponent = round(float(np.polyfit(xs, ys, 1)[0]), 6)
    if report.violations:
        logger.error(f"❌ Length bound violated for {len(report.violations)} elements")
    return report, profile


# ---------------------------------------------------------------------------
# Full analysis
# ---------------------------------------------------------------------------

@dataclass
class CombingAnalysis:
    R: int
    subgroups: List[str]
    poly: Polynomial
    c1: int
    c1_source: str
    alpha: Combing
    beta: Combing
    alpha_check: AlphaCheckReport
    beta_check: BetaCheckReport
    K: Fraction
    alpha_K: Fraction
    N: int
    sync: SynchronyReport
    subgroup_N: Dict[str, int]
    witnesses: List[Witness]
    settle: Optional[SettleCheckReport] = None
    length_bound: Optional[LengthBoundReport] = None
    length_profile: List[LengthProfileEntry] = field(default_factory=list)

    def constants(self) -> CombingConstants:
        return CombingConstants(
            K=str(self.K), N=self.N, M=self.sync.M, T=self.sync.T, alpha_K=str(self.alpha_K),
            subgroup_N=dict(self.subgroup_N),
        )

    def to_report(self) -> CombReport:
        p = self.beta.presentation
        return CombReport(
            R=self.R, subgroups=self.subgroups, poly=self.poly.text, c1=self.c1, c1_source=self.c1_source,
            unit_time=self.poly(self.c1), alpha=self.alpha_check, beta=self.beta_check,
            constants=self.constants(), witnesses=[w.to_record(p) for w in self.witnesses],
            settle=self.settle, length_bound=self.length_bound, length_profile=self.length_profile,
            paths=[self.beta.record(g) for g in self.beta.paths],
        )


def analyze_combing(p: Presentation, R: int, subgroups: Optional[Sequence[str]] = None, poly: str = "x",
                    c1: Optional[int] = None, subgroup_combings: Optional[Dict[str, SubgroupCombing]] = None,
                    checks: bool = True) -> CombingAnalysis:
    ball = build_ball(p, R)
    G = cone_off(ball, subgroups)
    names = [name for name, _ in G.subgroups]
    P = parse_polynomial(poly)
    c1_source = "user"
    if c1 is None:
        c1, c1_source = bcp_estimate(G).c1, "measured"
    combs = dict(subgroup_combings or {})
    for name in names:
        combs.setdefault(name, NormalFormSubgroupCombing(p, name))

    alpha = build_alpha(G)
    beta = build_beta(alpha, combs, P, c1)
    K, k_witness = fellow_traveler_K(beta)
    alpha_K, _ = fellow_traveler_K(alpha)
    N, n_witness = return_bound_N(beta)
    sync = synchrony_report(beta, alpha)
    subgroup_N = {name: return_bound_N(combs[name].as_combing())[0] for name in names}
    witnesses = [w for w in (k_witness, n_witness) if w is not None] + sync.witnesses

    analysis = CombingAnalysis(
        R=R, subgroups=names, poly=P, c1=c1, c1_source=c1_source, alpha=alpha, beta=beta,
        alpha_check=check_alpha(alpha), beta_check=check_beta(beta, alpha), K=K, alpha_K=alpha_K, N=N,
        sync=sync, subgroup_N=subgroup_N, witnesses=witnesses,
    )
    if checks:
        analysis.settle = settle_time_bound_check(beta, K, N)
        analysis.length_bound, analysis.length_profile = length_bound_check(beta, P, lambda k: c1)
    logger.info(f"📊 Combing constants at R={R}: K={K}, N={N}, M={sync.M}, T={sync.T}")
    return analysis


def constants_stability(p: Presentation, radii: Sequence[int], subgroups: Optional[Sequence[str]] = None,
                        poly: str = "x", c1: Optional[int] = None) -> StabilityReport:
    """Measured K, N, M, T (and subgroup N) across radii, with the differing constants listed."""
    constants = [analyze_combing(p, R, subgroups, poly, c1, checks=False).constants() for R in radii]
    diffs = []
    for name in ("K", "N", "M", "T", "alpha_K"):
        values = [getattr(c, name) for c in constants]
        if len(set(values)) > 1:
            diffs.append(StabilityDiff(constant=name, values=[None if v is None else str(v) for v in values]))
    sub_values = [c.subgroup_N for c in constants]
    if any(v != sub_values[0] for v in sub_values):
        diffs.append(StabilityDiff(constant="subgroup_N", values=[str(sorted(v.items())) for v in sub_values]))
    if diffs:
        logger.warning(f"⚠️ Combing constants differ across radii {list(radii)}: {[d.constant for d in diffs]}")
    return StabilityReport(radii=list(radii), constants=constants, stable=not diffs, diffs=diffs)
