"""One function per subcommand; shared by the command line and the HTTP routes."""
import logging
from dataclasses import dataclass, field
from itertools import accumulate
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel, ValidationError

from app.crud.presentation_crud import load_presentation, presentation_from_text
from app.crud.report_crud import read_table_csv, write_json_report, write_table_csv
from app.errors import InfeasibleInstanceError, ParameterError
from app.schemas.ball_schema import BallReport
from app.schemas.barchain_schema import BarReport
from app.schemas.combing_schema import CombReport
from app.schemas.complex_schema import ComplexReport
from app.schemas.coned_schema import ConedReport
from app.schemas.filling_schema import CompareReport, DehnTableReport, FillingReport
from app.schemas.presentation_schema import Presentation
from app.schemas.run_config_schema import CommandRequest, RunConfig, SchemaCatalog
from app.services.barchain_service import analyze_chain, bar_selftest, parse_bar_chain
from app.services.cayley_service import build_ball, geodesic
from app.services.combing_service import analyze_combing, constants_stability
from app.services.complex_service import (
    CellComplex, box_surface, complex_report, cubical_lattice, loop_chain, presentation_complex
)
from app.services.coned_service import (
    bcp_estimate, bcp_report, cone_off, delta_by_radius, delta_hyperbolicity, delta_report
)
from app.services.filling_service import (
    bridge_check, compare_tables_over_radii, dehn_table, equivalent, filling_report, min_area_diagram,
    min_filling, poly_bound_fit
)
from app.services.words_service import format_word, get_engine, normal_form, parse_presentation, parse_word

logger = logging.getLogger(__name__)

# used by 'bar' when no presentation is given
DEFAULT_BAR_PRESENTATION = "generators: a b\nrelators: abAB\n"

COMMANDS = ("ball", "complex", "dehn", "filling", "coned", "comb", "bar", "compare", "schemas")


@dataclass
class CommandResult:
    name: str
    report: BaseModel
    tables: Dict[str, List[dict]] = field(default_factory=dict)


def _stamp(report: BaseModel, cfg: RunConfig, sha: Optional[str]) -> BaseModel:
    return report.model_copy(update={"config": cfg, "presentation_sha256": sha})


def _require(p: Optional[Presentation], command: str) -> Presentation:
    if p is None:
        raise ParameterError(f"'{command}' needs a presentation (--pres)")
    return p


def _generating_set(p: Optional[Presentation]) -> List[str]:
    return list(p.generator_names) if p is not None else []


def _complex(cfg: RunConfig, p: Optional[Presentation]) -> CellComplex:
    if cfg.cubical:
        return cubical_lattice(cfg.cubical, max(cfg.radius, 1), cfg.maxdim)
    return presentation_complex(build_ball(_require(p, cfg.command), cfg.radius))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_ball(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    p = _require(p, "ball")
    ball = build_ball(p, cfg.radius)
    layers = ball.layer_sizes()
    report = BallReport(
        R=cfg.radius, engine=get_engine(p).describe(), generating_set=_generating_set(p),
        relators=[format_word(p, r) for r in p.relators], vertices=len(ball), edges=len(ball.edges),
        layer_sizes=layers, volumes=list(accumulate(layers)),
        elements=[format_word(p, w) for w in ball.vertices],
    )
    if cfg.loop:
        target = normal_form(p, parse_word(p, cfg.loop))
        if target not in ball.index:
            raise ParameterError(f"{cfg.loop} lies outside the ball of radius {cfg.radius}")
        path = geodesic(ball, 0, ball.index[target])
        report.geodesic = [format_word(p, ball.vertices[v]) for v in path.vertices]
        report.geodesic_ball_restricted = path.ball_restricted
    rows = [{"r": r, "layer": n, "volume": v} for r, (n, v) in enumerate(zip(layers, report.volumes))]
    return CommandResult("ball", _stamp(report, cfg, sha), {"ball_volumes": rows})


def cmd_complex(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    X = _complex(cfg, p)
    return CommandResult("complex", _stamp(complex_report(X), cfg, sha))


def _dehn(cfg: RunConfig, X: CellComplex, weighted: bool, k_max: int = None, allow_prune: bool = True):
    prune = cfg.prune_translates if allow_prune else None
    return dehn_table(X, cfg.dim, cfg.k_max if k_max is None else k_max, weighted, cfg.threads,
                      cfg.max_nodes, cfg.max_seconds, prune)


def cmd_dehn(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    X = _complex(cfg, p)
    table = _dehn(cfg, X, cfg.weighted)
    report = table.to_report().model_copy(update={
        "generating_set": _generating_set(p) if not cfg.cubical else [],
        "counting_convention": cfg.counting_convention,
    })
    rows = [e.model_dump() for e in report.entries]
    name = f"dehn_d{cfg.dim}{'_w' if cfg.weighted else ''}"
    return CommandResult(name, _stamp(report, cfg, sha), {name: rows})


def cmd_filling(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    X = _complex(cfg, p)
    objective = "weighted" if cfg.weighted else "count"
    if cfg.cubical:
        size = cfg.box_size or 1
        b = box_surface(X, tuple([-(size // 2)] * cfg.cubical), size)
    else:
        if not cfg.loop:
            raise ParameterError("'filling' needs --loop WORD or --cubical K --box-size S")
        word = parse_word(p, cfg.loop)
        b = loop_chain(X, X.base_vertex, word)
    if cfg.solver == "diagram":
        if cfg.cubical:
            raise ParameterError("The diagram solver works on presentation complexes only")
        result = min_area_diagram(X, X.base_vertex, word, cfg.max_nodes, cfg.max_seconds)
    else:
        result = min_filling(X, b, objective, cfg.max_nodes, cfg.max_seconds, solver=cfg.solver)
    report = filling_report(X, b, result).model_copy(update={"counting_convention": cfg.counting_convention})
    return CommandResult("filling", _stamp(report, cfg, sha))


def cmd_coned(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    p = _require(p, "coned")
    subgroups = cfg.subgroups or None
    G = cone_off(build_ball(p, cfg.radius), subgroups)
    delta = delta_report(G, delta_hyperbolicity(G, seed=cfg.seed))
    report = ConedReport(
        R=cfg.radius, subgroups=[name for name, _ in G.subgroups], element_vertices=G.n_elements,
        coset_vertices=len(G.cosets), generating_set=_generating_set(p), delta=delta,
        bcp=bcp_report(G, bcp_estimate(G)),
        delta_by_radius=delta_by_radius(p, cfg.radii, subgroups, cfg.seed) if cfg.radii else [],
    )
    return CommandResult("coned", _stamp(report, cfg, sha))


def cmd_comb(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    p = _require(p, "comb")
    subgroups = cfg.subgroups or None
    analysis = analyze_combing(p, cfg.radius, subgroups, cfg.poly, cfg.c1)
    report: CombReport = analysis.to_report()
    if cfg.radii:
        report.stability = constants_stability(p, cfg.radii, subgroups, cfg.poly, cfg.c1)
    rows = [e.model_dump() for e in report.length_profile]
    return CommandResult("comb", _stamp(report, cfg, sha), {"comb_length_profile": rows})


def cmd_bar(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    if p is None:
        p = parse_presentation(DEFAULT_BAR_PRESENTATION)
    report = BarReport()
    if cfg.selftest:
        report.selftest = bar_selftest(p, cfg.samples, cfg.seed, cfg.norm_k_max)
    if cfg.chain:
        report.chain = analyze_chain(p, parse_bar_chain(p, cfg.chain), cfg.norm_k_max)
    if report.selftest is None and report.chain is None:
        raise ParameterError("'bar' needs --selftest or --chain")
    return CommandResult("bar", _stamp(report, cfg, sha))


def cmd_compare(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    if cfg.table_f and cfg.table_g:
        f, g = read_table_csv(cfg.table_f), read_table_csv(cfg.table_g)
        report = CompareReport(domination=equivalent(f, g, cfg.domination_box), tables={
            "f": [f[k] for k in sorted(f)], "g": [g[k] for k in sorted(g)]})
        report.fit_f, report.fit_g = _fit(f), _fit(g)
        return CommandResult("compare", _stamp(report, cfg, sha))

    X = _complex(cfg, p)
    plain = _dehn(cfg, X, weighted=False)
    weighted = _dehn(cfg, X, weighted=True, allow_prune=False)
    report = CompareReport(
        domination=equivalent(plain, weighted, cfg.domination_box),
        fit_f=_fit(plain.as_dict()), fit_g=_fit(weighted.as_dict()),
        bridge=bridge_check(X, plain, weighted, 0, cfg.max_nodes, cfg.max_seconds),
        tables={"d": plain.values, "d_w": weighted.values},
    )
    if cfg.radii:
        tables = []
        for R in cfg.radii:
            sub = cfg.model_copy(update={"radius": R})
            tables.append(_dehn(sub, _complex(sub, p), cfg.weighted))
        report.radius_comparison = compare_tables_over_radii(tables)
    rows = [{"k": k, "d": a, "d_w": b} for k, (a, b) in enumerate(zip(plain.values, weighted.values))]
    return CommandResult("compare", _stamp(report, cfg, sha), {"compare_tables": rows})


def _fit(table: Dict[int, int]):
    try:
        return poly_bound_fit(table)
    except InfeasibleInstanceError as e:
        logger.warning(f"⚠️ No polynomial fit: {e}")
        return None


REPORT_MODELS = {
    "ball": BallReport, "complex": ComplexReport, "dehn": DehnTableReport, "filling": FillingReport,
    "coned": ConedReport, "comb": CombReport, "bar": BarReport, "compare": CompareReport,
}


def cmd_schemas(cfg: RunConfig, p: Optional[Presentation], sha: Optional[str]) -> CommandResult:
    catalog = SchemaCatalog(schemas={name: model.model_json_schema() for name, model in REPORT_MODELS.items()})
    return CommandResult("schemas", catalog)


HANDLERS: Dict[str, Callable[[RunConfig, Optional[Presentation], Optional[str]], CommandResult]] = {
    "ball": cmd_ball, "complex": cmd_complex, "dehn": cmd_dehn, "filling": cmd_filling, "coned": cmd_coned,
    "comb": cmd_comb, "bar": cmd_bar, "compare": cmd_compare, "schemas": cmd_schemas,
}


def run_command(cfg: RunConfig, presentation_text: Optional[str] = None) -> CommandResult:
    """Resolve the presentation (file path in the config, or text) and dispatch."""
    if cfg.command not in HANDLERS:
        raise ParameterError(f"Unknown command '{cfg.command}'")
    p, sha = None, None
    if presentation_text is not None:
        p, sha = presentation_from_text(presentation_text)
    elif cfg.presentation:
        p, sha = load_presentation(cfg.presentation)
    logger.info(f"🚀 Running '{cfg.command}'")
    return HANDLERS[cfg.command](cfg, p, sha)


def write_outputs(result: CommandResult, root: Path) -> List[Path]:
    paths = [write_json_report(root, result.name, result.report)]
    for name, rows in result.tables.items():
        paths.append(write_table_csv(root, name, rows))
    return paths


# file paths on the server are not accepted over HTTP
SERVER_PATH_OPTIONS = ("presentation", "table_f", "table_g", "out")


def run_request(command: str, request: CommandRequest) -> CommandResult:
    """HTTP entry: options are validated into a RunConfig for ``command``."""
    try:
        options = {k: v for k, v in request.options.items() if k not in SERVER_PATH_OPTIONS}
        cfg = RunConfig(**{**options, "command": command})
    except ValidationError as e:
        raise ParameterError(f"Invalid options: {e.errors()[0]['msg']}")
    return run_command(cfg, request.presentation_text)
