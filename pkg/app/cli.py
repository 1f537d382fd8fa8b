"""Command line entry point: ``python -m app.cli <command> [options]``."""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app import config
from app.errors import ParameterError, ToolkitError
from app.report_store import report_store
from app.schemas.run_config_schema import RunConfig
from app.services.command_service import COMMANDS, run_command, write_outputs

logger = logging.getLogger(__name__)


def _csv_list(text: str) -> List[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    glob = common.add_argument_group("global options")
    glob.add_argument("--out", default=config.REPORT_DIR, help="report directory")
    glob.add_argument("--threads", type=int, default=config.THREADS)
    glob.add_argument("--max-nodes", type=int, default=config.MAX_NODES)
    glob.add_argument("--max-seconds", type=float, default=config.MAX_SECONDS)
    glob.add_argument("--seed", type=int, default=config.DEFAULT_SEED)

    run = common.add_argument_group("run options")
    run.add_argument("--pres", dest="presentation", help="presentation file")
    run.add_argument("--radius", type=int, default=3)
    run.add_argument("--dim", type=int, default=1)
    run.add_argument("--kmax", dest="k_max", type=int, default=8)
    run.add_argument("--weighted", action="store_true")
    run.add_argument("--solver", default="ilp", choices=["ilp", "lp", "diagram"])
    run.add_argument("--loop", help="word read as a loop at e")
    run.add_argument("--box-size", type=int)
    run.add_argument("--cubical", type=int, choices=[2, 3], help="use the cubical lattice of Z^k")
    run.add_argument("--maxdim", type=int)
    run.add_argument("--subgroups", type=_csv_list, default=[])
    run.add_argument("--poly", default="x")
    run.add_argument("--c1", type=int)
    run.add_argument("--radii", type=_int_list, default=[])
    run.add_argument("--selftest", action="store_true")
    run.add_argument("--samples", type=int, default=1000)
    run.add_argument("--chain")
    run.add_argument("--table-f")
    run.add_argument("--table-g")
    run.add_argument("--box", dest="domination_box", type=int, default=config.DOMINATION_BOX)
    run.add_argument("--norm-kmax", dest="norm_k_max", type=int, default=config.NORM_K_MAX)
    run.add_argument("--prune-translates", dest="prune_translates", action="store_true", default=None)
    run.add_argument("--no-prune-translates", dest="prune_translates", action="store_false")

    parser = argparse.ArgumentParser(prog="python -m app.cli", description="Filling and combing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO)
    args = build_parser().parse_args(argv)
    try:
        try:
            cfg = RunConfig(**vars(args))
        except ValidationError as e:
            raise ParameterError(f"Invalid options: {e.errors()[0]['loc'][0]}: {e.errors()[0]['msg']}")
        result = run_command(cfg)
        root = report_store.connect(cfg.out)
        for path in write_outputs(result, root):
            print(path)
    except ToolkitError as e:
        logger.error(f"❌ {type(e).__name__}: {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
