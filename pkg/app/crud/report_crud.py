import logging
from pathlib import Path
from typing import Dict, List, Type, TypeVar

import pandas as pd
from pydantic import BaseModel, ValidationError

from app.errors import ParameterError

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def write_json_report(root: Path, name: str, report: BaseModel) -> Path:
    path = Path(root) / f"{name}.json"
    try:
        path.write_text(report.model_dump_json(indent=2, by_alias=True) + "\n", encoding="utf-8")
        logger.info(f"📝 Report written: {path}")
    except OSError as e:
        logger.error(f"❌ Failed to write report {path}: {e}", exc_info=True)
        raise
    return path


def write_table_csv(root: Path, name: str, rows: List[dict]) -> Path:
    path = Path(root) / f"{name}.csv"
    pd.DataFrame(rows).to_csv(path, index=False, lineterminator="\n")
    logger.info(f"📝 Table written: {path}")
    return path


def read_json_report(path: str, model: Type[M]) -> M:
    try:
        return model.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValidationError) as e:
        raise ParameterError(f"Cannot read report {path}: {e}")


def read_table_csv(path: str) -> Dict[int, int]:
    """Table k -> value from a CSV with columns ``k`` and ``value`` (as written by the dehn command)."""
    try:
        frame = pd.read_csv(path)
    except (OSError, ValueError) as e:
        raise ParameterError(f"Cannot read table {path}: {e}")
    if not {"k", "value"} <= set(frame.columns):
        raise ParameterError(f"Table {path} needs columns 'k' and 'value'")
    return {int(k): int(v) for k, v in zip(frame["k"], frame["value"])}
