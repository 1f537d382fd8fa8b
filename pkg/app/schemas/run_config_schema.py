from pydantic import BaseModel, Field, field_validator
from typing import Any, Dict, List, Optional

from app import config


class RunConfig(BaseModel):
    """Every resolved parameter of one run; embedded verbatim in each report."""
    command: str
    presentation: Optional[str] = None
    radius: int = 3
    dim: int = 1
    k_max: int = 8
    weighted: bool = False
    solver: str = "ilp"
    loop: Optional[str] = None
    box_size: Optional[int] = None
    cubical: Optional[int] = None
    maxdim: Optional[int] = None
    subgroups: List[str] = []
    poly: str = "x"
    c1: Optional[int] = None
    radii: List[int] = []
    selftest: bool = False
    samples: int = 1000
    chain: Optional[str] = None
    table_f: Optional[str] = None
    table_g: Optional[str] = None
    domination_box: int = config.DOMINATION_BOX
    norm_k_max: int = config.NORM_K_MAX
    prune_translates: Optional[bool] = None
    seed: int = config.DEFAULT_SEED
    threads: int = Field(default=config.THREADS, ge=1)
    max_nodes: int = Field(default=config.MAX_NODES, ge=1)
    max_seconds: float = Field(default=config.MAX_SECONDS, gt=0)
    out: str = config.REPORT_DIR
    counting_convention: str = "multiplicity"

    @field_validator('radius', 'k_max')
    def nonnegative(cls, v):
        if v < 0:
            raise ValueError('Must be nonnegative')
        return v

    @field_validator('solver')
    def solver_known(cls, v):
        if v not in ("ilp", "lp", "diagram"):
            raise ValueError("solver must be 'ilp', 'lp' or 'diagram'")
        return v


class CommandRequest(BaseModel):
    """HTTP body: presentation file content plus the run parameters."""
    presentation_text: Optional[str] = None
    options: Dict[str, Any] = {}


class SchemaCatalog(BaseModel):
    schemas: Dict[str, dict]
