from pydantic import BaseModel
from typing import Dict, List, Optional

from app.schemas.complex_schema import ChainRecord
from app.schemas.run_config_schema import RunConfig


class FillingReport(BaseModel):
    complex: str
    objective: str
    solver: str
    status: str  # 'exact', 'upper-bound', 'lp-lower-bound'
    count: Optional[int] = None
    weighted_count: Optional[int] = None
    lower_bound: str
    nodes: int = 0
    boundary: ChainRecord
    filling: Optional[ChainRecord] = None
    counting_convention: str = "multiplicity"
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None


class DehnTableEntry(BaseModel):
    k: int
    value: int
    status: str  # 'exact' or 'lower-bound'
    witness_id: Optional[int] = None


class DehnWitness(BaseModel):
    id: int
    size: int
    value: int
    status: str
    boundary: ChainRecord


class DehnTableReport(BaseModel):
    complex: str
    dim: int
    weighted: bool
    radius: Optional[int] = None
    ball_restricted: bool = True
    entries: List[DehnTableEntry]
    witnesses: List[DehnWitness] = []
    boundaries_enumerated: int = 0
    instances_solved: int = 0
    skipped_non_boundaries: int = 0
    generating_set: List[str] = []
    counting_convention: str = "multiplicity"
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None


class PolyFitReport(BaseModel):
    degree: int
    coefficient: str
    slope: Optional[float] = None
    max_residual: Optional[float] = None


class DominationReport(BaseModel):
    box: int
    f_dominated_by_g: Optional[List[int]] = None
    g_dominated_by_f: Optional[List[int]] = None
    equivalent: bool = False


class BridgeViolation(BaseModel):
    boundary_id: int
    check: str
    lhs: int
    rhs: int
    status: str  # 'violation' or 'inconclusive'


class BridgeReport(BaseModel):
    forward_checked: int = 0
    converse_checked: int = 0
    pointwise_checked: int = 0
    violations: List[BridgeViolation] = []
    inconclusive: List[BridgeViolation] = []
    J_top: int
    J_top_prime: int
    J_n: int
    J_n_prime: int
    L: int = 0


class RadiusDiff(BaseModel):
    k: int
    values: List[int]


class RadiusComparisonReport(BaseModel):
    radii: List[int]
    nondecreasing: bool
    stabilized: bool
    diffs: List[RadiusDiff] = []


class CompareReport(BaseModel):
    domination: DominationReport
    fit_f: Optional[PolyFitReport] = None
    fit_g: Optional[PolyFitReport] = None
    bridge: Optional[BridgeReport] = None
    radius_comparison: Optional[RadiusComparisonReport] = None
    tables: Dict[str, List[int]] = {}
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None
