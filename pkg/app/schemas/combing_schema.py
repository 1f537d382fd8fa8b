from pydantic import BaseModel
from typing import Dict, List, Optional

from app.schemas.run_config_schema import RunConfig


class CombingPathRecord(BaseModel):
    g: str
    positions: List[str]
    settle_time: int
    length: int


class ConstantWitness(BaseModel):
    constant: str  # 'K', 'N', 'M', 'T'
    value: str
    elements: List[str]
    time: Optional[int] = None
    detail: str = ""


class CombingConstants(BaseModel):
    K: str
    N: int
    M: Optional[int] = None
    T: Optional[int] = None
    alpha_K: Optional[str] = None
    subgroup_N: Dict[str, int] = {}


class AlphaCheckReport(BaseModel):
    coherent: bool
    geodesic: bool
    pairs_checked: int
    witness: List[str] = []


class BetaCheckReport(BaseModel):
    ends_ok: bool
    projection_ok: bool
    prefix_ok: bool
    witness: List[str] = []


class SettleCheckReport(BaseModel):
    checked: int = 0
    violations: List[ConstantWitness] = []
    inconclusive: int = 0
    min_slack: Optional[int] = None
    max_slack: Optional[int] = None
    ball_restricted: bool = False


class LengthProfileEntry(BaseModel):
    len_g: int
    len_beta: int


class LengthBoundReport(BaseModel):
    checked: int = 0
    violations: List[str] = []
    fitted_exponent: Optional[float] = None


class StabilityDiff(BaseModel):
    constant: str
    values: List[Optional[str]]


class StabilityReport(BaseModel):
    radii: List[int]
    constants: List[CombingConstants]
    stable: bool
    diffs: List[StabilityDiff] = []


class CombReport(BaseModel):
    target: str = "G"
    R: int
    subgroups: List[str]
    poly: str
    c1: int
    c1_source: str  # 'measured' or 'user'
    unit_time: int
    alpha: AlphaCheckReport
    beta: BetaCheckReport
    constants: CombingConstants
    witnesses: List[ConstantWitness] = []
    settle: Optional[SettleCheckReport] = None
    length_bound: Optional[LengthBoundReport] = None
    length_profile: List[LengthProfileEntry] = []
    paths: List[CombingPathRecord] = []
    stability: Optional[StabilityReport] = None
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None
