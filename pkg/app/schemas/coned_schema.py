from pydantic import BaseModel
from typing import List, Optional

from app.schemas.run_config_schema import RunConfig


class PenetrationRecord(BaseModel):
    coset: str
    entry: str
    exit: str
    entry_index: int
    exit_index: int


class AnnotatedPathRecord(BaseModel):
    vertices: List[str]
    penetrations: List[PenetrationRecord] = []


class DeltaReport(BaseModel):
    value_doubled: int
    R: int
    mode: str  # 'exhaustive' or 'sampled'
    quadruples: int
    witness: List[str] = []
    ball_restricted: bool = True


class BcpWitness(BaseModel):
    kind: str  # 'entry_exit' or 'pairwise'
    value: int
    coset: str
    paths: List[AnnotatedPathRecord]


class BcpReport(BaseModel):
    c1_entry_exit: int
    c1_pairwise: int
    mode: str = "exhaustive"
    endpoint_pairs: int = 0
    geodesics: int = 0
    witnesses: List[BcpWitness] = []


class ConedReport(BaseModel):
    R: int
    subgroups: List[str]
    element_vertices: int
    coset_vertices: int
    generating_set: List[str] = []
    delta: DeltaReport
    bcp: Optional[BcpReport] = None
    delta_by_radius: List[DeltaReport] = []
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None
