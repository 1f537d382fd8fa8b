from pydantic import BaseModel, Field
from typing import Dict, List, Optional

from app.schemas.run_config_schema import RunConfig


class BarTermRecord(BaseModel):
    entries: List[str] = Field(alias="tuple")
    coeff: int

    class Config:
        populate_by_name = True


class BarChainRecord(BaseModel):
    degree: int
    terms: List[BarTermRecord] = []


class BarSelftestReport(BaseModel):
    samples: int
    seed: int
    boundary_squared_checked: int = 0
    cycles_checked: int = 0
    noncycles_checked: int = 0
    failures: List[str] = []
    passed: bool = True


class BarChainReport(BaseModel):
    chain: BarChainRecord
    boundary: Optional[BarChainRecord] = None
    cone: BarChainRecord
    is_cycle: bool
    cone_fills: bool
    homotopy_identity: bool
    norms: Dict[int, int]
    cone_norms: Dict[int, int]


class BarReport(BaseModel):
    selftest: Optional[BarSelftestReport] = None
    chain: Optional[BarChainReport] = None
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None
