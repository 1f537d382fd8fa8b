from pydantic import BaseModel, field_validator
from typing import Dict, List, Optional

from app.schemas.run_config_schema import RunConfig


class ChainTerm(BaseModel):
    id: int
    coeff: int

    @field_validator('coeff')
    def nonzero(cls, v):
        if v == 0:
            raise ValueError('Chain coefficients must be nonzero')
        return v


class ChainRecord(BaseModel):
    dim: int
    cells: List[ChainTerm] = []


class ChainCounts(BaseModel):
    count: int
    weighted_count: int
    support_count: int
    weighted_support_count: int
    norms: List[int]


class FaceIncidence(BaseModel):
    face: int
    sign: int


class CellRecord(BaseModel):
    id: int
    label: str
    vertices: List[int]
    length: int
    boundary: List[FaceIncidence] = []


class ComplexStats(BaseModel):
    dim: int
    cells: int
    J: int
    J_prime: int


class ComplexReport(BaseModel):
    name: str
    base_vertex: int
    vertex_lengths: List[int]
    cells: Dict[int, List[CellRecord]]
    stats: List[ComplexStats]
    boundary_squared_zero: bool
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None
