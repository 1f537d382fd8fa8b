from pydantic import BaseModel
from typing import List, Optional

from app.schemas.run_config_schema import RunConfig


class BallReport(BaseModel):
    R: int
    engine: str
    generating_set: List[str]
    relators: List[str]
    vertices: int
    edges: int
    layer_sizes: List[int]
    volumes: List[int]
    elements: List[str]
    geodesic: Optional[List[str]] = None
    geodesic_ball_restricted: Optional[bool] = None
    config: Optional[RunConfig] = None
    presentation_sha256: Optional[str] = None
