from fastapi import APIRouter

from app.schemas.ball_schema import BallReport
from app.schemas.complex_schema import ComplexReport
from app.schemas.run_config_schema import CommandRequest, SchemaCatalog
from app.services.command_service import run_request
import logging

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/ball", response_model=BallReport)
def ball_endpoint(request: CommandRequest):
    return run_request("ball", request).report


@router.post("/complex", response_model=ComplexReport)
def complex_endpoint(request: CommandRequest):
    return run_request("complex", request).report


@router.get("/schemas", response_model=SchemaCatalog)
def schemas_endpoint():
    return run_request("schemas", CommandRequest()).report
