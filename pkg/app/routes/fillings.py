from fastapi import APIRouter

from app.schemas.filling_schema import CompareReport, DehnTableReport, FillingReport
from app.schemas.run_config_schema import CommandRequest
from app.services.command_service import run_request
import logging

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/dehn", response_model=DehnTableReport)
def dehn_endpoint(request: CommandRequest):
    result = run_request("dehn", request)
    logger.info(f"📊 Dehn table served: {[e.value for e in result.report.entries]}")
    return result.report


@router.post("/filling", response_model=FillingReport)
def filling_endpoint(request: CommandRequest):
    return run_request("filling", request).report


@router.post("/compare", response_model=CompareReport)
def compare_endpoint(request: CommandRequest):
    return run_request("compare", request).report
