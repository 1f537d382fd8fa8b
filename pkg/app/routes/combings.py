from fastapi import APIRouter

from app.schemas.combing_schema import CombReport
from app.schemas.coned_schema import ConedReport
from app.schemas.run_config_schema import CommandRequest
from app.services.command_service import run_request
import logging

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/coned", response_model=ConedReport)
def coned_endpoint(request: CommandRequest):
    return run_request("coned", request).report


@router.post("/comb", response_model=CombReport)
def comb_endpoint(request: CommandRequest):
    result = run_request("comb", request)
    constants = result.report.constants
    logger.info(f"📊 Combing served: K={constants.K}, N={constants.N}, M={constants.M}, T={constants.T}")
    return result.report
