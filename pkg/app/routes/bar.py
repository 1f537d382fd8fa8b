from fastapi import APIRouter

from app.schemas.barchain_schema import BarReport
from app.schemas.run_config_schema import CommandRequest
from app.services.command_service import run_request
import logging

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("", response_model=BarReport, response_model_by_alias=True)
def bar_endpoint(request: CommandRequest):
    return run_request("bar", request).report
