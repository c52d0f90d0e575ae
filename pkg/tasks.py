from typing import Any, Dict

from celery_app import celery_app
from compression import method1_restart
from logging_config import get_logger
from models import BlockUniformOF, CompressionParams, DataTable

logger = get_logger("ontfactor.worker")


@celery_app.task(name="tasks.method1_restart_task")
def method1_restart_task(
    table: Dict[str, Any],
    uniform: Dict[str, Any],
    params: Dict[str, Any],
    restart: int,
    floor: int,
) -> Dict[str, Any]:
    """One Method-1 restart; arguments and result travel as JSON-mode model dumps."""
    table_model = DataTable.model_validate(table)
    result = method1_restart(
        table_model,
        BlockUniformOF.model_validate(uniform),
        CompressionParams.model_validate(params),
        restart,
        floor=floor,
    )
    logger.info("restart %d finished with omega=%d", restart, result.omega)
    return result.model_dump(mode="json")
