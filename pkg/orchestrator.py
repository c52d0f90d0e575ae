"""
Restart runners for Method-1 compression.

The local runner executes restarts one after another in-process; the Celery runner fans
them out as a group and collects results in restart order, so both pick the same winner.
"""

from typing import List, Optional

from celery import group

from compression import RestartRunner, local_restart_runner
from config import config
from logging_config import get_logger
from models import BlockUniformOF, CompressionParams, DataTable, OntFactorization
from table_core import rank
from tasks import method1_restart_task

logger = get_logger("ontfactor.worker")

BACKENDS = ("local", "celery")


def celery_restart_runner(table: DataTable, uniform: BlockUniformOF, params: CompressionParams) -> List[OntFactorization]:
    floor = rank(table)
    table_json = table.model_dump(mode="json")
    uniform_json = uniform.model_dump(mode="json")
    params_json = params.model_dump(mode="json")
    job = group(
        method1_restart_task.s(table_json, uniform_json, params_json, r, floor)
        for r in range(params.restarts)
    )
    logger.info("dispatching %d method-1 restarts to celery", params.restarts)
    group_result = job.apply_async()
    # children are collected one by one, in restart order
    payloads = [result.get(timeout=config.CELERY_RESULT_TIMEOUT) for result in group_result.results]
    return [OntFactorization.model_validate(p) for p in payloads]


def get_restart_runner(backend: Optional[str] = None) -> RestartRunner:
    backend = backend or config.COMPRESSION_BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"compression backend must be one of {BACKENDS}, got {backend!r}")
    return celery_restart_runner if backend == "celery" else local_restart_runner
