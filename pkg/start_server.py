#!/usr/bin/env python3
"""
Startup script for the ontfactor HTTP API
"""

import uvicorn
from config import config
from logging_config import get_logger

if __name__ == "__main__":
    logger = get_logger("ontfactor.api")

    logger.info("Starting ontfactor API...")
    logger.info("API will be available at: %s", config.get_url("api"))
    logger.info("API documentation at: %s", f"{config.get_url('api')}/docs")

    uvicorn.run(
        "api:app",
        host=config.HOST,
        port=config.get_port("api"),
        reload=config.RELOAD,
        log_level=config.LOG_LEVEL
    )
