"""
Configuration for ontfactor.
Centralizes caps, tolerances, logging and service settings so every module reads the same values.
"""

import os
from typing import Dict


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


class Config:
    """Central configuration for ontfactor"""

    # Port assignments
    PORTS = {
        "api": 8000,               # FastAPI service
        "redis": 6379,             # Celery broker / result backend
    }

    # Host settings
    HOST = os.getenv("ONTFACTOR_HOST", "0.0.0.0")
    RELOAD = _env_bool("ONTFACTOR_RELOAD", "false")

    # API settings
    API_TITLE = "ontfactor"
    API_VERSION = "1.0.0"
    API_DESCRIPTION = "Exact ontological factorizations of probabilistic data tables"

    # Logging
    LOG_LEVEL = os.getenv("ONTFACTOR_LOG_LEVEL", "info")
    LOG_FILE = os.getenv("ONTFACTOR_LOG_FILE", "logs/ontfactor.log")

    # Resource caps
    MODEL2_STATE_CAP = int(os.getenv("ONTFACTOR_MODEL2_STATE_CAP", str(2 ** 24)))
    BOUND_SATURATION = int(os.getenv("ONTFACTOR_BOUND_SATURATION", str(2 ** 63 - 1)))
    BINARY_WORST_CASE_MAX_M = int(os.getenv("ONTFACTOR_BINARY_WORST_CASE_MAX_M", "20"))
    KS_PROJECTOR_CAP = int(os.getenv("ONTFACTOR_KS_PROJECTOR_CAP", "30"))
    EXHAUSTIVE_CAP = int(os.getenv("ONTFACTOR_EXHAUSTIVE_CAP", str(2 ** 20)))

    # Numerical tolerances (quantum-gen only; everything else is exact)
    RATIONALIZE_TOL = float(os.getenv("ONTFACTOR_RATIONALIZE_TOL", "1e-9"))
    REALIZATION_TOL = float(os.getenv("ONTFACTOR_REALIZATION_TOL", "1e-10"))

    # Method-1 restart runner: "local" or "celery"
    COMPRESSION_BACKEND = os.getenv("ONTFACTOR_COMPRESSION_BACKEND", "local")

    # Celery settings
    CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", "redis://localhost:6379/0")
    CELERY_RESULT_BACKEND = os.getenv("CELERY_RESULT_BACKEND", "redis://localhost:6379/0")
    CELERY_TASK_ALWAYS_EAGER = _env_bool("ONTFACTOR_CELERY_EAGER", "false")
    CELERY_RESULT_TIMEOUT = int(os.getenv("ONTFACTOR_CELERY_RESULT_TIMEOUT", "600"))
    WORKER_CONCURRENCY = int(os.getenv("ONTFACTOR_WORKER_CONCURRENCY", "2"))

    @classmethod
    def get_port(cls, service: str) -> int:
        """Get port for a specific service"""
        return cls.PORTS.get(service)

    @classmethod
    def get_url(cls, service: str) -> str:
        """Get full URL for a service"""
        port = cls.get_port(service)
        if port:
            return f"http://localhost:{port}"
        return None

    @classmethod
    def get_all_urls(cls) -> Dict[str, str]:
        """Get all service URLs"""
        return {
            service: cls.get_url(service)
            for service in cls.PORTS.keys()
        }


# Create a global config instance
config = Config()
