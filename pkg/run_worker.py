#!/usr/bin/env python3
"""
Run a Celery worker for distributed Method-1 compression restarts
"""

import os
import sys
import uuid

# Add the current directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from celery_app import celery_app
from config import config

if __name__ == '__main__':
    # Unique node name so several workers can share a broker
    node_name = f"ontfactor-worker-{uuid.uuid4().hex[:8]}"

    celery_app.worker_main([
        'worker',
        f'--loglevel={config.LOG_LEVEL}',
        f'--concurrency={config.WORKER_CONCURRENCY}',
        '--pool=prefork',
        f'--hostname={node_name}'
    ])
