import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

from config import config


LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_LEVEL_COLORS = {
    logging.WARNING: "\033[33m",
    logging.ERROR: "\033[31m",
    logging.CRITICAL: "\033[1;31m",
}
_RESET = "\033[0m"


class ConsoleFormatter(logging.Formatter):
    """Colours the level name on a terminal unless NO_COLOR is set."""

    def __init__(self, stream) -> None:
        super().__init__(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
        isatty = getattr(stream, "isatty", None)
        self.use_color = "NO_COLOR" not in os.environ and bool(isatty and isatty())

    def format(self, record: logging.LogRecord) -> str:
        if not self.use_color or record.levelno not in _LEVEL_COLORS:
            return super().format(record)
        original = record.levelname
        record.levelname = f"{_LEVEL_COLORS[record.levelno]}{original}{_RESET}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


def ensure_logs_directory(logs_dir: str) -> None:
    """Ensure the logs directory exists."""
    Path(logs_dir).mkdir(parents=True, exist_ok=True)


def parse_level(level) -> int:
    if isinstance(level, int):
        return level
    return getattr(logging, str(level).upper(), logging.INFO)


def get_file_logger(
    logger_name: str,
    log_file_path: str,
    level: int = logging.INFO,
    max_bytes: int = 10 * 1024 * 1024,
    backup_count: int = 5,
) -> logging.Logger:
    """
    Create or retrieve a configured logger that writes to a rotating file.

    - logger_name: Unique name for the logger
    - log_file_path: Absolute or project-relative path to the log file
    - level: Logging level (default INFO)
    - max_bytes: Max file size before rotation (default 10MB)
    - backup_count: Number of rotated backups to keep (default 5)
    """
    logs_dir = os.path.dirname(os.path.abspath(log_file_path)) or "."
    ensure_logs_directory(logs_dir)

    logger = logging.getLogger(logger_name)
    # Avoid duplicate handlers if called multiple times
    if logger.handlers:
        logger.setLevel(level)
        return logger

    logger.setLevel(level)

    file_handler = RotatingFileHandler(
        filename=log_file_path,
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding="utf-8",
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))

    # Diagnostics at WARNING+ also go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.WARNING)
    console_handler.setFormatter(ConsoleFormatter(sys.stderr))

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    # Do not propagate to root to avoid duplicate logs
    logger.propagate = False

    return logger


def get_logger(logger_name: str) -> logging.Logger:
    """Logger bound to the configured log file and level."""
    return get_file_logger(
        logger_name=logger_name,
        log_file_path=config.LOG_FILE,
        level=parse_level(config.LOG_LEVEL),
    )
