"""Centralized logging configuration for copyheavy-extract."""

import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional


def setup_logger(
    name: str,
    log_file: Optional[str] = None,
    level: int = logging.DEBUG,
    console_level: int = logging.WARNING,
    max_bytes: int = 10 * 1024 * 1024,  # 10MB
    backup_count: int = 5
) -> logging.Logger:
    """
    Setup and configure a logger with file and console handlers.

    The console handler writes to stderr: stdout carries machine-readable
    CLI results only.

    Args:
        name: Logger name (usually __name__)
        log_file: Path to log file. If None, uses default 'logs/copyheavy.log'
        level: Logging level for file handler
        console_level: Logging level for console handler
        max_bytes: Maximum size of log file before rotation
        backup_count: Number of backup files to keep

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Only configure if not already configured
    if logger.handlers:
        return logger

    logger.setLevel(level)
    logger.propagate = False

    if log_file is None:
        log_dir = Path("logs")
        log_dir.mkdir(exist_ok=True)
        log_file = str(log_dir / "copyheavy.log")
    else:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)

    detailed_formatter = logging.Formatter(
        fmt='%(asctime)s | %(name)s | %(levelname)s | %(funcName)s:%(lineno)d | %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    simple_formatter = logging.Formatter(
        fmt='%(asctime)s | %(levelname)s | %(message)s',
        datefmt='%H:%M:%S'
    )

    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding='utf-8'
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(detailed_formatter)
    logger.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(console_level)
    console_handler.setFormatter(simple_formatter)
    logger.addHandler(console_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get or create a logger with the standard configuration.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Logger instance
    """
    logger = logging.getLogger(name)

    if not logger.handlers:
        return setup_logger(name)

    return logger


def _preview(text: str, limit: int = 500) -> str:
    if len(text) > limit:
        return text[:limit] + "... [truncated]"
    return text


def log_llm_request(logger: logging.Logger, backend: str, system_prompt: str, user_prompt: str, **kwargs):
    """
    Log a completion request with formatted details.

    Args:
        logger: Logger instance
        backend: Backend name
        system_prompt: System message content
        user_prompt: User message content
        **kwargs: Additional parameters (temperature, max_output_tokens, etc.)
    """
    logger.info(f"Completion request to backend: {backend}")
    logger.debug(f"Request parameters: {kwargs}")
    logger.debug(f"System: {_preview(system_prompt)}")
    logger.debug(f"User: {_preview(user_prompt)}")


def log_llm_response(logger: logging.Logger, response: str, success: bool = True, tokens: Optional[int] = None):
    """
    Log a completion response.

    Args:
        logger: Logger instance
        response: Response text, or the error message on failure
        success: Whether the request was successful
        tokens: Output token count when known
    """
    if success:
        logger.info(f"Completion received ({tokens} output tokens)")
        logger.debug(f"Response content: {_preview(response)}")
    else:
        logger.error(f"Completion failed: {response}")


def log_outcome(logger: logging.Logger, doc_id: str, method: str, fatal: bool, detail: str = ""):
    """
    Log one extraction outcome.

    Args:
        logger: Logger instance
        doc_id: Document identifier
        method: Method that produced the outcome
        fatal: Whether the outcome is fatal
        detail: Pair count or failure description
    """
    if fatal:
        logger.info(f"{doc_id} via {method} failed: {detail}")
    else:
        logger.info(f"{doc_id} via {method}: {detail}")


def set_console_level(level: int = logging.INFO, prefix: str = "src"):
    """
    Change the stderr handler level of every configured logger under prefix.

    Args:
        level: New console logging level
        prefix: Logger name prefix
    """
    for name, logger in logging.root.manager.loggerDict.items():
        if not name.startswith(prefix) or not isinstance(logger, logging.Logger):
            continue
        for handler in logger.handlers:
            if type(handler) is logging.StreamHandler:
                handler.setLevel(level)
