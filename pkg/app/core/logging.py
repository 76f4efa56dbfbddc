"""
Configuration du logging
Console colorée (coloredlogs) ou JSON (python-json-logger)
"""

import logging
from typing import Optional

import coloredlogs
from pythonjsonlogger import jsonlogger

from app.core.config import settings


LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

_configured = False


def setup_logging(
    level: Optional[str] = None,
    fmt: Optional[str] = None,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """
    Configure la hiérarchie de loggers "app" une seule fois

    Args:
        level: Niveau de log (défaut: settings.LOG_LEVEL)
        fmt: "console" ou "json" (défaut: settings.LOG_FORMAT)
        log_file: Fichier de log optionnel (défaut: settings.LOG_FILE)

    Returns:
        Logger racine de l'application
    """
    global _configured

    level = (level or settings.LOG_LEVEL).upper()
    fmt = fmt or settings.LOG_FORMAT
    log_file = log_file or settings.LOG_FILE

    logger = logging.getLogger("app")
    if _configured:
        logger.setLevel(level)
        return logger

    logger.propagate = False

    if fmt == "json":
        # sys.stderr résolu à chaque écriture
        handler = coloredlogs.StandardErrorHandler()
        handler.setFormatter(jsonlogger.JsonFormatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(level)
    else:
        coloredlogs.install(level=level, logger=logger, fmt=LOG_FORMAT)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(jsonlogger.JsonFormatter(LOG_FORMAT))
        logger.addHandler(file_handler)

    _configured = True
    return logger
