"""
Configuración de logging esencial para el motor de carteras
La salida de los comandos va a stdout; el log siempre va a stderr
"""

import logging
import os
import sys
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

STATUS_PREFIX = {
    'OK': ('✅', logging.INFO),
    'WARNING': ('⚠️', logging.WARNING),
    'ERROR': ('❌', logging.ERROR),
}


def setup_essential_logging(level: Optional[str] = None, log_file: Optional[str] = None):
    """Configurar logging solo para información esencial"""
    level_name = (level or os.getenv('LOG_LEVEL', 'WARNING')).upper()
    log_file = log_file or os.getenv('PORTFOLIO_LOG_FILE')

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(format=LOG_FORMAT, level=getattr(logging, level_name, logging.WARNING),
                        handlers=handlers, force=True)

    # Silenciar logs innecesarios
    for logger_name in ('matplotlib', 'numexpr', 'scipy', 'fontTools'):
        logging.getLogger(logger_name).setLevel(logging.ERROR)


def log_system_status(component: str, status: str, details: str = ""):
    """Línea de estado de un comando: '✅ portfolio' o '❌ backtest: RateTooHigh'"""
    prefix, level = STATUS_PREFIX.get(status, STATUS_PREFIX['WARNING'])
    message = f"{prefix} {component}: {details}" if details else f"{prefix} {component}"
    logging.getLogger('PORTFOLIO').log(level, message)
