"""
Configuración de ejecución del motor de carteras
Precedencia: valores por defecto < variables PORTFOLIO_* (.env) < archivo --config < flags
"""

import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from dotenv import dotenv_values, find_dotenv, load_dotenv

from .errors import ConfigError

logger = logging.getLogger(__name__)

# .env del directorio de trabajo
load_dotenv(find_dotenv(usecwd=True))


class InputKind(Enum):
    RETURNS_CSV = "returns_csv"
    PRICES_CSV = "prices_csv"
    FRENCH10 = "french10"


class OutputFormat(Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


class PortfolioConfig:
    """Valores por defecto y nombres de variables de entorno"""

    ENV_PREFIX = 'PORTFOLIO_'

    DEFAULTS: Dict[str, Any] = {
        'INPUT': None,
        'KIND': 'returns_csv',
        'PERCENT': 'false',
        'SPLIT': None,
        'START': None,
        'END': None,
        'INTERVAL': None,
        'MSR_RATE': None,
        'NO_SHORT': 'false',
        'GRID': '1000',
        'HORIZONS': None,
        'MODE': 'buy_and_hold',
        'FORMAT': 'table',
        'OUT': None,
        'PRECISION': '6',
        'CML_RATES': None,
        'CLOUD': '0',
    }

    MAX_PRECISION = 15

    DEFAULT_FRENCH10_PATH = 'data/10_Industry_Portfolios.txt'

    @classmethod
    def french10_path(cls) -> str:
        """Ruta del archivo opcional de 10 industrias (entorno o .env)"""
        load_dotenv(find_dotenv(usecwd=True))
        return os.getenv('FRENCH10_PATH', cls.DEFAULT_FRENCH10_PATH)

    @classmethod
    def from_environment(cls) -> Dict[str, Any]:
        """Leer las claves conocidas desde el entorno (incluye .env)"""
        load_dotenv(find_dotenv(usecwd=True))
        values = {}
        for key in cls.DEFAULTS:
            value = os.getenv(cls.ENV_PREFIX + key)
            if value is not None:
                values[key] = value
        return values

    @classmethod
    def from_file(cls, path: str) -> Dict[str, Any]:
        """Leer un archivo clave=valor; admite claves con o sin prefijo"""
        if not os.path.isfile(path):
            raise ConfigError(f"Archivo de configuración no encontrado: {path}")
        values = {}
        for raw_key, value in dotenv_values(path).items():
            key = raw_key.upper()
            if key.startswith(cls.ENV_PREFIX):
                key = key[len(cls.ENV_PREFIX):]
            if key not in cls.DEFAULTS:
                raise ConfigError(f"Clave de configuración desconocida: {raw_key}")
            if value is not None:
                values[key] = value
        return values

    @classmethod
    def validate_config(cls, config: 'RunConfig') -> bool:
        """Validar invariantes de RunConfig"""
        if config.interval is not None:
            r1, r2 = config.interval
            if r2 is not None and r1 > r2:
                raise ConfigError(f"Intervalo inválido: r1={r1} > r2={r2}")
        if config.grid_n < 1:
            raise ConfigError(f"La malla debe tener n >= 1 (recibido {config.grid_n})")
        if not 1 <= config.precision <= cls.MAX_PRECISION:
            raise ConfigError(f"Precisión fuera de rango [1, {cls.MAX_PRECISION}]: {config.precision}")
        if config.horizons is not None and any(h < 1 for h in config.horizons):
            raise ConfigError(f"Horizontes deben ser positivos: {config.horizons}")
        if config.cloud < 0:
            raise ConfigError(f"La nube de carteras no puede ser negativa: {config.cloud}")
        return True


@dataclass
class RunConfig:
    """Parámetros de una invocación del CLI"""
    input_path: Optional[str] = None
    kind: InputKind = InputKind.RETURNS_CSV
    percent: bool = False
    split: Optional[str] = None
    start: Optional[str] = None
    end: Optional[str] = None
    interval: Optional[Tuple[float, Optional[float]]] = None
    msr_rate: Optional[float] = None
    allow_short: bool = True
    grid_n: int = 1000
    horizons: Optional[List[int]] = None
    mode: str = 'buy_and_hold'
    output_format: OutputFormat = OutputFormat.TABLE
    out_dir: Optional[str] = None
    precision: int = 6
    cml_rates: Optional[List[float]] = None
    cloud: int = 0
    sources: Dict[str, str] = field(default_factory=dict)


def _parse_bool(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off', ''):
        return False
    raise ConfigError(f"Valor booleano inválido para {key}: {value!r}")


def _parse_float(key: str, value: Any) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Valor numérico inválido para {key}: {value!r}")


def _parse_int(key: str, value: Any) -> int:
    try:
        return int(str(value).strip())
    except (TypeError, ValueError):
        raise ConfigError(f"Valor entero inválido para {key}: {value!r}")


def parse_interval(value: Any) -> Tuple[float, Optional[float]]:
    """Interpretar 'R1:R2'; 'R1:' deja el extremo superior al r_GMV del modelo"""
    if isinstance(value, tuple):
        return value
    text = str(value).strip()
    if ':' not in text:
        raise ConfigError(f"Intervalo inválido (se espera R1:R2): {value!r}")
    left, right = text.split(':', 1)
    r1 = _parse_float('INTERVAL', left) if left.strip() else 0.0
    r2 = _parse_float('INTERVAL', right) if right.strip() else None
    return r1, r2


def parse_horizons(value: Any) -> List[int]:
    if isinstance(value, (list, tuple)):
        return [int(h) for h in value]
    return [_parse_int('HORIZONS', part) for part in str(value).split(',') if part.strip()]


def parse_rates(value: Any) -> List[float]:
    """Lista de tasas '0,0.0013,0.0025'"""
    if isinstance(value, (list, tuple)):
        return [float(r) for r in value]
    return [_parse_float('CML_RATES', part) for part in str(value).split(',') if part.strip()]


def _parse_mode(value: Any) -> str:
    text = str(value).strip().lower().replace('-', '_')
    if text in ('buyhold', 'buy_and_hold'):
        return 'buy_and_hold'
    if text == 'rebalanced':
        return 'rebalanced'
    raise ConfigError(f"Modo de backtest desconocido: {value!r}")


def _parse_enum(enum_cls, key: str, value: Any):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(str(value).strip().lower())
    except ValueError:
        options = ', '.join(member.value for member in enum_cls)
        raise ConfigError(f"Valor inválido para {key}: {value!r} (opciones: {options})")


def build_run_config(flags: Optional[Dict[str, Any]] = None,
                     config_file: Optional[str] = None,
                     use_environment: bool = True) -> RunConfig:
    """Combinar las cuatro capas de configuración y validar el resultado"""
    merged: Dict[str, Any] = dict(PortfolioConfig.DEFAULTS)
    sources = {key: 'default' for key in merged}

    layers = []
    if use_environment:
        layers.append(('env', PortfolioConfig.from_environment()))
    if config_file:
        layers.append(('file', PortfolioConfig.from_file(config_file)))
    layers.append(('flag', {k: v for k, v in (flags or {}).items() if v is not None}))

    for source, values in layers:
        for key, value in values.items():
            if key not in merged:
                raise ConfigError(f"Clave de configuración desconocida: {key}")
            merged[key] = value
            sources[key] = source

    config = RunConfig(
        input_path=merged['INPUT'],
        kind=_parse_enum(InputKind, 'KIND', merged['KIND']),
        percent=_parse_bool('PERCENT', merged['PERCENT']),
        split=str(merged['SPLIT']) if merged['SPLIT'] is not None else None,
        start=str(merged['START']) if merged['START'] is not None else None,
        end=str(merged['END']) if merged['END'] is not None else None,
        interval=parse_interval(merged['INTERVAL']) if merged['INTERVAL'] is not None else None,
        msr_rate=_parse_float('MSR_RATE', merged['MSR_RATE']) if merged['MSR_RATE'] is not None else None,
        allow_short=not _parse_bool('NO_SHORT', merged['NO_SHORT']),
        grid_n=_parse_int('GRID', merged['GRID']),
        horizons=parse_horizons(merged['HORIZONS']) if merged['HORIZONS'] is not None else None,
        mode=_parse_mode(merged['MODE']),
        output_format=_parse_enum(OutputFormat, 'FORMAT', merged['FORMAT']),
        out_dir=merged['OUT'],
        precision=_parse_int('PRECISION', merged['PRECISION']),
        cml_rates=parse_rates(merged['CML_RATES']) if merged['CML_RATES'] is not None else None,
        cloud=_parse_int('CLOUD', merged['CLOUD']),
        sources=sources,
    )
    PortfolioConfig.validate_config(config)
    logger.debug(f"Configuración resuelta: {config}")
    return config
