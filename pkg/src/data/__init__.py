"""
Módulo de Datos
Lectura de paneles de rentabilidades y partición en muestras
"""

from .loaders import (
    PeriodSplit, load_french_10industry, load_prices_csv, load_returns_csv, select_period,
    split_periods, write_returns_csv,
)

__all__ = [
    'PeriodSplit',
    'load_french_10industry',
    'load_prices_csv',
    'load_returns_csv',
    'select_period',
    'split_periods',
    'write_returns_csv',
]
