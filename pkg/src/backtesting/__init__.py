"""
Módulo de Backtesting Fuera de Muestra
Evaluación de carteras fijas y comparación de estrategias
"""

from .backtesting_engine import (
    BacktestingEngine, BacktestMode, EquityCurve, Regime, StrategyReport, StrategyRow,
    compare_strategies, equity_curve, portfolio_value_change,
)
from .report_generator import StrategyReportGenerator

__all__ = [
    'BacktestingEngine',
    'BacktestMode',
    'EquityCurve',
    'Regime',
    'StrategyReport',
    'StrategyRow',
    'StrategyReportGenerator',
    'compare_strategies',
    'equity_curve',
    'portfolio_value_change',
]
