"""
Motor de Backtesting Fuera de Muestra
Evalúa carteras de pesos fijos sobre el período de prueba y compara estrategias
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..analysis.cross_efficiency import RateInterval, mcesr_portfolio
from ..analysis.frontier import Portfolio, gmv_portfolio, msr_portfolio, tangent_portfolio
from ..analysis.market_model import ReturnMatrix, estimate_moments
from ..optimization.qp_no_short import gmv_no_short, mcesr_no_short, msr_no_short, tangent_no_short
from ..utils.errors import HorizonTooLong, InvalidReturnMatrix, InvalidWeights

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-8
STRATEGIES = ('GMV', 'TP', 'MSR', 'MCESR')


class BacktestMode(Enum):
    REBALANCED = "rebalanced"
    BUY_AND_HOLD = "buy_and_hold"


class Regime(Enum):
    SHORT = "short"
    NO_SHORT = "no_short"


@dataclass(frozen=True, eq=False)
class EquityCurve:
    """Valor acumulado de la cartera partiendo de 1.0"""
    labels: Tuple[str, ...]
    values: np.ndarray

    @property
    def final_value(self) -> float:
        return float(self.values[-1])

    @property
    def max_drawdown(self) -> float:
        """Caída máxima desde un pico, en porcentaje"""
        peaks = np.maximum.accumulate(np.concatenate(([1.0], self.values)))[1:]
        with np.errstate(divide='ignore', invalid='ignore'):
            drawdowns = np.where(peaks > 0, (peaks - self.values) / peaks, 0.0)
        return float(drawdowns.max() * 100)


@dataclass(frozen=True)
class StrategyRow:
    """Cambio de valor de una estrategia en un horizonte"""
    strategy: str
    label: str
    rf: Optional[float]
    horizon: int
    mode: str
    percent_change: float


@dataclass
class StrategyReport:
    """Tabla de cambios de valor por estrategia, régimen y horizonte"""
    rows: List[StrategyRow] = field(default_factory=list)
    portfolios: Dict[Tuple[str, str], Portfolio] = field(default_factory=dict)

    COLUMNS = ('strategy', 'label', 'rf', 'horizon', 'mode', 'percent_change')

    def value(self, strategy: str, horizon: int, label: str = Regime.SHORT.value) -> float:
        for row in self.rows:
            if row.strategy == strategy and row.horizon == horizon and row.label == label:
                return row.percent_change
        raise KeyError(f"{strategy}/{label}/{horizon}")

    def horizons(self) -> List[int]:
        return sorted({row.horizon for row in self.rows})

    def labels(self) -> List[str]:
        return [regime.value for regime in Regime if any(row.label == regime.value for row in self.rows)]

    def combine(self, other: 'StrategyReport') -> 'StrategyReport':
        portfolios = dict(self.portfolios)
        portfolios.update(other.portfolios)
        return StrategyReport(rows=self.rows + other.rows, portfolios=portfolios)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(row) for row in self.rows], columns=list(self.COLUMNS))

    def to_csv(self, path: Optional[str] = None, precision: int = 6) -> str:
        text = self.to_frame().to_csv(index=False, float_format=f'%.{precision}g', lineterminator='\n')
        if path:
            with open(path, 'w', encoding='utf-8', newline='') as fh:
                fh.write(text)
        return text

    def to_json(self, precision: int = 6) -> str:
        def _round(value):
            return None if value is None else float(f"{value:.{precision}g}")

        payload = [
            {**asdict(row), 'rf': _round(row.rf), 'percent_change': _round(row.percent_change)}
            for row in self.rows
        ]
        return json.dumps(payload, indent=2, ensure_ascii=False)


# === EVALUACIÓN DE PESOS FIJOS ===

def _check_inputs(weights: Sequence[float], returns: ReturnMatrix) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (returns.n_assets,):
        raise InvalidWeights(f"Se esperaban {returns.n_assets} pesos, recibido {w.shape}")
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOLERANCE * max(1.0, np.abs(w).sum()):
        raise InvalidWeights(f"Los pesos suman {w.sum():.12g}, no 1")
    return w


def equity_curve(weights: Sequence[float], returns: ReturnMatrix,
                 mode: BacktestMode = BacktestMode.BUY_AND_HOLD) -> EquityCurve:
    """Valor de la cartera período a período"""
    w = _check_inputs(weights, returns)
    growth = 1.0 + returns.as_decimal().values
    mode = BacktestMode(mode)

    if mode == BacktestMode.REBALANCED:
        # pesos restablecidos al inicio de cada período
        values = np.cumprod(growth @ w)
    else:
        values = np.cumprod(growth, axis=0) @ w
    return EquityCurve(labels=returns.period_labels, values=values)


def portfolio_value_change(weights: Sequence[float], returns: ReturnMatrix, horizon: int,
                           mode: BacktestMode = BacktestMode.BUY_AND_HOLD) -> float:
    """Cambio porcentual del valor tras `horizon` períodos"""
    if horizon < 1 or horizon > returns.n_periods:
        raise HorizonTooLong(f"Horizonte {horizon} fuera de [1, {returns.n_periods}]")
    curve = equity_curve(weights, returns.select_rows(slice(0, horizon)), mode)
    return 100.0 * (curve.final_value - 1.0)


# === COMPARACIÓN DE ESTRATEGIAS ===

class BacktestingEngine:
    """Ajusta GMV, TP, MSR y MCESR en la muestra de estimación y los evalúa fuera de muestra"""

    def __init__(self, mode: BacktestMode = BacktestMode.BUY_AND_HOLD, grid_n: int = 1000):
        self.mode = BacktestMode(mode)
        self.grid_n = grid_n
        self.logger = logging.getLogger(__name__)

    def fit_strategies(self, in_sample: ReturnMatrix, interval: RateInterval, msr_rate: float,
                       allow_short: bool) -> Dict[str, Portfolio]:
        """Carteras de las cuatro estrategias usando solo datos de estimación"""
        model = estimate_moments(in_sample)

        if allow_short:
            fitted = {
                'GMV': gmv_portfolio(model),
                'TP': tangent_portfolio(model),
                'MSR': msr_portfolio(model, msr_rate),
                'MCESR': mcesr_portfolio(model, interval),
            }
        else:
            fitted = {
                'GMV': gmv_no_short(model),
                'TP': tangent_no_short(model),
                'MSR': msr_no_short(model, msr_rate),
                'MCESR': mcesr_no_short(model, interval, self.grid_n).best_portfolio,
            }

        regime = Regime.SHORT if allow_short else Regime.NO_SHORT
        self.logger.info(f"✅ Estrategias ajustadas ({regime.value}) sobre {in_sample.n_periods} períodos")
        return fitted

    def evaluate(self, fitted: Dict[str, Portfolio], out_sample: ReturnMatrix,
                 horizons: Sequence[int], regime: Regime) -> StrategyReport:
        report = StrategyReport()
        for strategy in STRATEGIES:
            portfolio = fitted[strategy]
            report.portfolios[(regime.value, strategy)] = portfolio
            for horizon in horizons:
                change = portfolio_value_change(portfolio.weights, out_sample, horizon, self.mode)
                report.rows.append(StrategyRow(strategy=strategy, label=regime.value,
                                               rf=portfolio.rf_used, horizon=int(horizon),
                                               mode=self.mode.value, percent_change=change))
        return report


def compare_strategies(in_sample: ReturnMatrix, out_sample: ReturnMatrix, interval: RateInterval,
                       msr_rate: float, allow_short: bool, horizons: Optional[Sequence[int]] = None,
                       mode: BacktestMode = BacktestMode.BUY_AND_HOLD,
                       grid_n: int = 1000) -> StrategyReport:
    """Tabla de cambio de valor fuera de muestra para GMV, TP, MSR y MCESR"""
    if in_sample.asset_names != out_sample.asset_names:
        raise InvalidReturnMatrix("Las muestras de estimación y prueba no comparten activos")

    horizons = list(horizons) if horizons else [out_sample.n_periods]
    for horizon in horizons:
        if horizon > out_sample.n_periods:
            raise HorizonTooLong(f"Horizonte {horizon} supera los {out_sample.n_periods} períodos de prueba")

    engine = BacktestingEngine(mode, grid_n)
    fitted = engine.fit_strategies(in_sample, interval, msr_rate, allow_short)
    regime = Regime.SHORT if allow_short else Regime.NO_SHORT
    return engine.evaluate(fitted, out_sample, horizons, regime)
