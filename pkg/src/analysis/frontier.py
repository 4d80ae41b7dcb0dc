"""
Frontera Eficiente en Forma Cerrada
Carteras GMV, tangente y de máximo Sharpe, CML, asíntotas y pendientes
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import InvalidWeights, NonPositiveGmvReturn, RateTooHigh, ZeroRisk
from .market_model import MarketModel

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOLERANCE = 1e-10
RATE_MARGIN = 1e-9
MIN_RISK = 1e-14


class PortfolioLabel(Enum):
    GMV = "GMV"
    TP = "TP"
    MSR = "MSR"
    MCESR = "MCESR"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class Portfolio:
    """Cartera totalmente invertida con su rentabilidad y riesgo esperados"""
    weights: np.ndarray
    expected_return: float
    risk: float
    rf_used: Optional[float] = None
    label: str = PortfolioLabel.CUSTOM.value

    def sharpe(self, rf: float = 0.0) -> float:
        return sharpe_ratio(self, rf)

    def relabel(self, label: str) -> 'Portfolio':
        return Portfolio(self.weights, self.expected_return, self.risk, self.rf_used, label)


@dataclass(frozen=True)
class FrontierLine:
    """Recta r = intercept + slope · σ"""
    intercept: float
    slope: float

    def at(self, risk):
        return self.intercept + self.slope * np.asarray(risk, dtype=float)


@dataclass(frozen=True)
class Slopes:
    """Pendientes de la tangente, la asíntota y la recta origen-GMV"""
    m_tp: float
    m_ah: float
    m_gmv: float

    @property
    def pythagorean_residual(self) -> float:
        """m_tp² − m_ah² − m_gmv², nulo salvo redondeo"""
        return self.m_tp ** 2 - self.m_ah ** 2 - self.m_gmv ** 2


def rate_margin(model: MarketModel) -> float:
    """Margen ε por debajo de r_GMV para que exista la tangencia"""
    return RATE_MARGIN * max(1.0, abs(model.r_gmv))


def check_rate(model: MarketModel, rf: float):
    if not rf < model.r_gmv - rate_margin(model):
        raise RateTooHigh(
            f"rf={rf:.6g} debe ser menor que r_GMV={model.r_gmv:.6g} (sin tangencia en la rama eficiente)"
        )


def portfolio_from_weights(model: MarketModel, weights: Sequence[float],
                           label: str = PortfolioLabel.CUSTOM.value,
                           rf_used: Optional[float] = None) -> Portfolio:
    """Cartera a partir de pesos arbitrarios: r = wᵀμ, σ = √(wᵀΣw)"""
    w = np.array(weights, dtype=float)
    if w.shape != (model.n_assets,):
        raise InvalidWeights(f"Se esperaban {model.n_assets} pesos, recibido {w.shape}")
    if not np.all(np.isfinite(w)):
        raise InvalidWeights("Pesos no finitos")
    total = w.sum()
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE * max(1.0, np.abs(w).sum()):
        raise InvalidWeights(f"Los pesos suman {total:.12g}, no 1")

    variance = float(w @ model.sigma @ w)
    w.setflags(write=False)
    return Portfolio(weights=w, expected_return=float(w @ model.mu),
                     risk=float(np.sqrt(max(variance, 0.0))), rf_used=rf_used, label=label)


def gmv_portfolio(model: MarketModel) -> Portfolio:
    """Cartera de mínima varianza global: Σ⁻¹1 / b"""
    weights = model.solve(np.ones(model.n_assets)) / model.b
    return portfolio_from_weights(model, weights, PortfolioLabel.GMV.value)


def tangent_portfolio(model: MarketModel) -> Portfolio:
    """Cartera tangente desde el origen: Σ⁻¹μ / c"""
    if model.c <= 0:
        raise NonPositiveGmvReturn(f"c={model.c:.6g} ≤ 0: la tangente desde el origen no existe")
    weights = model.solve(model.mu) / model.c
    return portfolio_from_weights(model, weights, PortfolioLabel.TP.value, rf_used=0.0)


def msr_moments(model: MarketModel, rf):
    """Rentabilidad y riesgo de la cartera MSR(rf) en forma cerrada (vectorizado)"""
    rf = np.asarray(rf, dtype=float)
    denominator = model.c - model.b * rf
    excess_slope = cml_slope(model, rf)
    return (model.a - model.c * rf) / denominator, excess_slope / denominator


def cml_slope(model: MarketModel, rf):
    """√(a − 2c·rf + b·rf²), pendiente de la CML en rf"""
    rf = np.asarray(rf, dtype=float)
    return np.sqrt(model.a - 2.0 * model.c * rf + model.b * rf ** 2)


def msr_portfolio(model: MarketModel, rf: float) -> Portfolio:
    """Cartera de máximo Sharpe para la tasa libre de riesgo rf"""
    check_rate(model, rf)
    ones = np.ones(model.n_assets)
    weights = model.solve(model.mu - rf * ones) / (model.c - model.b * rf)
    return portfolio_from_weights(model, weights, PortfolioLabel.MSR.value, rf_used=float(rf))


def frontier_risk_at_return(model: MarketModel, rho):
    """Riesgo mínimo alcanzable con rentabilidad esperada rho"""
    rho = np.asarray(rho, dtype=float)
    variance = (model.b * rho ** 2 - 2.0 * model.c * rho + model.a) / model.discriminant
    risk = np.sqrt(np.maximum(variance, 0.0))
    return float(risk) if risk.ndim == 0 else risk


def frontier_samples(model: MarketModel, returns) -> Tuple[np.ndarray, np.ndarray]:
    """Pares (σ, r) de la hipérbola para una malla de rentabilidades"""
    r = np.asarray(returns, dtype=float).ravel()
    return np.atleast_1d(frontier_risk_at_return(model, r)), r


def asymptotes(model: MarketModel) -> Tuple[FrontierLine, FrontierLine]:
    """Asíntotas r = c/b ± √((ab − c²)/b)·σ (superior, inferior)"""
    m_ah = float(np.sqrt(model.discriminant / model.b))
    return FrontierLine(model.r_gmv, m_ah), FrontierLine(model.r_gmv, -m_ah)


def cml(model: MarketModel, rf: float) -> FrontierLine:
    """Capital Market Line a través de MSR(rf)"""
    market = msr_portfolio(model, rf)
    return FrontierLine(float(rf), (market.expected_return - rf) / market.risk)


def slopes(model: MarketModel) -> Slopes:
    if model.c <= 0:
        raise NonPositiveGmvReturn(f"c={model.c:.6g} ≤ 0: pendientes no definidas")
    return Slopes(m_tp=float(np.sqrt(model.a)),
                  m_ah=float(np.sqrt(model.discriminant / model.b)),
                  m_gmv=float(model.c / np.sqrt(model.b)))


def sharpe_ratio(p: Portfolio, rf: float) -> float:
    if p.risk <= MIN_RISK:
        raise ZeroRisk(f"Riesgo {p.risk:.3e} demasiado pequeño para el ratio de Sharpe")
    return (p.expected_return - rf) / p.risk
