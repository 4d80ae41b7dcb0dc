"""
Eficiencia Cruzada de Carteras Tangentes
Puntuación DEA entre tasas libres de riesgo, integrales I1/I2 y tasa MCESR en forma cerrada
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from scipy.integrate import simpson

from ..utils.errors import InvalidInterval, NonPositiveGmvReturn, RatioTooSmall, RateTooHigh
from .frontier import (
    Portfolio, PortfolioLabel, check_rate, cml_slope, msr_moments, msr_portfolio,
    rate_margin, slopes,
)
from .market_model import MarketModel

logger = logging.getLogger(__name__)

DEGENERATE_WIDTH = 1e-14
QUADRATURE_NODES = 201
RATIO_TOLERANCE = 1e-12


class CrossEffMethod(Enum):
    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"
    GRID = "grid"


class FullIntervalForm(Enum):
    TP_GMV_RATIO = "tp_gmv_ratio"
    SLOPES = "slopes"
    ENDPOINTS = "endpoints"


@dataclass(frozen=True)
class RateInterval:
    """Intervalo cerrado [r1, r2] de tasas libres de riesgo candidatas"""
    r1: float
    r2: float

    def __post_init__(self):
        if not (np.isfinite(self.r1) and np.isfinite(self.r2)):
            raise InvalidInterval(f"Extremos no finitos: [{self.r1}, {self.r2}]")
        if self.r1 < 0 or self.r1 > self.r2:
            raise InvalidInterval(f"Se requiere 0 ≤ r1 ≤ r2, recibido [{self.r1}, {self.r2}]")

    @property
    def width(self) -> float:
        return self.r2 - self.r1

    @property
    def is_degenerate(self) -> bool:
        return self.width < DEGENERATE_WIDTH

    def check_for(self, model: MarketModel):
        """r2 no puede superar r_GMV del modelo (más el margen ε)"""
        if self.r2 > model.r_gmv + rate_margin(model):
            raise RateTooHigh(
                f"r2={self.r2:.6g} supera r_GMV={model.r_gmv:.6g}: el intervalo sale de la rama eficiente"
            )


@dataclass(frozen=True)
class DeaWeights:
    """Pesos del hiperplano tangente: salida u, entrada v y término libre u0"""
    u: float
    v: float
    u0: float

    def efficiency(self, risk, expected_return):
        """u(r − u0) / (v σ)"""
        risk = np.asarray(risk, dtype=float)
        return self.u * (np.asarray(expected_return, dtype=float) - self.u0) / (self.v * risk)


@dataclass(frozen=True, eq=False)
class CrossEffReport:
    """Puntuaciones CE por tasa y la tasa/cartera que las maximiza"""
    rates: np.ndarray
    scores: np.ndarray
    best_rate: float
    best_portfolio: Portfolio
    method: str
    degenerate: bool = False

    @property
    def best_score(self) -> float:
        return float(np.max(self.scores))


# === FUNCIONES AUXILIARES ===

def _excess_slope(model: MarketModel, r):
    """S(r) = √(a − 2c·r + b·r²) = (r_MSR − r)/σ_MSR"""
    return cml_slope(model, r)


def _gmv_gap(model: MarketModel, r):
    """G(r) = (r_GMV − r)/σ_GMV"""
    return (model.r_gmv - np.asarray(r, dtype=float)) * np.sqrt(model.b)


def _slope_gap(model: MarketModel, r):
    """S(r) − G(r) > 0, sin cancelación cuando G > 0"""
    s = _excess_slope(model, r)
    g = _gmv_gap(model, r)
    m_ah_sq = model.discriminant / model.b
    with np.errstate(divide='ignore', invalid='ignore'):
        stable = m_ah_sq / (s + g)
    return np.where(g > 0, stable, s - g)


def _require_admissible(model: MarketModel, rates):
    rates = np.atleast_1d(np.asarray(rates, dtype=float))
    if np.any(rates >= model.r_gmv - rate_margin(model)):
        raise RateTooHigh(f"Hay tasas ≥ r_GMV={model.r_gmv:.6g} en la evaluación")


def _pair_scores(model: MarketModel, rf_i, rf_j):
    """Ef_i(rf_j) en forma cerrada, con S evaluada directamente en rf_j"""
    rf_i = np.asarray(rf_i, dtype=float)
    rf_j = np.asarray(rf_j, dtype=float)
    numerator = (model.a - model.c * rf_i) - (model.c - model.b * rf_i) * rf_j
    return numerator / (_excess_slope(model, rf_i) * _excess_slope(model, rf_j))


# === PESOS DEA Y EFICIENCIA CRUZADA ===

def dea_weights(model: MarketModel, rf: float) -> DeaWeights:
    """Solución cerrada del modelo DEA para la cartera MSR(rf)"""
    check_rate(model, rf)
    r_msr, sigma_msr = msr_moments(model, rf)
    return DeaWeights(u=float(1.0 / (r_msr - rf)), v=float(1.0 / sigma_msr), u0=float(rf))


def dea_cross_efficiency(model: MarketModel, rf_i: float, rf_j: float) -> float:
    """Eficiencia de MSR(rf_i) evaluada con los pesos DEA de MSR(rf_j)"""
    weights_j = dea_weights(model, rf_j)
    check_rate(model, rf_i)
    r_i, sigma_i = msr_moments(model, rf_i)
    return float(weights_j.efficiency(sigma_i, r_i))


def cross_efficiency_pair(model: MarketModel, rf_i: float, rf_j: float) -> float:
    """Cociente de Sharpe [(r_i − rf_j)/σ_i] / [(r_j − rf_j)/σ_j]"""
    check_rate(model, rf_i)
    check_rate(model, rf_j)
    r_i, sigma_i = msr_moments(model, rf_i)
    r_j, sigma_j = msr_moments(model, rf_j)
    return float(((r_i - rf_j) / sigma_i) / ((r_j - rf_j) / sigma_j))


# === INTEGRALES Y CE MEDIA ===

def _interval_terms(model: MarketModel, interval: RateInterval) -> Tuple[float, float]:
    """(ln(D2/D1), −ΔS/(r2 − r1)) sin restar cantidades casi iguales

    S2² − S1² = −(r2 − r1)·√b·(G1 + G2)  y  D2 − D1 = (r2 − r1)·√b·(D1 + D2)/(S1 + S2)
    """
    s1, s2 = _excess_slope(model, [interval.r1, interval.r2])
    g1, g2 = _gmv_gap(model, [interval.r1, interval.r2])
    d1, d2 = _slope_gap(model, [interval.r1, interval.r2])
    sqrt_b = np.sqrt(model.b)
    delta_d = interval.width * sqrt_b * (d1 + d2) / (s1 + s2)
    log_ratio = float(np.log1p(delta_d / d1))
    slope_drop = float(sqrt_b * (g1 + g2) / (s1 + s2))
    return log_ratio, slope_drop


def integrals_I1_I2(model: MarketModel, interval: RateInterval) -> Tuple[float, float]:
    """Medias en el intervalo de 1/S(rf) y rf/S(rf) por antiderivadas logarítmicas"""
    if interval.is_degenerate:
        logger.warning(f"⚠️ Intervalo degenerado [{interval.r1}, {interval.r2}]: se usa el punto r1")
        s1 = float(_excess_slope(model, interval.r1))
        return 1.0 / s1, interval.r1 / s1

    log_ratio, slope_drop = _interval_terms(model, interval)
    I1 = log_ratio / (np.sqrt(model.b) * interval.width)
    I2 = model.r_gmv * I1 - slope_drop / model.b
    return float(I1), float(I2)


def quadrature_integrals(model: MarketModel, interval: RateInterval,
                         nodes: int = QUADRATURE_NODES) -> Tuple[float, float]:
    """Mismas medias por Simpson compuesto (verificación de las formas cerradas)"""
    if interval.is_degenerate:
        return integrals_I1_I2(model, interval)
    grid = np.linspace(interval.r1, interval.r2, nodes)
    inv_s = 1.0 / _excess_slope(model, grid)
    I1 = simpson(inv_s, x=grid) / interval.width
    I2 = simpson(grid * inv_s, x=grid) / interval.width
    return float(I1), float(I2)


def average_cross_efficiency(model: MarketModel, rf_i: float, interval: RateInterval,
                             method: CrossEffMethod = CrossEffMethod.ANALYTIC) -> float:
    """CE_i: media de Ef_i(rf) con rf recorriendo el intervalo"""
    interval.check_for(model)
    check_rate(model, rf_i)
    if interval.is_degenerate:
        logger.warning(f"⚠️ Intervalo degenerado: CE es la eficiencia en el punto {interval.r1}")
        return float(_pair_scores(model, rf_i, interval.r1))

    if method == CrossEffMethod.QUADRATURE:
        grid = np.linspace(interval.r1, interval.r2, QUADRATURE_NODES)
        return float(simpson(_pair_scores(model, rf_i, grid), x=grid) / interval.width)

    I1, I2 = integrals_I1_I2(model, interval)
    return float(_ce_from_integrals(model, rf_i, I1, I2))


def _ce_from_integrals(model: MarketModel, r, I1: float, I2: float):
    r = np.asarray(r, dtype=float)
    numerator = (model.a - model.c * r) * I1 - (model.c - model.b * r) * I2
    return numerator / _excess_slope(model, r)


def cross_efficiency_curve(model: MarketModel, interval: RateInterval, rates) -> np.ndarray:
    """CE media evaluada en muchas tasas candidatas a la vez"""
    interval.check_for(model)
    rates = np.asarray(rates, dtype=float)
    _require_admissible(model, rates)
    if interval.is_degenerate:
        return np.asarray(_pair_scores(model, rates, interval.r1), dtype=float)
    I1, I2 = integrals_I1_I2(model, interval)
    return np.asarray(_ce_from_integrals(model, rates, I1, I2), dtype=float)


# === TASA MCESR ===

def mcesr_rate(model: MarketModel, interval: RateInterval) -> float:
    """Tasa que maximiza la eficiencia cruzada media: r* = I2/I1"""
    interval.check_for(model)
    if interval.is_degenerate:
        logger.warning(f"⚠️ Intervalo degenerado: r* = {interval.r1}")
        return float(interval.r1)

    log_ratio, slope_drop = _interval_terms(model, interval)
    rate = model.r_gmv - model.sigma_gmv * interval.width * slope_drop / log_ratio
    # el redondeo no puede sacar r* del intervalo
    return float(np.clip(rate, interval.r1, interval.r2))


def mcesr_rate_full_interval(model: MarketModel,
                             form: FullIntervalForm = FullIntervalForm.TP_GMV_RATIO) -> float:
    """r* sobre [0, r_GMV], en una de sus tres formas algebraicas equivalentes"""
    if model.c <= 0:
        raise NonPositiveGmvReturn(f"c={model.c:.6g} ≤ 0: el intervalo [0, r_GMV] está vacío")
    form = FullIntervalForm(form)
    rho = model.a * model.b / model.c ** 2
    if rho <= 1.0 + RATIO_TOLERANCE:
        raise RatioTooSmall(f"r_TP/r_GMV = {rho:.15g} no supera 1")
    m = slopes(model)

    if form == FullIntervalForm.ENDPOINTS:
        return float(model.r_gmv + model.sigma_gmv * (m.m_ah - m.m_tp) / np.log(m.m_ah / (m.m_tp - m.m_gmv)))

    if form == FullIntervalForm.SLOPES:
        numerator = m.m_ah / m.m_gmv - m.m_tp / m.m_gmv
        denominator = np.log(m.m_tp / m.m_ah - m.m_gmv / m.m_ah)
        return float(model.r_gmv * (1.0 - numerator / denominator))

    root, root_minus = np.sqrt(rho), np.sqrt(rho - 1.0)
    factor = (root - root_minus) / (np.log(root_minus) - np.log(root - 1.0))
    return float(model.r_gmv * (1.0 - factor))


def mcesr_portfolio(model: MarketModel, interval: RateInterval) -> Portfolio:
    rate = mcesr_rate(model, interval)
    portfolio = msr_portfolio(model, rate).relabel(PortfolioLabel.MCESR.value)
    logger.info(f"🎯 MCESR: rf*={rate:.6g}, r={portfolio.expected_return:.6g}, σ={portfolio.risk:.6g}")
    return portfolio


# === DERIVADAS ===

def ce_derivative(model: MarketModel, r: float, interval: RateInterval) -> float:
    """CE′(r) = (ab − c²)(I2 − r·I1) / S(r)³"""
    interval.check_for(model)
    check_rate(model, r)
    I1, I2 = integrals_I1_I2(model, interval)
    return float(model.discriminant * (I2 - r * I1) / _excess_slope(model, r) ** 3)


def ce_second_derivative(model: MarketModel, r: float, interval: RateInterval) -> float:
    """CE″(r); vale −(ab − c²)·I1/S³ en el punto estacionario"""
    interval.check_for(model)
    check_rate(model, r)
    I1, I2 = integrals_I1_I2(model, interval)
    s = float(_excess_slope(model, r))
    bracket = -I1 / s ** 3 - 3.0 * (I2 - r * I1) * (model.b * r - model.c) / s ** 5
    return float(model.discriminant * bracket)


# === INFORME ===

def cross_efficiency_report(model: MarketModel, interval: RateInterval, n_rates: int = 101,
                            method: CrossEffMethod = CrossEffMethod.ANALYTIC) -> CrossEffReport:
    """Puntuaciones CE en una malla del intervalo y la tasa ganadora según el método"""
    method = CrossEffMethod(method)
    interval.check_for(model)

    if interval.is_degenerate:
        best = msr_portfolio(model, interval.r1).relabel(PortfolioLabel.MCESR.value)
        logger.warning("⚠️ Intervalo degenerado: el informe contiene un único punto")
        return CrossEffReport(rates=np.array([interval.r1]), scores=np.array([1.0]),
                              best_rate=float(interval.r1), best_portfolio=best,
                              method=method.value, degenerate=True)

    grid = np.linspace(interval.r1, interval.r2, max(n_rates, 2))
    grid = grid[grid < model.r_gmv - rate_margin(model)]

    if method == CrossEffMethod.ANALYTIC:
        rates = np.unique(np.append(grid, mcesr_rate(model, interval)))
        scores = cross_efficiency_curve(model, interval, rates)
        best_rate = mcesr_rate(model, interval)
    elif method == CrossEffMethod.QUADRATURE:
        rates = grid
        scores = np.array([average_cross_efficiency(model, r, interval, CrossEffMethod.QUADRATURE)
                           for r in rates])
        best_rate = float(rates[int(np.argmax(scores))])
    else:
        rates = grid
        scores = cross_efficiency_curve(model, interval, rates)
        best_rate = float(rates[int(np.argmax(scores))])

    best = msr_portfolio(model, best_rate).relabel(PortfolioLabel.MCESR.value)
    return CrossEffReport(rates=rates, scores=np.asarray(scores, dtype=float), best_rate=float(best_rate),
                          best_portfolio=best, method=method.value)
