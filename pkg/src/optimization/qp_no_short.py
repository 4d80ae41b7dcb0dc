"""
Selección sin Ventas en Corto
QP convexo min xᵀΣx s.a. xᵀd = 1, x ≥ 0 por conjunto activo primal y procedimiento de malla MCESR
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ..analysis.cross_efficiency import RateInterval
from ..analysis.frontier import Portfolio, PortfolioLabel, portfolio_from_weights
from ..analysis.market_model import MarketModel
from ..utils.errors import ConfigError, Infeasible, InvalidPairing, MaxIterations, ZeroRisk

logger = logging.getLogger(__name__)

STEP_TOLERANCE = 1e-14
MULTIPLIER_TOLERANCE = 1e-12
PAIRING_TOLERANCE = 1e-8
PAIRING_CHUNK = 256


@dataclass(frozen=True, eq=False)
class QpSolution:
    """Óptimo del QP en la variable elevada x"""
    x: np.ndarray
    active_set: Tuple[int, ...]
    iterations: int
    objective: float
    multiplier: float
    objective_history: Tuple[float, ...] = ()

    def gradient_residual(self, sigma: np.ndarray, d: np.ndarray) -> np.ndarray:
        """2Σx − λd: nulo en los índices libres, ≥ 0 en los activos"""
        return 2.0 * np.asarray(sigma) @ self.x - self.multiplier * np.asarray(d)


@dataclass(frozen=True, eq=False)
class GridResult:
    """Carteras MSR sin cortos sobre la malla de tasas y su CE discreta"""
    rates: np.ndarray
    portfolios: List[Portfolio]
    ce_scores: np.ndarray
    best_index: int

    @property
    def best_rate(self) -> float:
        return float(self.rates[self.best_index])

    @property
    def best_portfolio(self) -> Portfolio:
        return self.portfolios[self.best_index].relabel(PortfolioLabel.MCESR.value)


# === SOLVER DE CONJUNTO ACTIVO ===

def _equality_step(sigma: np.ndarray, d: np.ndarray, free: np.ndarray) -> np.ndarray:
    """Mínimo de xᵀΣx con dᵀx = 1 restringido a los índices libres"""
    sub_sigma = sigma[np.ix_(free, free)]
    direction = cho_solve(cho_factor(sub_sigma, lower=True), d[free])
    return direction / float(d[free] @ direction)


def qp_solve(sigma: np.ndarray, d: Sequence[float]) -> QpSolution:
    """Resolver min xᵀΣx s.a. xᵀd = 1, x ≥ 0"""
    sigma = np.asarray(sigma, dtype=float)
    d = np.asarray(d, dtype=float)
    n = d.size
    if np.all(d <= 0):
        raise Infeasible("Ningún d_i es positivo: xᵀd = 1 con x ≥ 0 no tiene solución con Sharpe positivo")

    k = int(np.argmax(d))
    x = np.zeros(n)
    x[k] = 1.0 / d[k]
    working = np.ones(n, dtype=bool)
    working[k] = False

    history = [float(x @ sigma @ x)]
    max_iterations = 10 * n * n
    iterations = 0

    while True:
        iterations += 1
        if iterations > max_iterations:
            raise MaxIterations(f"El conjunto activo no convergió en {max_iterations} iteraciones")

        free = np.flatnonzero(~working)
        target = _equality_step(sigma, d, free)
        step = target - x[free]
        scale = max(1.0, np.max(np.abs(x)))

        if np.max(np.abs(step)) <= STEP_TOLERANCE * scale:
            objective = float(x @ sigma @ x)
            multiplier = 2.0 * objective
            gradient = 2.0 * sigma @ x - multiplier * d
            threshold = MULTIPLIER_TOLERANCE * max(1.0, np.max(np.abs(2.0 * sigma @ x)))
            candidates = np.flatnonzero(working & (gradient < -threshold))
            if candidates.size == 0:
                active = tuple(int(i) for i in np.flatnonzero(working))
                return QpSolution(x=x, active_set=active, iterations=iterations,
                                  objective=objective, multiplier=multiplier,
                                  objective_history=tuple(history))
            # regla de Bland: liberar el menor índice con multiplicador negativo
            working[candidates[0]] = False
            continue

        alpha = 1.0
        blocking = -1
        for position, index in enumerate(free):
            if step[position] < 0:
                ratio = -x[index] / step[position]
                if ratio < alpha:
                    alpha, blocking = ratio, index

        x[free] = x[free] + alpha * step
        if blocking >= 0:
            x[blocking] = 0.0
            working[blocking] = True
        x[working] = 0.0
        history.append(float(x @ sigma @ x))


# === CARTERAS SIN CORTOS ===

def _lift_to_weights(model: MarketModel, solution: QpSolution, label: str, rf_used) -> Portfolio:
    return portfolio_from_weights(model, solution.x / solution.x.sum(), label, rf_used)


def msr_no_short(model: MarketModel, rf: float) -> Portfolio:
    """Máximo Sharpe con pesos no negativos: w = x/(xᵀ1), x del QP con d = μ − rf"""
    excess = model.mu - rf
    if np.all(excess <= 0):
        raise Infeasible(f"Todas las medias son ≤ rf={rf:.6g}")
    solution = qp_solve(model.sigma, excess)
    return _lift_to_weights(model, solution, PortfolioLabel.MSR.value, float(rf))


def gmv_no_short(model: MarketModel) -> Portfolio:
    """Mínima varianza global con pesos no negativos"""
    solution = qp_solve(model.sigma, np.ones(model.n_assets))
    return _lift_to_weights(model, solution, PortfolioLabel.GMV.value, None)


def tangent_no_short(model: MarketModel) -> Portfolio:
    return msr_no_short(model, 0.0).relabel(PortfolioLabel.TP.value)


def no_short_frontier(model: MarketModel, rates: Sequence[float]) -> List[Portfolio]:
    """Puntos de tangencia sin cortos para una secuencia de tasas"""
    return [msr_no_short(model, float(rf)) for rf in rates]


# === EFICIENCIA CRUZADA DISCRETA ===

def discrete_cross_efficiency(portfolios: Sequence[Portfolio], rates: Sequence[float]) -> np.ndarray:
    """CE_i = media_j [(r_i − rf_j)/σ_i] / [(r_j − rf_j)/σ_j]"""
    rates = np.asarray(rates, dtype=float)
    if len(portfolios) != rates.size or rates.size == 0:
        raise InvalidPairing(f"{len(portfolios)} carteras para {rates.size} tasas")

    returns = np.array([p.expected_return for p in portfolios])
    risks = np.array([p.risk for p in portfolios])
    if np.any(risks <= 1e-14):
        raise ZeroRisk("Hay carteras con riesgo nulo en la malla")

    own_sharpe = (returns - rates) / risks
    if np.any(own_sharpe <= 0):
        raise InvalidPairing("Hay carteras con Sharpe no positivo en su propia tasa")

    # cada cartera j debe maximizar el Sharpe de su tasa rf_j dentro del conjunto
    for start in range(0, rates.size, PAIRING_CHUNK):
        block = slice(start, start + PAIRING_CHUNK)
        peer_sharpe = (returns[:, None] - rates[None, block]) / risks[:, None]
        best_peer = peer_sharpe.max(axis=0)
        slack = PAIRING_TOLERANCE * np.maximum(1.0, np.abs(own_sharpe[block]))
        violated = np.flatnonzero(best_peer > own_sharpe[block] + slack)
        if violated.size:
            j = start + int(violated[0])
            raise InvalidPairing(f"La cartera {j} no maximiza el Sharpe en rf={rates[j]:.6g}")

    inv_own = 1.0 / own_sharpe
    mean_inv = inv_own.mean()
    mean_rate_inv = (rates * inv_own).mean()
    return returns / risks * mean_inv - mean_rate_inv / risks


def rate_grid(interval: RateInterval, n: int) -> np.ndarray:
    """rf_i = r_min·(n−i+1)/n + r_max·(i−1)/n para i = 1..n+1"""
    i = np.arange(1, n + 2)
    return interval.r1 * (n - i + 1) / n + interval.r2 * (i - 1) / n


def mcesr_no_short(model: MarketModel, interval: RateInterval, n: int = 1000) -> GridResult:
    """Procedimiento de malla: MSR sin cortos en cada tasa, CE discreta y máximo"""
    if n < 1:
        raise ConfigError(f"La malla necesita n ≥ 1 (recibido {n})")
    if np.all(model.mu <= interval.r2):
        raise Infeasible(f"Ninguna media supera r2={interval.r2:.6g}")

    rates = rate_grid(interval, n)
    portfolios = [msr_no_short(model, float(rf)) for rf in rates]
    scores = discrete_cross_efficiency(portfolios, rates)
    best_index = int(np.argmax(scores))

    logger.info(f"🎯 MCESR sin cortos: rf*={rates[best_index]:.6g} (n={n}, CE={scores[best_index]:.6g})")
    return GridResult(rates=rates, portfolios=portfolios, ce_scores=scores, best_index=best_index)
