"""
Modelo de Mercado Media-Varianza
Estima (μ, Σ), factoriza la covarianza y calcula los escalares a, b, c de la frontera
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ..utils.errors import DegenerateMarket, InvalidReturnMatrix, NotPositiveDefinite

logger = logging.getLogger(__name__)

# Tolerancias numéricas del modelo
PIVOT_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-12
INVERSE_RESIDUAL_TOLERANCE = 1e-8
DISCRIMINANT_TOLERANCE = 1e-14


@dataclass(frozen=True, eq=False)
class ReturnMatrix:
    """Panel T×n de rentabilidades simples por período"""
    values: np.ndarray
    asset_names: Tuple[str, ...]
    period_labels: Tuple[str, ...]
    in_percent: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2:
            raise InvalidReturnMatrix(f"Se esperaba una matriz T×n, recibido ndim={values.ndim}")
        T, n = values.shape
        if T < 1 or n < 1:
            raise InvalidReturnMatrix(f"Panel vacío: {T} períodos × {n} activos")
        if not np.all(np.isfinite(values)):
            raise InvalidReturnMatrix("El panel contiene valores no finitos")

        names = tuple(str(name) for name in self.asset_names)
        labels = tuple(str(label) for label in self.period_labels)
        if len(names) != n:
            raise InvalidReturnMatrix(f"{len(names)} nombres de activos para {n} columnas")
        if len(labels) != T:
            raise InvalidReturnMatrix(f"{len(labels)} etiquetas de período para {T} filas")
        if any(not name.strip() for name in names):
            raise InvalidReturnMatrix("Hay nombres de activos vacíos")
        if len(set(names)) != n:
            raise InvalidReturnMatrix(f"Nombres de activos duplicados: {list(names)}")

        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'asset_names', names)
        object.__setattr__(self, 'period_labels', labels)

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]

    def require_estimable(self):
        """T ≥ 2 y n ≥ 2 para estimar momentos"""
        if self.n_periods < 2 or self.n_assets < 2:
            raise InvalidReturnMatrix(
                f"Se requieren T ≥ 2 y n ≥ 2 (recibido {self.n_periods}×{self.n_assets})"
            )

    def as_decimal(self) -> 'ReturnMatrix':
        """Panel en unidades decimales (divide por 100 si está en porcentaje)"""
        if not self.in_percent:
            return self
        return ReturnMatrix(self.values / 100.0, self.asset_names, self.period_labels, in_percent=False)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=list(self.asset_names),
                             index=pd.Index(self.period_labels, name='date'))
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, in_percent: bool = False) -> 'ReturnMatrix':
        return cls(frame.to_numpy(dtype=float), tuple(frame.columns),
                   tuple(str(label) for label in frame.index), in_percent=in_percent)

    def select_rows(self, mask) -> 'ReturnMatrix':
        """Sub-panel con las filas indicadas (máscara booleana, índices o slice)"""
        rows = np.arange(self.n_periods)[mask]
        if rows.size == 0:
            raise InvalidReturnMatrix("La selección de filas está vacía")
        return ReturnMatrix(self.values[rows], self.asset_names,
                            tuple(self.period_labels[i] for i in rows), in_percent=self.in_percent)

    def cumulative_returns(self) -> np.ndarray:
        """Rentabilidad acumulada por activo, en las unidades del panel"""
        scale = 100.0 if self.in_percent else 1.0
        growth = np.cumprod(1.0 + self.values / scale, axis=0)
        return (growth - 1.0) * scale


@dataclass(frozen=True, eq=False)
class MarketModel:
    """Descripción (μ, Σ) del mercado y escalares de la frontera"""
    mu: np.ndarray
    sigma: np.ndarray
    sigma_inv: np.ndarray
    a: float
    b: float
    c: float
    asset_names: Optional[Tuple[str, ...]] = None
    factor: Optional[Tuple[np.ndarray, bool]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.factor is None:
            object.__setattr__(self, 'factor', _factorize(self.sigma))

    @property
    def n_assets(self) -> int:
        return self.mu.shape[0]

    @property
    def discriminant(self) -> float:
        """ab − c²"""
        return self.a * self.b - self.c ** 2

    @property
    def r_gmv(self) -> float:
        return self.c / self.b

    @property
    def sigma_gmv(self) -> float:
        return 1.0 / np.sqrt(self.b)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Σ⁻¹ · rhs mediante la factorización de Cholesky"""
        return cho_solve(self.factor, np.asarray(rhs, dtype=float))

    def names(self) -> List[str]:
        if self.asset_names is not None:
            return list(self.asset_names)
        return [f"A{i + 1}" for i in range(self.n_assets)]


@dataclass(frozen=True)
class AssetStats:
    """Estadísticos descriptivos de un activo"""
    name: str
    mean: float
    risk: float
    minimum: float
    maximum: float


def _check_symmetric(sigma: np.ndarray):
    scale = max(np.max(np.abs(sigma)), np.finfo(float).tiny)
    asymmetry = np.max(np.abs(sigma - sigma.T))
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise NotPositiveDefinite(f"La covarianza no es simétrica (asimetría {asymmetry:.3e})")


def _factorize(sigma: np.ndarray) -> Tuple[np.ndarray, bool]:
    """Cholesky con control de pivotes relativo a la mayor entrada diagonal"""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise NotPositiveDefinite(f"Se esperaba una matriz cuadrada, recibido {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise NotPositiveDefinite("La covarianza contiene valores no finitos")
    _check_symmetric(sigma)

    max_diag = np.max(np.diag(sigma))
    if max_diag <= 0:
        raise NotPositiveDefinite("La diagonal de la covarianza no es positiva")
    try:
        factor = cho_factor(sigma, lower=True, check_finite=False)
    except LinAlgError as e:
        raise NotPositiveDefinite(f"La factorización de Cholesky falló: {e}")

    pivots = np.diag(factor[0]) ** 2
    if np.min(pivots) <= PIVOT_TOLERANCE * max_diag:
        raise NotPositiveDefinite(
            f"Pivote {np.min(pivots):.3e} por debajo de {PIVOT_TOLERANCE:g} × {max_diag:.3e}"
        )
    return factor


def _inverse_from_factor(sigma: np.ndarray, factor) -> np.ndarray:
    n = sigma.shape[0]
    inverse = cho_solve(factor, np.eye(n))
    inverse = 0.5 * (inverse + inverse.T)
    residual = np.max(np.abs(sigma @ inverse - np.eye(n)))
    if residual > INVERSE_RESIDUAL_TOLERANCE:
        raise NotPositiveDefinite(f"Residuo de la inversa {residual:.3e} demasiado grande")
    return inverse


def invert_covariance(sigma: np.ndarray) -> np.ndarray:
    """Inversa de Σ vía factorización simétrica definida positiva"""
    sigma = np.asarray(sigma, dtype=float)
    return _inverse_from_factor(sigma, _factorize(sigma))


def market_model_from_moments(mu: Sequence[float], sigma: np.ndarray,
                              asset_names: Optional[Sequence[str]] = None) -> MarketModel:
    """Construir un MarketModel validado a partir de momentos dados"""
    mu = np.array(mu, dtype=float)
    sigma = np.array(sigma, dtype=float)
    if mu.ndim != 1 or sigma.shape != (mu.size, mu.size):
        raise InvalidReturnMatrix(f"Dimensiones incompatibles: μ {mu.shape}, Σ {sigma.shape}")
    if mu.size < 2:
        raise InvalidReturnMatrix("Se requieren al menos dos activos")

    factor = _factorize(sigma)
    sigma_inv = _inverse_from_factor(sigma, factor)

    ones = np.ones(mu.size)
    inv_mu = cho_solve(factor, mu)
    inv_ones = cho_solve(factor, ones)
    a = float(mu @ inv_mu)
    b = float(ones @ inv_ones)
    c = float(ones @ inv_mu)

    if b <= 0 or a <= 0:
        raise DegenerateMarket(f"Escalares no positivos: a={a:.6g}, b={b:.6g}")
    if a * b - c ** 2 <= DISCRIMINANT_TOLERANCE * a * b:
        raise DegenerateMarket(
            f"ab − c² = {a * b - c ** 2:.3e} no es positivo (todas las medias casi iguales)"
        )

    mu.setflags(write=False)
    sigma.setflags(write=False)
    sigma_inv.setflags(write=False)
    names = tuple(asset_names) if asset_names is not None else None
    return MarketModel(mu=mu, sigma=sigma, sigma_inv=sigma_inv, a=a, b=b, c=c,
                       asset_names=names, factor=factor)


def estimate_moments(returns: ReturnMatrix) -> MarketModel:
    """Media por columnas y covarianza muestral insesgada (divisor T−1)"""
    returns.require_estimable()
    T, n = returns.values.shape
    if T < n + 1:
        logger.warning(f"⚠️ Pocas observaciones para estimar Σ: T={T} < n+1={n + 1}")

    mu = returns.values.mean(axis=0)
    sigma = np.cov(returns.values, rowvar=False, ddof=1)
    sigma = 0.5 * (sigma + sigma.T)

    model = market_model_from_moments(mu, sigma, returns.asset_names)
    logger.info(f"📊 Modelo estimado: {n} activos, {T} períodos, r_GMV={model.r_gmv:.6g}")
    return model


def descriptive_stats(returns: ReturnMatrix) -> List[AssetStats]:
    """Media, desviación típica (T−1), mínimo y máximo por activo"""
    returns.require_estimable()
    summary = returns.to_frame().agg(['mean', 'std', 'min', 'max'])

    stats = []
    for name in returns.asset_names:
        column = summary[name]
        minimum, maximum = float(column['min']), float(column['max'])
        # el redondeo de la media no puede salir del rango observado
        mean = min(max(float(column['mean']), minimum), maximum)
        stats.append(AssetStats(name=name, mean=mean, risk=max(float(column['std']), 0.0),
                                minimum=minimum, maximum=maximum))
    return stats
