"""
Fixtures compartidas de la batería de pruebas
Mercados aleatorios con semilla, paneles sintéticos y rutas de archivos de ejemplo
"""

import os
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.analysis.market_model import ReturnMatrix, market_model_from_moments
from src.data.loaders import write_returns_csv

FIXTURES = Path(__file__).parent / 'data' / 'fixtures'


def random_market(rng: np.random.Generator, n: int):
    """Mercado válido con c > 0 y r_TP/r_GMV en [1.5, 1e4]"""
    while True:
        A = rng.normal(size=(n, n))
        sigma = A @ A.T / n + np.diag(rng.uniform(0.2, 1.0, n))
        mu = rng.uniform(0.0, 0.2, n)
        model = market_model_from_moments(mu, sigma)
        if model.c <= 0:
            continue
        ratio = model.a * model.b / model.c ** 2
        if 1.5 <= ratio <= 1e4:
            return model


def random_subinterval(rng: np.random.Generator, model):
    """[r1, r2] ⊂ [0, r_GMV] con anchura no despreciable"""
    r1, r2 = np.sort(rng.uniform(0.0, model.r_gmv, 2))
    if r2 - r1 < 0.05 * model.r_gmv:
        r1, r2 = 0.0, model.r_gmv
    return float(r1), float(r2)


def narrow_subinterval(rng: np.random.Generator, model):
    """[r1, r2] estrecho: anchura log-uniforme entre 1e-9 y 1e-3 de r_GMV"""
    width = model.r_gmv * 10.0 ** rng.uniform(-9.0, -3.0)
    r1 = rng.uniform(0.0, 0.9 * model.r_gmv)
    return float(r1), float(r1 + width)


def synthetic_panel(seed: int = 7, T: int = 260, in_sample: int = 240) -> ReturnMatrix:
    """Panel mensual con medias exactas por submuestra (estimación y prueba)"""
    rng = np.random.default_rng(seed)
    mu0 = np.array([0.008, 0.012, 0.006, 0.010])
    vols = np.array([0.04, 0.06, 0.03, 0.05])
    corr = np.full((4, 4), 0.3) + 0.7 * np.eye(4)
    sigma0 = np.outer(vols, vols) * corr

    noise = rng.normal(size=(T, 4)) @ np.linalg.cholesky(sigma0).T
    for block in (slice(0, in_sample), slice(in_sample, T)):
        noise[block] = noise[block] - noise[block].mean(axis=0) + mu0

    labels = pd.period_range('1990-01', periods=T, freq='M').strftime('%Y%m')
    return ReturnMatrix(noise, ('Alpha', 'Beta', 'Gamma', 'Delta'), tuple(labels))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope='session')
def random_markets():
    generator = np.random.default_rng(12345)
    return [random_market(generator, int(generator.integers(3, 11))) for _ in range(100)]


@pytest.fixture
def identity_model():
    """Σ = I₂, μ = (0.2, 0.1): a = 0.05, b = 2, c = 0.3"""
    return market_model_from_moments([0.2, 0.1], np.eye(2), ('A', 'B'))


@pytest.fixture
def panel():
    return synthetic_panel()


@pytest.fixture
def panel_csv(tmp_path, panel):
    path = tmp_path / 'panel.csv'
    write_returns_csv(panel, str(path))
    return str(path)


@pytest.fixture
def fixture_path():
    def _path(name: str) -> str:
        return str(FIXTURES / name)
    return _path


@pytest.fixture(autouse=True)
def clean_portfolio_env(monkeypatch):
    """Las variables PORTFOLIO_* del entorno no deben filtrarse a las pruebas"""
    for key in list(os.environ):
        if key.startswith('PORTFOLIO_'):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture
def make_market(rng):
    return lambda n: random_market(rng, n)


@pytest.fixture
def make_interval(rng):
    return lambda model: random_subinterval(rng, model)


@pytest.fixture
def make_narrow_interval(rng):
    return lambda model: narrow_subinterval(rng, model)
