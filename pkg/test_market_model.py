"""
Pruebas del Modelo de Mercado
Estimación de momentos, factorización de Σ y escalares de la frontera
"""

import numpy as np
import pytest

from src.analysis.market_model import (
    MarketModel, ReturnMatrix, descriptive_stats, estimate_moments, invert_covariance,
    market_model_from_moments,
)
from src.data.loaders import load_returns_csv
from src.utils.errors import DegenerateMarket, InvalidReturnMatrix, NotPositiveDefinite


def test_identity_fixture_moments(fixture_path):
    """Desviaciones ortogonales: Σ proporcional a la identidad"""
    model = estimate_moments(load_returns_csv(fixture_path('identity_returns.csv')))

    np.testing.assert_allclose(model.mu, [0.01, 0.02, 0.015], atol=1e-15)
    np.testing.assert_allclose(model.sigma, np.eye(3) * 4e-4 / 3, atol=1e-18)
    assert model.asset_names == ('A', 'B', 'C')
    assert model.r_gmv == pytest.approx(0.015, abs=1e-14)


def test_scalars_match_definitions(random_markets):
    for model in random_markets[:20]:
        inv = np.linalg.inv(model.sigma)
        ones = np.ones(model.n_assets)
        assert model.a == pytest.approx(model.mu @ inv @ model.mu, rel=1e-10)
        assert model.b == pytest.approx(ones @ inv @ ones, rel=1e-10)
        assert model.c == pytest.approx(ones @ inv @ model.mu, rel=1e-10)
        assert model.discriminant > 0


def test_inverse_residual(rng):
    A = rng.normal(size=(6, 6))
    sigma = A @ A.T + 0.5 * np.eye(6)
    inverse = invert_covariance(sigma)
    np.testing.assert_allclose(sigma @ inverse, np.eye(6), atol=1e-10)


def test_singular_covariance_rejected():
    with pytest.raises(NotPositiveDefinite):
        invert_covariance(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_asymmetric_covariance_rejected():
    with pytest.raises(NotPositiveDefinite):
        market_model_from_moments([0.1, 0.2], np.array([[1.0, 0.5], [0.1, 1.0]]))


def test_equal_means_are_degenerate():
    with pytest.raises(DegenerateMarket):
        market_model_from_moments([0.1, 0.1], np.eye(2))


def test_direct_construction_factorizes(rng):
    """Un MarketModel creado campo a campo resuelve Σx = y igual que el validado"""
    reference = market_model_from_moments([0.2, 0.1, 0.15], np.diag([1.0, 2.0, 4.0]))
    model = MarketModel(reference.mu, reference.sigma, reference.sigma_inv,
                        reference.a, reference.b, reference.c)
    rhs = rng.normal(size=3)
    np.testing.assert_allclose(model.solve(rhs), rhs / np.array([1.0, 2.0, 4.0]), rtol=1e-14)
    np.testing.assert_allclose(model.solve(rhs), reference.solve(rhs), rtol=1e-14)


def test_permutation_equivariance(rng, panel):
    """Reordenar activos reordena μ y Σ y deja a, b y c intactos"""
    order = rng.permutation(panel.n_assets)
    permuted = ReturnMatrix(panel.values[:, order], tuple(panel.asset_names[j] for j in order),
                            panel.period_labels)
    model, shuffled = estimate_moments(panel), estimate_moments(permuted)

    np.testing.assert_allclose(shuffled.mu, model.mu[order], rtol=1e-14)
    np.testing.assert_allclose(shuffled.sigma, model.sigma[np.ix_(order, order)], rtol=1e-12)
    assert shuffled.asset_names == tuple(model.asset_names[j] for j in order)
    assert (shuffled.a, shuffled.b, shuffled.c) == pytest.approx((model.a, model.b, model.c), rel=1e-10)


@pytest.mark.parametrize('k', [0.01, 0.5, 3.0, 100.0])
def test_scaling(panel, k):
    """Rentabilidades por k: μ·k, Σ·k², a igual, b/k² y c/k"""
    model = estimate_moments(panel)
    scaled = estimate_moments(ReturnMatrix(panel.values * k, panel.asset_names, panel.period_labels))

    np.testing.assert_allclose(scaled.mu, model.mu * k, rtol=1e-12)
    np.testing.assert_allclose(scaled.sigma, model.sigma * k ** 2, rtol=1e-10)
    assert scaled.a == pytest.approx(model.a, rel=1e-9)
    assert scaled.b == pytest.approx(model.b / k ** 2, rel=1e-9)
    assert scaled.c == pytest.approx(model.c / k, rel=1e-9)
    assert scaled.r_gmv == pytest.approx(model.r_gmv * k, rel=1e-9)



def test_monte_carlo_estimates(rng):
    """T = 10⁵ muestras de una normal conocida: medias dentro de 4 errores típicos"""
    mu0 = np.array([0.01, 0.02, -0.005])
    sigma0 = np.array([[0.04, 0.01, 0.0], [0.01, 0.09, 0.02], [0.0, 0.02, 0.01]])
    T = 100_000
    values = rng.multivariate_normal(mu0, sigma0, size=T)
    panel = ReturnMatrix(values, ('X', 'Y', 'Z'), tuple(str(i) for i in range(T)))

    model = estimate_moments(panel)
    standard_errors = np.sqrt(np.diag(sigma0) / T)
    assert np.all(np.abs(model.mu - mu0) <= 4 * standard_errors)
    np.testing.assert_allclose(model.sigma, sigma0, atol=2e-3)


def test_descriptive_stats_two_point_column():
    panel = ReturnMatrix([[0.0, 0.1], [0.2, 0.3]], ('A', 'B'), ('2020-01-01', '2020-01-02'))
    stats = {s.name: s for s in descriptive_stats(panel)}

    assert stats['A'].mean == pytest.approx(0.1)
    assert stats['A'].risk == pytest.approx(np.sqrt(0.02), abs=1e-12)
    assert (stats['A'].minimum, stats['A'].maximum) == (0.0, 0.2)
    for s in stats.values():
        assert s.minimum <= s.mean <= s.maximum


class TestReturnMatrix:
    """Invariantes estructurales del panel"""

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidReturnMatrix):
            ReturnMatrix([[0.1, np.nan]], ('A', 'B'), ('2020-01-01',))

    def test_duplicate_names_rejected(self):
        with pytest.raises(InvalidReturnMatrix):
            ReturnMatrix([[0.1, 0.2]], ('A', 'A'), ('2020-01-01',))

    def test_label_count_checked(self):
        with pytest.raises(InvalidReturnMatrix):
            ReturnMatrix([[0.1, 0.2]], ('A', 'B'), ('2020-01-01', '2020-01-02'))

    def test_single_period_not_estimable(self):
        panel = ReturnMatrix([[0.1, 0.2]], ('A', 'B'), ('2020-01-01',))
        with pytest.raises(InvalidReturnMatrix):
            estimate_moments(panel)

    def test_values_are_read_only(self):
        panel = ReturnMatrix([[0.1, 0.2], [0.0, 0.1]], ('A', 'B'), ('1', '2'))
        with pytest.raises(ValueError):
            panel.values[0, 0] = 1.0

    def test_percent_panel_as_decimal(self):
        panel = ReturnMatrix([[10.0, -5.0]], ('A', 'B'), ('1',), in_percent=True)
        np.testing.assert_allclose(panel.as_decimal().values, [[0.1, -0.05]])
        assert not panel.as_decimal().in_percent

    def test_cumulative_returns(self):
        panel = ReturnMatrix([[0.1], [-0.1]], ('A',), ('1', '2'))
        np.testing.assert_allclose(panel.cumulative_returns()[:, 0], [0.1, 1.1 * 0.9 - 1.0])
