"""
Pruebas de la Frontera Eficiente
GMV, tangente, MSR, CML, asíntotas y pendientes frente a oráculos independientes
"""

import numpy as np
import pytest

from src.analysis.frontier import (
    Portfolio, asymptotes, cml, frontier_risk_at_return, frontier_samples, gmv_portfolio, msr_moments,
    msr_portfolio, portfolio_from_weights, sharpe_ratio, slopes, tangent_portfolio,
)
from src.analysis.market_model import market_model_from_moments
from src.utils.errors import InvalidWeights, NonPositiveGmvReturn, RateTooHigh, ZeroRisk


def _random_fully_invested(rng, n, count=10_000):
    """Pesos aleatorios que suman 1 (se descartan sumas casi nulas)"""
    raw = rng.normal(size=(count, n))
    totals = raw.sum(axis=1)
    raw = raw[np.abs(totals) > 0.1]
    return raw / raw.sum(axis=1, keepdims=True)


class TestIdentityMarket:
    """Σ = I₂, μ = (0.2, 0.1)"""

    def test_gmv(self, identity_model):
        p = gmv_portfolio(identity_model)
        np.testing.assert_allclose(p.weights, [0.5, 0.5], atol=1e-15)
        assert p.expected_return == pytest.approx(0.15)
        assert p.risk == pytest.approx(np.sqrt(0.5))
        assert p.label == 'GMV'

    def test_tangent(self, identity_model):
        p = tangent_portfolio(identity_model)
        np.testing.assert_allclose(p.weights, [2 / 3, 1 / 3], atol=1e-15)
        assert p.rf_used == 0.0

    def test_msr(self, identity_model):
        p = msr_portfolio(identity_model, 0.05)
        np.testing.assert_allclose(p.weights, [0.75, 0.25], atol=1e-14)
        assert p.expected_return == pytest.approx(0.175)
        assert p.risk == pytest.approx(np.sqrt(0.625))
        assert p.rf_used == 0.05

    def test_msr_beats_one_dimensional_grid(self, identity_model):
        w1 = np.arange(-2.0, 3.0, 0.001)
        W = np.column_stack([w1, 1.0 - w1])
        sharpe = (W @ identity_model.mu - 0.05) / np.sqrt(np.einsum('ij,ij->i', W, W))
        assert sharpe_ratio(msr_portfolio(identity_model, 0.05), 0.05) >= sharpe.max() - 1e-12

    def test_cml_slope(self, identity_model):
        line = cml(identity_model, 0.05)
        assert line.intercept == 0.05
        assert line.slope == pytest.approx(0.125 / np.sqrt(0.625))
        assert line.at(np.sqrt(0.625)) == pytest.approx(0.175)


def test_gmv_variance_beats_grid(make_market):
    model = make_market(3)
    step = np.arange(-2.0, 2.0 + 1e-9, 0.01)
    w1, w2 = np.meshgrid(step, step)
    W = np.column_stack([w1.ravel(), w2.ravel(), 1.0 - w1.ravel() - w2.ravel()])
    variances = np.einsum('ij,jk,ik->i', W, model.sigma, W)
    assert gmv_portfolio(model).risk ** 2 <= variances.min() + 1e-14


def test_tangent_and_msr_maximize_sharpe(rng, random_markets):
    for model in random_markets[:10]:
        W = _random_fully_invested(rng, model.n_assets)
        risks = np.sqrt(np.einsum('ij,jk,ik->i', W, model.sigma, W))

        tp = tangent_portfolio(model)
        assert sharpe_ratio(tp, 0.0) >= np.max(W @ model.mu / risks) - 1e-12

        rf = 0.5 * model.r_gmv
        msr = msr_portfolio(model, rf)
        assert sharpe_ratio(msr, rf) >= np.max((W @ model.mu - rf) / risks) - 1e-12


def test_msr_at_zero_is_tangent(random_markets):
    for model in random_markets:
        np.testing.assert_allclose(msr_portfolio(model, 0.0).weights, tangent_portfolio(model).weights,
                                   atol=1e-12, rtol=0)


def test_msr_lies_on_hyperbola(rng, random_markets):
    for model in random_markets:
        for rf in rng.uniform(0.0, 0.95 * model.r_gmv, 3):
            p = msr_portfolio(model, rf)
            assert p.risk == pytest.approx(frontier_risk_at_return(model, p.expected_return), rel=1e-9)
            r_closed, sigma_closed = msr_moments(model, rf)
            assert p.expected_return == pytest.approx(float(r_closed), rel=1e-9)
            assert p.risk == pytest.approx(float(sigma_closed), rel=1e-9)


def test_frontier_risk_matches_lagrange_system(rng, random_markets):
    """Mínima varianza con rentabilidad fijada, vía el sistema de multiplicadores"""
    for model in random_markets[:20]:
        n = model.n_assets
        kkt = np.zeros((n + 2, n + 2))
        kkt[:n, :n] = 2.0 * model.sigma
        kkt[:n, n] = kkt[n, :n] = model.mu
        kkt[:n, n + 1] = kkt[n + 1, :n] = 1.0
        for rho in model.r_gmv + rng.uniform(-0.5, 0.5, 20):
            solution = np.linalg.solve(kkt, np.concatenate([np.zeros(n), [rho, 1.0]]))
            w = solution[:n]
            assert frontier_risk_at_return(model, rho) == pytest.approx(np.sqrt(w @ model.sigma @ w), rel=1e-8)


def test_frontier_risk_vectorized(identity_model):
    risks = frontier_risk_at_return(identity_model, np.array([0.15, 0.2]))
    assert risks.shape == (2,)
    assert risks[0] == pytest.approx(identity_model.sigma_gmv)


def test_frontier_samples(identity_model):
    sigma, r = frontier_samples(identity_model, [0.1, 0.15, 0.2])
    np.testing.assert_array_equal(r, [0.1, 0.15, 0.2])
    # con dos activos la hipérbola pasa por ambos activos
    np.testing.assert_allclose(sigma, [1.0, identity_model.sigma_gmv, 1.0], rtol=1e-12)

    sigma, r = frontier_samples(identity_model, 0.15)
    assert sigma.shape == r.shape == (1,)


def test_upper_asymptote_is_limit_of_cml(random_markets):
    for model in random_markets[:20]:
        upper, lower = asymptotes(model)
        rf = model.r_gmv - 1e-6
        r_msr, sigma_msr = msr_moments(model, rf)
        assert float((r_msr - model.r_gmv) / sigma_msr) == pytest.approx(upper.slope, abs=1e-3)
        assert lower.slope == -upper.slope
        assert upper.intercept == model.r_gmv


def test_pythagorean_slopes(random_markets):
    for model in random_markets:
        m = slopes(model)
        assert abs(m.pythagorean_residual) <= 1e-10 * m.m_tp ** 2


def test_gmv_sharpe_at_zero(identity_model):
    p = gmv_portfolio(identity_model)
    assert p.sharpe(0.0) == pytest.approx(0.15 / np.sqrt(0.5))


class TestErrors:
    """Precondiciones de la frontera"""

    def test_rate_at_gmv_rejected(self, identity_model):
        with pytest.raises(RateTooHigh):
            msr_portfolio(identity_model, identity_model.r_gmv)

    def test_rate_above_gmv_rejected(self, identity_model):
        with pytest.raises(RateTooHigh):
            cml(identity_model, 0.3)

    def test_tangent_needs_positive_c(self):
        model = market_model_from_moments([1.0, -1.0], 2.0 * np.eye(2))
        with pytest.raises(NonPositiveGmvReturn):
            tangent_portfolio(model)
        with pytest.raises(NonPositiveGmvReturn):
            slopes(model)

    def test_zero_risk_sharpe(self):
        with pytest.raises(ZeroRisk):
            sharpe_ratio(Portfolio(np.array([1.0]), 0.1, 0.0), 0.0)

    def test_weights_must_sum_to_one(self, identity_model):
        with pytest.raises(InvalidWeights):
            portfolio_from_weights(identity_model, [0.5, 0.4])
        with pytest.raises(InvalidWeights):
            portfolio_from_weights(identity_model, [1.0, 0.0, 0.0])
