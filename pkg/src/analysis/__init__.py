"""
Módulo de Análisis Media-Varianza
Modelo de mercado, frontera eficiente y eficiencia cruzada
"""

from .cross_efficiency import (
    CrossEffMethod, CrossEffReport, DeaWeights, FullIntervalForm, RateInterval,
    average_cross_efficiency, ce_derivative, ce_second_derivative, cross_efficiency_curve,
    cross_efficiency_pair, cross_efficiency_report, dea_cross_efficiency, dea_weights,
    integrals_I1_I2, mcesr_portfolio, mcesr_rate, mcesr_rate_full_interval, quadrature_integrals,
)
from .frontier import (
    FrontierLine, Portfolio, PortfolioLabel, Slopes, asymptotes, cml, frontier_risk_at_return,
    frontier_samples, gmv_portfolio, msr_portfolio, portfolio_from_weights, sharpe_ratio, slopes,
    tangent_portfolio,
)
from .market_model import (
    AssetStats, MarketModel, ReturnMatrix, descriptive_stats, estimate_moments, invert_covariance,
    market_model_from_moments,
)
