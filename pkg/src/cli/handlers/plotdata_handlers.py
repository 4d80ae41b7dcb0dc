"""
Handler de Datos para Gráficos
Frontera, rectas, carteras marcadas, conjunto MSR, nube de carteras y curvas de capital en CSV
"""

from typing import List, Tuple

import numpy as np

from ...analysis.cross_efficiency import mcesr_portfolio
from ...analysis.frontier import (
    FrontierLine, Portfolio, asymptotes, cml, frontier_samples, gmv_portfolio, msr_portfolio,
    rate_margin, tangent_portfolio,
)
from ...analysis.market_model import MarketModel, ReturnMatrix, estimate_moments
from ...backtesting.backtesting_engine import BacktestingEngine, BacktestMode, STRATEGIES, equity_curve
from ...optimization.qp_no_short import (
    gmv_no_short, mcesr_no_short, msr_no_short, no_short_frontier, rate_grid, tangent_no_short,
)
from ...utils.errors import ConfigError, DomainError
from .base_handler import BaseHandler

FRONTIER_POINTS = 400
FRONTIER_SPAN = 3.0
NO_SHORT_POINTS = 100
MSR_SET_POINTS = 101
CLOUD_SEED = 20240607
NO_SHORT_SUFFIX = '_no_short'


class PlotdataHandlers(BaseHandler):
    """Comando plotdata"""

    def _collect(self, builders) -> List[Portfolio]:
        marked = []
        for label, build in builders:
            try:
                marked.append(build())
            except (DomainError, ConfigError) as e:
                self.logger.warning(f"⚠️ Sin punto {label} en los gráficos: {e}")
        return marked

    def marked_portfolios(self, model: MarketModel) -> List[Portfolio]:
        """GMV, TP, MSR y MCESR con cortos; se omiten los que el mercado no admite"""
        return self._collect([
            ('GMV', lambda: gmv_portfolio(model)),
            ('TP', lambda: tangent_portfolio(model)),
            ('MSR', lambda: msr_portfolio(model, self.resolve_msr_rate())),
            ('MCESR', lambda: mcesr_portfolio(model, self.resolve_interval(model))),
        ])

    def no_short_portfolios(self, model: MarketModel) -> List[Portfolio]:
        """Las mismas cuatro carteras con pesos no negativos"""
        builders = [
            ('GMV', lambda: gmv_no_short(model)),
            ('TP', lambda: tangent_no_short(model)),
            ('MSR', lambda: msr_no_short(model, self.resolve_msr_rate())),
            ('MCESR', lambda: mcesr_no_short(model, self.resolve_interval(model),
                                             self.config.grid_n).best_portfolio),
        ]
        return self._collect([
            (f"{label}{NO_SHORT_SUFFIX}", lambda build=build, label=label: build().relabel(f"{label}{NO_SHORT_SUFFIX}"))
            for label, build in builders
        ])

    def frontier_grid(self, model: MarketModel, marked: List[Portfolio]) -> np.ndarray:
        """Malla de rentabilidades que contiene exactamente cada punto marcado"""
        _, lower = asymptotes(model)
        half_width = FRONTIER_SPAN * model.sigma_gmv * abs(lower.slope)
        grid = np.linspace(model.r_gmv - half_width, model.r_gmv + half_width, FRONTIER_POINTS)
        return np.unique(np.concatenate([grid, [p.expected_return for p in marked]]))

    def cml_family_rates(self, model: MarketModel) -> Tuple[List[float], bool]:
        """Tasas de la familia de CML: las configuradas o r1, punto medio y r2 del intervalo"""
        if self.config.cml_rates is not None:
            return list(self.config.cml_rates), True
        interval = self.resolve_interval(model)
        rates = [interval.r1, 0.5 * (interval.r1 + interval.r2), interval.r2]
        limit = model.r_gmv - rate_margin(model)
        return sorted({rate for rate in rates if rate < limit}), False

    def _line_rows(self, model: MarketModel, marked: List[Portfolio], sigma_max: float) -> List[Tuple]:
        upper, lower = asymptotes(model)
        lines = [
            (upper, 'asymptote_upper'),
            (lower, 'asymptote_lower'),
            (FrontierLine(0.0, model.r_gmv / model.sigma_gmv), 'GMV_origin'),
        ]
        for portfolio in marked:
            if portfolio.rf_used is not None:
                lines.append((cml(model, portfolio.rf_used), f"CML_{portfolio.label}"))

        rates, explicit = self.cml_family_rates(model)
        for rate in rates:
            try:
                lines.append((cml(model, rate), f"CML_rf={self.fmt(float(rate))}"))
            except DomainError as e:
                if explicit:
                    self.logger.warning(f"⚠️ Sin CML para rf={rate}: {e}")
        return [(0.0, float(line.at(0.0)), sigma_max, float(line.at(sigma_max)), label)
                for line, label in lines]

    def _msr_set_rows(self, model: MarketModel) -> List[Tuple]:
        """Carteras MSR(rf) con rf recorriendo el intervalo"""
        interval = self.resolve_interval(model)
        top = min(interval.r2, model.r_gmv - 2.0 * rate_margin(model))
        if top <= interval.r1:
            rates = np.array([interval.r1])
        else:
            rates = np.linspace(interval.r1, top, MSR_SET_POINTS)
        rows = []
        for rate in rates:
            try:
                portfolio = msr_portfolio(model, float(rate))
            except DomainError as e:
                self.logger.warning(f"⚠️ Conjunto MSR incompleto: {e}")
                break
            rows.append((float(rate), portfolio.risk, portfolio.expected_return))
        return rows

    def _cloud_rows(self, model: MarketModel) -> List[Tuple]:
        """Carteras aleatorias totalmente invertidas (semilla fija)"""
        rng = np.random.default_rng(CLOUD_SEED)
        n, count = model.n_assets, self.config.cloud
        if self.config.allow_short:
            raw = rng.normal(size=(count, n))
            weights = raw - raw.mean(axis=1, keepdims=True) + 1.0 / n
        else:
            weights = rng.dirichlet(np.ones(n), size=count)
        returns = weights @ model.mu
        risks = np.sqrt(np.maximum(np.einsum('ij,jk,ik->i', weights, model.sigma, weights), 0.0))
        return [(float(s), float(r)) for s, r in zip(risks, returns)]

    def _equity_rows(self, panel: ReturnMatrix, model: MarketModel) -> List[Tuple]:
        split = self.split_panel(panel)
        if split is None:
            self.logger.warning("⚠️ Sin --split no se generan curvas de capital")
            return []
        engine = BacktestingEngine(BacktestMode(self.config.mode), self.config.grid_n)
        fitted = engine.fit_strategies(split.in_sample, self.resolve_interval(model),
                                       self.resolve_msr_rate(), self.config.allow_short)
        rows = []
        for strategy in STRATEGIES:
            curve = equity_curve(fitted[strategy].weights, split.out_sample, engine.mode)
            rows.extend((label, float(value), strategy) for label, value in zip(curve.labels, curve.values))
        return rows

    def _no_short_frontier_rows(self, model: MarketModel) -> List[Tuple]:
        rates = rate_grid(self.resolve_interval(model), NO_SHORT_POINTS)
        return [(p.risk, p.expected_return) for p in no_short_frontier(model, rates)]

    def run(self) -> str:
        if not self.config.out_dir:
            raise ConfigError("plotdata necesita un directorio de salida (--out)")

        panel = self.load_panel()
        model = estimate_moments(self.estimation_panel(panel))
        marked = self.marked_portfolios(model)
        extra = [] if self.config.allow_short else self.no_short_portfolios(model)

        sigma, r = frontier_samples(model, self.frontier_grid(model, marked))
        sigma_max = float(sigma.max())
        written = [
            self.write_file('frontier.csv', self.csv_text(['sigma', 'r'], [
                (float(s), float(v)) for s, v in zip(sigma, r)])),
            self.write_file('lines.csv', self.csv_text(['x0', 'y0', 'x1', 'y1', 'label'],
                                                       self._line_rows(model, marked, sigma_max))),
            self.write_file('points.csv', self.csv_text(['sigma', 'r', 'label'], [
                (p.risk, p.expected_return, p.label) for p in marked + extra])),
            self.write_file('msr_set.csv', self.csv_text(['rf', 'sigma', 'r'], self._msr_set_rows(model))),
        ]

        if self.config.cloud > 0:
            written.append(self.write_file('cloud.csv', self.csv_text(['sigma', 'r'], self._cloud_rows(model))))

        equity_rows = self._equity_rows(panel, model)
        if equity_rows:
            written.append(self.write_file('equity.csv', self.csv_text(['date', 'value', 'strategy'], equity_rows)))

        cumulative = panel.cumulative_returns()
        asset_rows = [(label, float(cumulative[t, j]), name)
                      for j, name in enumerate(panel.asset_names)
                      for t, label in enumerate(panel.period_labels)]
        written.append(self.write_file('assets.csv', self.csv_text(['date', 'value', 'asset'], asset_rows)))

        if not self.config.allow_short:
            written.append(self.write_file('frontier_no_short.csv', self.csv_text(
                ['sigma', 'r'], self._no_short_frontier_rows(model))))

        return '\n'.join(f"💾 {path}" for path in written)
