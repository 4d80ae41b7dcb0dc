"""
Handler de Carteras
Construye GMV, TP, MSR o MCESR, con o sin ventas en corto
"""

from typing import Optional

from ...analysis.cross_efficiency import mcesr_portfolio
from ...analysis.frontier import Portfolio, gmv_portfolio, msr_portfolio, sharpe_ratio, tangent_portfolio
from ...analysis.market_model import MarketModel, estimate_moments
from ...optimization.qp_no_short import gmv_no_short, mcesr_no_short, msr_no_short, tangent_no_short
from ...utils.errors import ConfigError, ZeroRisk
from .base_handler import BaseHandler

PORTFOLIO_CHOICES = ('gmv', 'tp', 'msr', 'mcesr')


class PortfolioHandlers(BaseHandler):
    """Comando portfolio"""

    def build(self, model: MarketModel, which: str) -> Portfolio:
        which = which.lower()
        short = self.config.allow_short

        if which == 'gmv':
            return gmv_portfolio(model) if short else gmv_no_short(model)
        if which == 'tp':
            return tangent_portfolio(model) if short else tangent_no_short(model)
        if which == 'msr':
            rate = self.resolve_msr_rate()
            return msr_portfolio(model, rate) if short else msr_no_short(model, rate)
        if which == 'mcesr':
            interval = self.resolve_interval(model)
            if short:
                return mcesr_portfolio(model, interval)
            return mcesr_no_short(model, interval, self.config.grid_n).best_portfolio
        raise ConfigError(f"Cartera desconocida: {which} (opciones: {', '.join(PORTFOLIO_CHOICES)})")

    def _sharpe(self, portfolio: Portfolio) -> Optional[float]:
        try:
            return sharpe_ratio(portfolio, portfolio.rf_used or 0.0)
        except ZeroRisk:
            return None

    def run(self, which: str) -> str:
        panel = self.load_panel()
        model = estimate_moments(self.estimation_panel(panel))
        portfolio = self.build(model, which)
        sharpe = self._sharpe(portfolio)
        names = list(panel.asset_names)

        self.logger.info(f"🎯 Cartera {portfolio.label}: r={portfolio.expected_return:.6g}, σ={portfolio.risk:.6g}")

        payload = {
            'label': portfolio.label,
            'rf': self.rounded(portfolio.rf_used),
            'weights': {name: self.rounded(float(w)) for name, w in zip(names, portfolio.weights)},
            'expected_return': self.rounded(portfolio.expected_return),
            'risk': self.rounded(portfolio.risk),
            'sharpe': self.rounded(sharpe),
        }
        header = ['label', 'rf', 'expected_return', 'risk', 'sharpe'] + names
        row = [portfolio.label, self.fmt(portfolio.rf_used), portfolio.expected_return, portfolio.risk,
               self.fmt(sharpe)] + [float(w) for w in portfolio.weights]

        table = self.report_generator.generate_portfolio_report(portfolio, names, sharpe)
        text = self.render(table, header, [row], payload)
        return self.emit(f"portfolio_{which.lower()}", text)
