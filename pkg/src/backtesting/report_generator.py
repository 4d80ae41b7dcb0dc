"""
Generador de Reportes de Carteras
Tablas de terminal para estadísticos, carteras y comparación de estrategias
"""

import logging
from typing import List, Optional, Sequence

from ..analysis.frontier import Portfolio
from ..analysis.market_model import AssetStats
from .backtesting_engine import STRATEGIES, Regime, StrategyReport

REGIME_TITLES = {Regime.SHORT.value: 'Con cortos', Regime.NO_SHORT.value: 'Sin cortos'}


def fmt(value: Optional[float], precision: int = 6) -> str:
    """Número con `precision` cifras significativas"""
    if value is None:
        return '-'
    return f"{value:.{precision}g}"


class StrategyReportGenerator:
    """Generador de reportes de texto"""

    def __init__(self, precision: int = 6):
        self.precision = precision
        self.logger = logging.getLogger(__name__)

    def _row(self, cells: Sequence[str], widths: Sequence[int]) -> str:
        first, *rest = cells
        return '  '.join([first.ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(rest, widths[1:])])

    def _table(self, header: Sequence[str], rows: List[Sequence[str]]) -> str:
        widths = [max(len(str(row[i])) for row in [header] + rows) for i in range(len(header))]
        lines = [self._row(header, widths), '  '.join('-' * w for w in widths)]
        lines.extend(self._row(row, widths) for row in rows)
        return '\n'.join(lines)

    def generate_stats_report(self, stats: List[AssetStats], title: str = 'Estadísticos descriptivos') -> str:
        """Activos en columnas; filas Return, Risk, Minimum, Maximum"""
        header = [''] + [s.name for s in stats]
        rows = [
            ['Return'] + [fmt(s.mean, self.precision) for s in stats],
            ['Risk'] + [fmt(s.risk, self.precision) for s in stats],
            ['Minimum'] + [fmt(s.minimum, self.precision) for s in stats],
            ['Maximum'] + [fmt(s.maximum, self.precision) for s in stats],
        ]
        return f"📊 {title}\n{self._table(header, rows)}"

    def generate_portfolio_report(self, portfolio: Portfolio, asset_names: Sequence[str],
                                  sharpe: Optional[float]) -> str:
        header = ['Activo', 'Peso']
        rows = [[name, fmt(float(w), self.precision)] for name, w in zip(asset_names, portfolio.weights)]
        rf_text = fmt(portfolio.rf_used, self.precision)
        report = f"""
🎯 Cartera {portfolio.label} (rf = {rf_text})

{self._table(header, rows)}

Rentabilidad esperada: {fmt(portfolio.expected_return, self.precision)}
Riesgo: {fmt(portfolio.risk, self.precision)}
Sharpe: {fmt(sharpe, self.precision)}
"""
        return report.strip()

    def generate_backtest_report(self, report: StrategyReport) -> str:
        """Cambio de valor por estrategia; regímenes lado a lado por horizonte"""
        labels = report.labels()
        horizons = report.horizons()
        mode = report.rows[0].mode if report.rows else '-'

        header = ['Estrategia'] + [f"rf {REGIME_TITLES[label]}" for label in labels]
        for horizon in horizons:
            for label in labels:
                header.append(f"{REGIME_TITLES[label]} h={horizon}")

        rows = []
        for strategy in STRATEGIES:
            cells = [strategy] + [fmt(report.portfolios[(label, strategy)].rf_used, self.precision)
                                  for label in labels]
            for horizon in horizons:
                for label in labels:
                    cells.append(f"{fmt(report.value(strategy, horizon, label), self.precision)}%")
            rows.append(cells)

        return f"📈 Cambio en el valor de la cartera (modo {mode})\n{self._table(header, rows)}"
