"""
Handler de Backtesting
Compara GMV, TP, MSR y MCESR fuera de muestra, con y sin ventas en corto
"""

from ...analysis.market_model import estimate_moments
from ...backtesting.backtesting_engine import BacktestMode, StrategyReport, compare_strategies
from ...utils.config import OutputFormat
from ...utils.errors import ConfigError
from .base_handler import BaseHandler


class BacktestingHandlers(BaseHandler):
    """Comando backtest"""

    def build_report(self, both: bool = False) -> StrategyReport:
        panel = self.load_panel()
        split = self.split_panel(panel)
        if split is None:
            raise ConfigError("El backtest necesita una frontera de partición (--split)")

        model = estimate_moments(split.in_sample)
        interval = self.resolve_interval(model)
        msr_rate = self.resolve_msr_rate()
        regimes = [True, False] if both else [self.config.allow_short]

        report = StrategyReport()
        for allow_short in regimes:
            report = report.combine(compare_strategies(
                split.in_sample, split.out_sample, interval, msr_rate, allow_short,
                horizons=self.config.horizons, mode=BacktestMode(self.config.mode),
                grid_n=self.config.grid_n,
            ))
        self.logger.info(f"✅ Backtest completado: {len(report.rows)} filas")
        return report

    def run(self, both: bool = False) -> str:
        report = self.build_report(both)
        output_format = self.config.output_format
        if output_format == OutputFormat.CSV:
            text = report.to_csv(precision=self.config.precision)
        elif output_format == OutputFormat.JSON:
            text = report.to_json(precision=self.config.precision)
        else:
            text = self.report_generator.generate_backtest_report(report)
        return self.emit('backtest', text)
