"""
Base de los Handlers del CLI
Carga del panel, resolución de tasas y escritura de salidas comunes a todos los comandos
"""

import json
import logging
import os
from typing import Dict, List, Optional, Sequence

from ...analysis.cross_efficiency import RateInterval
from ...analysis.market_model import MarketModel, ReturnMatrix
from ...backtesting.report_generator import StrategyReportGenerator, fmt
from ...data.loaders import (
    PeriodSplit, load_french_10industry, load_prices_csv, load_returns_csv, select_period,
    split_periods,
)
from ...utils.config import InputKind, OutputFormat, RunConfig
from ...utils.errors import ConfigError

FILE_EXTENSIONS = {OutputFormat.TABLE: 'txt', OutputFormat.CSV: 'csv', OutputFormat.JSON: 'json'}


class BaseHandler:
    """Operaciones compartidas por los comandos"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.logger = logging.getLogger(self.__class__.__module__)
        self.report_generator = StrategyReportGenerator(config.precision)

    # === DATOS ===

    def load_panel(self) -> ReturnMatrix:
        path = self.config.input_path
        if not path:
            raise ConfigError("Falta el archivo de entrada (--input o PORTFOLIO_INPUT)")

        kind = self.config.kind
        if kind == InputKind.FRENCH10:
            panel = load_french_10industry(path, keep_percent=self.config.percent)
        elif kind == InputKind.PRICES_CSV:
            panel = load_prices_csv(path)
        else:
            panel = load_returns_csv(path, percent=self.config.percent)

        if self.config.start or self.config.end:
            panel = select_period(panel, self.config.start, self.config.end)
        return panel

    def split_panel(self, panel: ReturnMatrix) -> Optional[PeriodSplit]:
        if not self.config.split:
            return None
        return split_periods(panel, self.config.split)

    def estimation_panel(self, panel: ReturnMatrix) -> ReturnMatrix:
        """Muestra de estimación: la parte previa a --split, o el panel completo"""
        split = self.split_panel(panel)
        return split.in_sample if split else panel

    # === TASAS ===

    def resolve_interval(self, model: MarketModel) -> RateInterval:
        """Intervalo configurado; sin extremo superior se usa r_GMV del modelo"""
        r1, r2 = self.config.interval if self.config.interval else (0.0, None)
        if r2 is None:
            r2 = model.r_gmv
        return RateInterval(r1, r2)

    def resolve_msr_rate(self) -> float:
        if self.config.msr_rate is not None:
            return self.config.msr_rate
        if self.config.interval and self.config.interval[1] is not None:
            return self.config.interval[1]
        raise ConfigError("La cartera MSR necesita --msr-rate o un --interval con extremo superior")

    # === SALIDAS ===

    def fmt(self, value: Optional[float]) -> str:
        return fmt(value, self.config.precision)

    def rounded(self, value: Optional[float]) -> Optional[float]:
        return None if value is None else float(self.fmt(value))

    def dump_json(self, payload) -> str:
        return json.dumps(payload, indent=2, ensure_ascii=False)

    def csv_text(self, header: Sequence[str], rows: List[Sequence]) -> str:
        lines = [','.join(header)]
        for row in rows:
            lines.append(','.join(self.fmt(cell) if isinstance(cell, float) else str(cell) for cell in row))
        return '\n'.join(lines) + '\n'

    def write_file(self, name: str, text: str) -> str:
        os.makedirs(self.config.out_dir, exist_ok=True)
        path = os.path.join(self.config.out_dir, name)
        with open(path, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text if text.endswith('\n') else text + '\n')
        self.logger.info(f"💾 Archivo escrito: {path}")
        return path

    def emit(self, stem: str, text: str) -> str:
        """Texto para stdout; copia en --out si está configurado"""
        if self.config.out_dir:
            self.write_file(f"{stem}.{FILE_EXTENSIONS[self.config.output_format]}", text)
        return text.rstrip('\n')

    def render(self, table: str, csv_header: Sequence[str], csv_rows: List[Sequence], payload: Dict) -> str:
        output_format = self.config.output_format
        if output_format == OutputFormat.CSV:
            return self.csv_text(csv_header, csv_rows)
        if output_format == OutputFormat.JSON:
            return self.dump_json(payload)
        return table
