"""
Handler de Estadísticos Descriptivos
Rentabilidad, riesgo, mínimo y máximo por activo y por muestra
"""

from typing import List, Tuple

from ...analysis.market_model import ReturnMatrix, descriptive_stats
from .base_handler import BaseHandler

SAMPLE_TITLES = {
    'total': 'Período completo',
    'in_sample': 'Muestra de estimación',
    'out_sample': 'Muestra de prueba',
}


class StatsHandlers(BaseHandler):
    """Comando stats"""

    def _samples(self, panel: ReturnMatrix) -> List[Tuple[str, ReturnMatrix]]:
        samples = [('total', panel)]
        split = self.split_panel(panel)
        if split:
            samples += [('in_sample', split.in_sample), ('out_sample', split.out_sample)]
        return samples

    def run(self) -> str:
        panel = self.load_panel()
        tables, csv_rows, payload = [], [], {}

        for sample, returns in self._samples(panel):
            stats = descriptive_stats(returns)
            title = f"{SAMPLE_TITLES[sample]} ({returns.period_labels[0]} - {returns.period_labels[-1]})"
            tables.append(self.report_generator.generate_stats_report(stats, title))
            payload[sample] = []
            for s in stats:
                csv_rows.append([sample, s.name, s.mean, s.risk, s.minimum, s.maximum])
                payload[sample].append({
                    'asset': s.name,
                    'mean': self.rounded(s.mean),
                    'risk': self.rounded(s.risk),
                    'minimum': self.rounded(s.minimum),
                    'maximum': self.rounded(s.maximum),
                })

        text = self.render('\n\n'.join(tables),
                           ['sample', 'asset', 'mean', 'risk', 'minimum', 'maximum'], csv_rows, payload)
        return self.emit('stats', text)
