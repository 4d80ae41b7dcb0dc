"""
CLI del Motor de Carteras
Comandos stats, portfolio, backtest y plotdata; códigos de salida 0 (ok), 1 (dominio), 2 (entrada)
"""

import functools
import logging
from typing import Any, Callable, Dict, Optional

import click

from ..utils.config import RunConfig, build_run_config
from ..utils.errors import PortfolioError
from ..utils.logging_config import log_system_status, setup_essential_logging
from .handlers.backtesting_handlers import BacktestingHandlers
from .handlers.plotdata_handlers import PlotdataHandlers
from .handlers.portfolio_handlers import PORTFOLIO_CHOICES, PortfolioHandlers
from .handlers.stats_handlers import StatsHandlers

logger = logging.getLogger(__name__)

# opción de click -> clave de configuración
OPTION_KEYS = {
    'input_path': 'INPUT',
    'kind': 'KIND',
    'percent': 'PERCENT',
    'split': 'SPLIT',
    'start': 'START',
    'end': 'END',
    'interval': 'INTERVAL',
    'msr_rate': 'MSR_RATE',
    'no_short': 'NO_SHORT',
    'grid': 'GRID',
    'horizons': 'HORIZONS',
    'mode': 'MODE',
    'output_format': 'FORMAT',
    'out_dir': 'OUT',
    'precision': 'PRECISION',
    'cml_rates': 'CML_RATES',
    'cloud': 'CLOUD',
}


def run_options(command: Callable) -> Callable:
    """Opciones compartidas por todos los comandos"""
    options = [
        click.option('--input', 'input_path', help='Archivo de entrada'),
        click.option('--kind', type=click.Choice(['returns_csv', 'prices_csv', 'french10']),
                     help='Formato del archivo de entrada'),
        click.option('--percent', is_flag=True, help='Valores en porcentaje'),
        click.option('--split', help='Última etiqueta de la muestra de estimación (YYYYMM o YYYY-MM-DD)'),
        click.option('--start', help='Primer período a usar'),
        click.option('--end', help='Último período a usar'),
        click.option('--interval', help='Intervalo de tasas R1:R2 (R2 vacío = r_GMV)'),
        click.option('--msr-rate', 'msr_rate', help='Tasa libre de riesgo de la cartera MSR'),
        click.option('--no-short', 'no_short', is_flag=True, help='Prohibir ventas en corto'),
        click.option('--grid', help='Número de particiones de la malla sin cortos'),
        click.option('--horizons', help='Horizontes en períodos, separados por comas'),
        click.option('--mode', type=click.Choice(['rebalanced', 'buyhold', 'buy_and_hold']),
                     help='Modo de backtest'),
        click.option('--format', 'output_format', type=click.Choice(['table', 'csv', 'json']),
                     help='Formato de salida'),
        click.option('--out', 'out_dir', help='Directorio de salida'),
        click.option('--precision', help='Cifras significativas (1-15)'),
        click.option('--config', 'config_file', help='Archivo clave=valor de configuración'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _flags(options: Dict[str, Any]) -> Dict[str, Any]:
    flags = {}
    for name, key in OPTION_KEYS.items():
        value = options.get(name)
        # los flags booleanos solo activan; su ausencia deja pasar env/archivo
        if value is False:
            value = None
        flags[key] = value
    return flags


def _fail(command: str, error: PortfolioError) -> int:
    click.echo(f"{type(error).__name__}: {error}", err=True)
    log_system_status(command, "ERROR", f"{type(error).__name__}: {error}")
    return error.exit_code


def _execute(command: str, action: Callable[[], str]) -> int:
    try:
        output = action()
    except PortfolioError as e:
        return _fail(command, e)
    except OSError as e:
        log_system_status(command, "ERROR", f"error de E/S: {e}")
        click.echo(f"OSError: {e}", err=True)
        return 1
    if output:
        click.echo(output)
    log_system_status(command, "OK")
    return 0


def cmd_stats(config: RunConfig) -> int:
    return _execute('stats', lambda: StatsHandlers(config).run())


def cmd_portfolio(config: RunConfig, which: str) -> int:
    return _execute('portfolio', lambda: PortfolioHandlers(config).run(which))


def cmd_backtest(config: RunConfig, both: bool = False) -> int:
    return _execute('backtest', lambda: BacktestingHandlers(config).run(both))


def cmd_plotdata(config: RunConfig) -> int:
    return _execute('plotdata', lambda: PlotdataHandlers(config).run())


def _dispatch(command: str, options: Dict[str, Any], action: Callable[[RunConfig], int]):
    try:
        config = build_run_config(_flags(options), options.get('config_file'))
    except PortfolioError as e:
        code = _fail(command, e)
    else:
        logger.info(f"📊 {command}: {config.input_path} ({config.kind.value}, "
                    f"{'con' if config.allow_short else 'sin'} cortos)")
        code = action(config)
    click.get_current_context().exit(code)


@click.group()
@click.option('--verbose', is_flag=True, help='Log a nivel INFO')
@click.option('--log-file', 'log_file', default=None, help='Copia del log en archivo')
def cli(verbose: bool, log_file: Optional[str]):
    """Selección de carteras por eficiencia cruzada (MCESR)"""
    setup_essential_logging('INFO' if verbose else None, log_file)


@cli.command()
@run_options
def stats(**options):
    """Estadísticos descriptivos por activo"""
    _dispatch('stats', options, cmd_stats)


@cli.command()
@click.argument('which', type=click.Choice(PORTFOLIO_CHOICES, case_sensitive=False))
@run_options
def portfolio(which: str, **options):
    """Cartera GMV, TP, MSR o MCESR"""
    _dispatch('portfolio', options, functools.partial(cmd_portfolio, which=which))


@cli.command()
@click.option('--both', is_flag=True, help='Evaluar con y sin ventas en corto')
@run_options
def backtest(both: bool, **options):
    """Cambio de valor fuera de muestra por estrategia"""
    _dispatch('backtest', options, functools.partial(cmd_backtest, both=both))


@cli.command()
@click.option('--cml-rates', 'cml_rates', help='Tasas de la familia de CML, separadas por comas')
@click.option('--cloud', help='Número de carteras aleatorias factibles en cloud.csv')
@run_options
def plotdata(**options):
    """CSV con los datos de la frontera y las curvas de capital"""
    _dispatch('plotdata', options, cmd_plotdata)


def main():
    cli()
