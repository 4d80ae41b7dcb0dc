#!/usr/bin/env python3
"""
Motor de Carteras por Eficiencia Cruzada
Punto de entrada del CLI: stats, portfolio, backtest y plotdata
"""

from src.cli.portfolio_cli import main

if __name__ == "__main__":
    main()
