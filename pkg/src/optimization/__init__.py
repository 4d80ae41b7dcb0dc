"""
Módulo de Optimización sin Ventas en Corto
QP de conjunto activo y procedimiento de malla MCESR
"""

from .qp_no_short import (
    GridResult, QpSolution, discrete_cross_efficiency, gmv_no_short, mcesr_no_short,
    msr_no_short, no_short_frontier, qp_solve, rate_grid, tangent_no_short,
)

__all__ = [
    'GridResult',
    'QpSolution',
    'discrete_cross_efficiency',
    'gmv_no_short',
    'mcesr_no_short',
    'msr_no_short',
    'no_short_frontier',
    'qp_solve',
    'rate_grid',
    'tangent_no_short',
]
