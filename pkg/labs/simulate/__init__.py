"""
Monte Carlo package for the Regular Subspace Lab
"""

from .paths import (
    PathSample,
    TimeChangeClock,
    brownian_path,
    clock_rate,
    pcaf_clock,
    simulate_subspace_diffusion
)
from .oracle import ChainOracle, ChainProblem, chain_oracle_solve
from .exits import ExitStatistics, exit_statistics
from .coupled import (
    IndependenceReport,
    coupled_simulation,
    coupled_terminal_samples,
    independence_check
)

__all__ = [
    'PathSample',
    'TimeChangeClock',
    'brownian_path',
    'clock_rate',
    'pcaf_clock',
    'simulate_subspace_diffusion',
    'ChainOracle',
    'ChainProblem',
    'chain_oracle_solve',
    'ExitStatistics',
    'exit_statistics',
    'IndependenceReport',
    'coupled_simulation',
    'coupled_terminal_samples',
    'independence_check'
]

__version__ = "1.0.0"
