"""
Coupled simulation of independent subspace diffusions
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from labs.errors import PreconditionError
from labs.scale import ScaleFunction
from labs.settings import DEFAULT_SE_MULTIPLIER
from labs.simulate.paths import PathSample, simulate_subspace_diffusion

logger = logging.getLogger(__name__)


@dataclass
class IndependenceReport:
    """Ê[f(X)g(Y)] against Ê[f(X)]·Ê[g(Y)]"""
    joint: float
    product: float
    difference: float
    se: float
    se_multiplier: float
    n_samples: int

    @property
    def passes(self) -> bool:
        return abs(self.difference) <= self.se_multiplier * self.se

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passes"] = self.passes
        return data


def _component_seed(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=tuple(key))


def coupled_simulation(components: Sequence[ScaleFunction], x0: Sequence[float], T: float, dt: float,
                       epsilon: Optional[float] = None, seed: int = 0) -> PathSample:
    """
    Simulate Z = (X^{s_1}, ..., X^{s_d}) with one independent stream per coordinate

    Args:
        components: Scale functions s_i
        x0: Start vector
        T: Horizon
        dt: Step
        epsilon: Band half-width (defaults to sqrt(dt))
        seed: Master seed; coordinate i uses the stream (seed, i)

    Returns:
        PathSample with positions of shape (N + 1, d)
    """
    if len(components) != len(x0):
        raise PreconditionError(f"{len(components)} components but start vector of length {len(x0)}")
    coordinates = [
        simulate_subspace_diffusion(s, start, T, dt, epsilon, _component_seed(seed, i))
        for i, (s, start) in enumerate(zip(components, x0))
    ]
    positions = np.column_stack([path.positions for path in coordinates])
    return PathSample(times=coordinates[0].times, positions=positions, seed=seed, dt=coordinates[0].dt)


def coupled_terminal_samples(components: Sequence[ScaleFunction], x0: Sequence[float], T: float, dt: float,
                             n_paths: int, epsilon: Optional[float] = None, seed: int = 0) -> np.ndarray:
    """
    Terminal values Z_T of independent coupled paths

    Path p, coordinate i uses the stream (seed, p, i).

    Returns:
        Array of shape (n_paths, d)
    """
    samples = np.empty((n_paths, len(components)))
    for p in range(n_paths):
        for i, (s, start) in enumerate(zip(components, x0)):
            path = simulate_subspace_diffusion(s, start, T, dt, epsilon, _component_seed(seed, p, i))
            samples[p, i] = path.positions[-1]
    return samples


def independence_check(samples: np.ndarray, f: Callable[[np.ndarray], np.ndarray],
                       g: Callable[[np.ndarray], np.ndarray],
                       se_multiplier: float = DEFAULT_SE_MULTIPLIER) -> IndependenceReport:
    """
    Monte Carlo witness of T^Z_t(f⊗g) = T^X_t f · T^Y_t g

    Args:
        samples: Terminal samples of shape (n, 2)
        f: Bounded function of the first coordinate
        g: Bounded function of the second coordinate
        se_multiplier: Acceptance band in standard errors

    Returns:
        IndependenceReport; the SE is that of the mean of (f - f̄)(g - ḡ)
    """
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise PreconditionError(f"independence check needs samples of shape (n, 2), got {samples.shape}")
    fx = np.asarray(f(samples[:, 0]), dtype=float)
    gy = np.asarray(g(samples[:, 1]), dtype=float)
    n = fx.size
    f_centred = np.zeros(n) if np.all(fx == fx[0]) else fx - fx.mean()
    g_centred = np.zeros(n) if np.all(gy == gy[0]) else gy - gy.mean()
    products = f_centred * g_centred
    report = IndependenceReport(
        joint=float(np.mean(fx * gy)),
        product=float(fx.mean() * gy.mean()),
        difference=float(products.mean()),
        se=float(products.std(ddof=1) / np.sqrt(n)),
        se_multiplier=se_multiplier,
        n_samples=n,
    )
    logger.debug(f"Independence: difference {report.difference:.3e} vs {se_multiplier}·SE {report.se:.3e}")
    return report
