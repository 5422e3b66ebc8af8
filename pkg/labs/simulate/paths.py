"""
Brownian paths and the time change X^s = s^-1(B_τ)
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from labs.errors import PreconditionError
from labs.scale import InverseScale, MonotoneMeasure, ScaleFunction, stieltjes_measure

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]

# Margin added around the range of the driving path when building ds^-1
MEASURE_MARGIN = 1.0


@dataclass(frozen=True, eq=False)
class TimeChangeClock:
    """Accumulated functional A on the path time grid and its right-continuous inverse"""
    times: np.ndarray
    A: np.ndarray

    def tau(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """τ_t = inf{u : A_u >= t}, on the grid"""
        index = np.searchsorted(self.A, np.asarray(t, dtype=float), side="left")
        return self.times[np.clip(index, 0, self.times.size - 1)]

    def tau_index(self, t: Union[float, np.ndarray]) -> np.ndarray:
        index = np.searchsorted(self.A, np.asarray(t, dtype=float), side="left")
        return np.clip(index, 0, self.times.size - 1)


@dataclass(frozen=True, eq=False)
class PathSample:
    """
    A sampled path on the grid 0 = t_0 < ... < t_N = T

    positions has shape (N + 1,) or (N + 1, d). A time-changed path keeps its
    driving Brownian path and clock.
    """
    times: np.ndarray
    positions: np.ndarray
    seed: Optional[int]
    dt: float
    driving: Optional["PathSample"] = None
    clock: Optional[TimeChangeClock] = None

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def steps(self) -> int:
        return self.times.size - 1


def _generator(seed: Seed) -> Tuple[np.random.Generator, Optional[int]]:
    if isinstance(seed, np.random.SeedSequence):
        entropy = seed.entropy if isinstance(seed.entropy, int) else None
        return np.random.default_rng(seed), entropy
    return np.random.default_rng(seed), int(seed)


def brownian_path(x0: float, T: float, dt: float, seed: Seed) -> PathSample:
    """
    Standard Brownian motion started at x0

    Args:
        x0: Start
        T: Horizon (> 0)
        dt: Step (> 0); rounded so that T is a whole number of steps
        seed: Integer seed or SeedSequence

    Returns:
        PathSample with independent N(0, dt) increments
    """
    if not dt > 0 or not T > 0:
        raise PreconditionError(f"brownian_path needs dt > 0 and T > 0, got dt={dt}, T={T}")
    steps = max(1, int(round(T / dt)))
    step = T / steps
    rng, entropy = _generator(seed)
    increments = rng.normal(0.0, np.sqrt(step), size=steps)
    positions = x0 + np.concatenate(([0.0], np.cumsum(increments)))
    return PathSample(times=step * np.arange(steps + 1), positions=positions, seed=entropy, dt=step)


def clock_rate(positions: np.ndarray, measure: MonotoneMeasure, epsilon: float,
               level_window: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """
    Instantaneous rate of the additive functional of μ along a path

    density(B) plus the ε-band occupation kernel (1/2ε)·μ_atoms([B - ε, B + ε]);
    with a level window only mass inside the window is counted.
    """
    lo_band = positions - epsilon
    hi_band = positions + epsilon
    density = measure.density_at(positions)
    if level_window is not None:
        lo, hi = level_window
        density = np.where((positions >= lo) & (positions <= hi), density, 0.0)
        lo_band = np.maximum(lo_band, lo)
        hi_band = np.minimum(hi_band, hi)
    if measure.atom_masses.size == 0:
        return density
    return density + measure.atom_mass_between(lo_band, hi_band) / (2.0 * epsilon)


def pcaf_clock(path: PathSample, measure: MonotoneMeasure, epsilon: float) -> TimeChangeClock:
    """
    Additive functional A_t of μ along a Brownian path

    The Lebesgue part is ∫density(B_u)du and every atom contributes
    mass × the ε-band local time estimate, both summed with left-point steps.

    Args:
        path: Driving Brownian path
        measure: μ on the state space of the path
        epsilon: Band half-width (> 0)

    Returns:
        TimeChangeClock with A_0 = 0 and A nondecreasing
    """
    if not epsilon > 0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")
    rate = clock_rate(path.positions[:-1], measure, epsilon)
    A = path.dt * np.concatenate(([0.0], np.cumsum(rate)))
    return TimeChangeClock(times=path.times, A=A)


def simulate_subspace_diffusion(s: ScaleFunction, x0: float, T: float, dt: float,
                                epsilon: Optional[float] = None, seed: Seed = 0) -> PathSample:
    """
    Sample X^s_t = s^-1(B_{τ_t}) on [0, T]

    B starts at s(x0); τ inverts the additive functional of ds^-1, whose
    density is at least 1, so B on [0, T] covers τ_t for every t <= T.

    Args:
        s: Scale function with slope in {0, 1}
        x0: Start
        T: Horizon
        dt: Step of the driving path and of the output grid
        epsilon: Band half-width (defaults to sqrt(dt))
        seed: Integer seed or SeedSequence

    Returns:
        PathSample of X^s carrying its driving path and clock
    """
    if not s.has_zero_one_slope:
        raise PreconditionError("the subspace diffusion needs a scale with slope in {0, 1}")
    epsilon = np.sqrt(dt) if epsilon is None else epsilon
    driving = brownian_path(s.eval(x0), T, dt, seed)
    window = (float(driving.positions.min()) - MEASURE_MARGIN, float(driving.positions.max()) + MEASURE_MARGIN)
    measure = stieltjes_measure(InverseScale(s), window)
    clock = pcaf_clock(driving, measure, epsilon)
    index = clock.tau_index(driving.times)
    positions = s.inverse_eval(driving.positions[index], strict=False)
    logger.debug(f"Time-changed path: A_T={clock.A[-1]:.6g}, τ_T={driving.times[index[-1]]:.6g}")
    return PathSample(times=driving.times, positions=positions, seed=driving.seed, dt=driving.dt,
                      driving=driving, clock=clock)
