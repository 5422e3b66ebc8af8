"""
Exit statistics of the subspace diffusion by Monte Carlo
Hitting probability, mean exit time and window occupation, checked against the chain oracle
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from labs.errors import NumericConsistencyError, PreconditionError
from labs.scale import InverseScale, MonotoneMeasure, ScaleFunction, stieltjes_measure
from labs.settings import DEFAULT_N_PATHS, PATH_CHUNK_STEPS
from labs.simulate.oracle import ChainOracle, ChainProblem, chain_oracle_solve
from labs.simulate.paths import clock_rate

logger = logging.getLogger(__name__)

# A path that has not left the box after this many expected B-exit times is censored
CENSOR_FACTOR = 50.0

# Fraction of the way through a step assigned to a crossing detected by the bridge test
BRIDGE_CROSSING_FRACTION = 0.5


@dataclass
class ExitStatistics:
    """Monte Carlo estimates with standard errors next to their oracle values"""
    a: float
    b: float
    x0: float
    n_paths: int
    p_hit_b: float
    p_hit_b_se: float
    p_exact: float
    p_chain: float
    mean_exit_time: float
    mean_exit_time_se: float
    exit_time_chain: float
    occupation_time: Optional[float] = None
    occupation_time_se: Optional[float] = None
    occupation_chain: Optional[float] = None
    censored: int = 0

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class _ExitProblem:
    lower: float
    upper: float
    start: float
    dt: float
    epsilon: float
    measure: MonotoneMeasure
    level_window: Optional[Tuple[float, float]]
    max_steps: int
    seed: int


def _bridge_touch(start: np.ndarray, end: np.ndarray, barrier: float, dt: float) -> np.ndarray:
    """P(a Brownian bridge from start to end over dt touches the barrier), both ends on one side"""
    return np.exp(-2.0 * (barrier - start) * (barrier - end) / dt)


def _run_path(problem: _ExitProblem, index: int) -> Tuple[float, float, float, bool]:
    """
    One path of B from s(x0) until it leaves (s(a), s(b))

    Returns:
        (hit_b, exit_time, occupation, censored)
    """
    rng = np.random.default_rng(np.random.SeedSequence(problem.seed, spawn_key=(index,)))
    root_dt = np.sqrt(problem.dt)
    y = problem.start
    clock = 0.0
    occupation = 0.0
    steps = 0
    while steps < problem.max_steps:
        path = y + np.cumsum(rng.standard_normal(PATH_CHUNK_STEPS) * root_dt)
        uniforms = rng.random((PATH_CHUNK_STEPS, 2))
        previous = np.concatenate(([y], path[:-1]))

        out_low = path <= problem.lower
        out_high = path >= problem.upper
        inside = ~(out_low | out_high)
        touch_low = inside & (uniforms[:, 0] < _bridge_touch(previous, path, problem.lower, problem.dt))
        touch_high = inside & (uniforms[:, 1] < _bridge_touch(previous, path, problem.upper, problem.dt))
        event = out_low | out_high | touch_low | touch_high

        rate = clock_rate(previous, problem.measure, problem.epsilon)
        window_rate = None
        if problem.level_window is not None:
            window_rate = clock_rate(previous, problem.measure, problem.epsilon, problem.level_window)

        if not event.any():
            clock += problem.dt * float(rate.sum())
            if window_rate is not None:
                occupation += problem.dt * float(window_rate.sum())
            y = float(path[-1])
            steps += PATH_CHUNK_STEPS
            continue

        k = int(np.argmax(event))
        start = float(previous[k])
        if out_high[k]:
            hit_b, fraction = True, (problem.upper - start) / (float(path[k]) - start)
        elif out_low[k]:
            hit_b, fraction = False, (start - problem.lower) / (start - float(path[k]))
        else:
            high = _bridge_touch(previous[k], path[k], problem.upper, problem.dt)
            low = _bridge_touch(previous[k], path[k], problem.lower, problem.dt)
            hit_b = bool(touch_high[k] and (not touch_low[k] or high >= low))
            fraction = BRIDGE_CROSSING_FRACTION
        clock += problem.dt * (float(rate[:k].sum()) + fraction * float(rate[k]))
        if window_rate is not None:
            occupation += problem.dt * (float(window_rate[:k].sum()) + fraction * float(window_rate[k]))
        return float(hit_b), clock, occupation, False

    return 0.0, clock, occupation, True


def exit_statistics(s: ScaleFunction, a: float, b: float, x0: float, n_paths: int = DEFAULT_N_PATHS,
                    dt: float = 1e-4, epsilon: Optional[float] = None, seed: int = 0,
                    workers: int = 1, oracle_n: int = 2000,
                    occupation_window: Optional[Tuple[float, float]] = None) -> ExitStatistics:
    """
    Exit law of X^s from (a, b) by Monte Carlo on the B timescale

    Exits are detected on the driving path by linear interpolation between
    steps, with a Brownian-bridge test for crossings inside a step. The exit
    time of X^s is the additive functional of ds^-1 accumulated up to the exit
    of B. Every path draws from its own stream seeded by (seed, path index).

    Args:
        s: Scale function with slope in {0, 1}
        a: Left end
        b: Right end
        x0: Start, a < x0 < b
        n_paths: Number of paths
        dt: Step on the B timescale
        epsilon: Band half-width of the local-time kernel (defaults to sqrt(dt))
        seed: Master seed
        workers: Thread count
        oracle_n: Uniform cells of the chain oracle
        occupation_window: Optional [c, d] inside (a, b) for occupation time

    Returns:
        ExitStatistics
    """
    if not a < x0 < b:
        raise PreconditionError(f"exit statistics need a < x0 < b, got a={a}, x0={x0}, b={b}")
    if not s.has_zero_one_slope:
        raise PreconditionError("the subspace diffusion needs a scale with slope in {0, 1}")
    if n_paths < 2:
        raise PreconditionError(f"n_paths must be at least 2, got {n_paths}")
    epsilon = float(np.sqrt(dt)) if epsilon is None else epsilon

    lower, start, upper = (float(v) for v in s.eval(np.array([a, x0, b])))
    level_window = None
    if occupation_window is not None:
        c, d = occupation_window
        if not a <= c < d <= b:
            raise PreconditionError(f"occupation window {occupation_window} is not inside ({a}, {b})")
        level_window = tuple(float(v) for v in s.eval(np.array([c, d])))

    expected_steps = (start - lower) * (upper - start) / dt
    problem = _ExitProblem(
        lower=lower,
        upper=upper,
        start=start,
        dt=dt,
        epsilon=epsilon,
        measure=stieltjes_measure(InverseScale(s), (lower, upper)),
        level_window=level_window,
        max_steps=int(CENSOR_FACTOR * expected_steps) + PATH_CHUNK_STEPS,
        seed=seed,
    )

    logger.info(f"Exit statistics: {n_paths} paths from x0={x0} in ({a}, {b}), dt={dt}, eps={epsilon:.3g}, "
                f"workers={workers}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _run_path(problem, i), range(n_paths)))
    else:
        results = [_run_path(problem, i) for i in range(n_paths)]

    table = np.array([r[:3] for r in results if not r[3]]).reshape(-1, 3)
    censored = n_paths - table.shape[0]
    if censored:
        logger.warning(f"{censored} paths did not exit within {problem.max_steps} steps and were dropped")
    count = table.shape[0]
    if count < 2:
        logger.error(f"Only {count} of {n_paths} paths exited; no standard error can be formed")
        raise NumericConsistencyError(
            f"only {count} of {n_paths} paths exited within {problem.max_steps} steps",
            {"n_paths": n_paths, "censored": censored, "max_steps": problem.max_steps},
        )
    hits, times, occupation = table[:, 0], table[:, 1], table[:, 2]
    p_hat = float(hits.mean())

    protected = (x0,) + (tuple(occupation_window) if occupation_window else ())
    oracle = ChainOracle.build(s, a, b, oracle_n, include=protected)
    stats = ExitStatistics(
        a=a,
        b=b,
        x0=x0,
        n_paths=count,
        p_hit_b=p_hat,
        p_hit_b_se=float(np.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / count)),
        p_exact=(start - lower) / (upper - lower),
        p_chain=chain_oracle_solve(oracle, ChainProblem.HIT_PROBABILITY, x0),
        mean_exit_time=float(times.mean()),
        mean_exit_time_se=float(times.std(ddof=1) / np.sqrt(count)),
        exit_time_chain=chain_oracle_solve(oracle, ChainProblem.EXPECTED_EXIT_TIME, x0),
        censored=censored,
    )
    if occupation_window is not None:
        stats.occupation_time = float(occupation.mean())
        stats.occupation_time_se = float(occupation.std(ddof=1) / np.sqrt(count))
        stats.occupation_chain = chain_oracle_solve(oracle, ChainProblem.OCCUPATION_TIME, x0, occupation_window)

    logger.info(f"p_hit_b={stats.p_hit_b:.4f}±{stats.p_hit_b_se:.4f} (exact {stats.p_exact:.6f}), "
                f"exit time={stats.mean_exit_time:.4f}±{stats.mean_exit_time_se:.4f} "
                f"(chain {stats.exit_time_chain:.4f})")
    return stats
