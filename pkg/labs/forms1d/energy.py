"""
One-dimensional subspace energies
E^(s) on the core C¹_c(s), the Brownian energy ½D, and the weak generator identity
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from labs.errors import NumericConsistencyError, PreconditionError, UnsupportedProfileError
from labs.forms1d.profiles import Profile
from labs.scale import (
    ScaleFamily,
    ScaleFunction,
    lebesgue_measure,
    stieltjes_integrate,
    stieltjes_measure,
)
from labs.settings import DEFAULT_TOLERANCES, FD_BLOCK

logger = logging.getLogger(__name__)

MIN_QUAD_N = 16
DEFAULT_GRID_N = 1 << 16
DEFAULT_SWEEP_DEPTHS = (6, 8, 10)

# Sweep decrease is judged with this relative slack
MONOTONE_SLACK = 1e-9

SWEEP_COLUMNS = ["family", "depth", "grid_n", "E_s", "D", "residual"]


@dataclass(frozen=True)
class CoreFunction:
    """u = φ∘s with φ supported in J = s(I)"""
    profile: Profile
    scale: ScaleFunction

    def __post_init__(self):
        lo, hi = self.scale.range()
        p, q = self.profile.support
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if p < lo - slack or q > hi + slack:
            raise PreconditionError(
                f"profile support [{p}, {q}] is not inside J = [{lo}, {hi}]",
                {"support": (p, q), "range": (lo, hi)},
            )

    @property
    def support(self) -> Tuple[float, float]:
        return self.profile.support

    @property
    def x_window(self) -> Tuple[float, float]:
        """
        Interval in I outside which u vanishes

        u is 0 on a whole flat piece at level p or q, so the left end takes the
        right edge of the preimage of p and the right end the left edge of the
        preimage of q.
        """
        p, q = self.profile.support
        left = self.scale.inverse_eval(p, side="right")
        right = self.scale.inverse_eval(q, side="left")
        return float(left), float(right)

    def value(self, x) -> np.ndarray:
        return self.profile.value(self.scale.eval(np.asarray(x, dtype=float)))

    def du_ds(self, x) -> np.ndarray:
        """Radon-Nikodym derivative du/ds = φ'∘s"""
        return self.profile.derivative(self.scale.eval(np.asarray(x, dtype=float)))

    def x_breakpoints(self) -> np.ndarray:
        """Kinks of u in x: gap edges of s and preimages of profile breakpoints"""
        window = self.x_window
        mapped = self.scale.inverse_eval(self.profile.breakpoints(), strict=False)
        return np.unique(np.concatenate((self.scale.breakpoints(window), mapped)))

    def at_depth(self, depth: int) -> "CoreFunction":
        return CoreFunction(self.profile, self.scale.at_depth(depth))


@dataclass
class SubspaceIdentityReport:
    """Outcome of a depth sweep comparing E^(s) with ½D"""
    family: str
    depths: List[int] = field(default_factory=list)
    grid_sizes: List[int] = field(default_factory=list)
    energies_Es: List[float] = field(default_factory=list)
    energies_D: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    monotone: bool = True
    converged: bool = False

    @property
    def residual(self) -> float:
        return self.residuals[-1]

    @property
    def ratio(self) -> float:
        """E^(s) / ½D at the finest sweep point"""
        return self.energies_Es[-1] / self.energies_D[-1] if self.energies_D[-1] else float("inf")


def _image_energy(profile_u: Profile, profile_v: Profile, quad_n: int) -> float:
    """½∫_J φu' φv' dy by composite Gauss-Legendre"""
    lo = max(profile_u.support[0], profile_v.support[0])
    hi = min(profile_u.support[1], profile_v.support[1])
    if not hi > lo:
        return 0.0
    breakpoints = np.concatenate((profile_u.breakpoints(), profile_v.breakpoints()))
    integrand = lambda y: profile_u.derivative(y) * profile_v.derivative(y)  # noqa: E731
    return 0.5 * stieltjes_integrate(integrand, lebesgue_measure((lo, hi)), quad_n, breakpoints)


def _stieltjes_energy(u: CoreFunction, quad_n: int) -> float:
    """½∫(φ'∘s)² ds over the x-window of u"""
    lo, hi = u.x_window
    if not hi > lo:
        return 0.0
    measure = stieltjes_measure(u.scale, (lo, hi))
    return 0.5 * stieltjes_integrate(lambda x: u.du_ds(x) ** 2, measure, quad_n, u.x_breakpoints())


def energy_Es(u: CoreFunction, quad_n: int = 256) -> float:
    """
    Subspace energy E^(s)(u, u) = ½∫(du/ds)² ds

    Computed as the image-measure integral over J and cross-checked against the
    Stieltjes integral against ds; the two must agree within the quadrature
    error estimate obtained by doubling the cell count.

    Args:
        u: Core function
        quad_n: Uniform quadrature cells (>= 16)

    Returns:
        The image-measure value
    """
    if quad_n < MIN_QUAD_N:
        raise PreconditionError(f"quad_n must be >= {MIN_QUAD_N}, got {quad_n}")

    image = _image_energy(u.profile, u.profile, quad_n)
    image_fine = _image_energy(u.profile, u.profile, 2 * quad_n)
    stieltjes = _stieltjes_energy(u, quad_n)
    stieltjes_fine = _stieltjes_energy(u, 2 * quad_n)

    bound = 10.0 * (abs(image - image_fine) + abs(stieltjes - stieltjes_fine)) \
        + 1e-9 * max(abs(image), abs(stieltjes)) + 1e-14
    if abs(image - stieltjes) > bound:
        logger.error(f"Energy quadratures disagree: image={image!r} stieltjes={stieltjes!r}")
        raise NumericConsistencyError(
            "image-measure and Stieltjes forms of E^(s) disagree",
            {"image": image, "stieltjes": stieltjes, "bound": bound},
        )
    logger.debug(f"E^(s) = {image:.12g} (stieltjes {stieltjes:.12g}, bound {bound:.3g})")
    return image


def energy_bilinear(u: CoreFunction, v: CoreFunction, quad_n: int = 256) -> float:
    """
    Polarized subspace energy E^(s)(u, v) = ½∫_J φu' φv' dy

    Args:
        u: Core function
        v: Core function on the same scale

    Returns:
        E^(s)(u, v)
    """
    if u.scale is not v.scale and u.scale.to_json() != v.scale.to_json():
        raise PreconditionError("energy_bilinear needs core functions on the same scale")
    return _image_energy(u.profile, v.profile, quad_n)


def l2_norm_squared(u: CoreFunction, quad_n: int = 256) -> float:
    """‖u‖² in L²(dx), the speed measure of the subspace diffusion"""
    lo, hi = u.x_window
    if not hi > lo:
        return 0.0
    return stieltjes_integrate(lambda x: u.value(x) ** 2, lebesgue_measure((lo, hi)), quad_n, u.x_breakpoints())


def fd_step(u: CoreFunction, grid_n: int) -> float:
    """Uniform step min(width/grid_n, w_min/8) for the finite-difference energy"""
    lo, hi = u.x_window
    width = hi - lo
    return min(width / grid_n, u.scale.min_piece_width((lo, hi)) / 8.0)


def dirichlet_energy(u: CoreFunction, grid_n: int = DEFAULT_GRID_N) -> float:
    """
    Brownian energy ½∫u'(x)² dx by forward differences

    Each quotient (u(x+h) - u(x))/h is also the central difference at the cell
    midpoint x + h/2, so the sum is the midpoint rule for the central-difference
    energy on the half-shifted grid.

    The grid starts at the left end of the x-window of u and uses the step from
    fd_step, so no linear piece of s is narrower than eight cells. Nodes are
    processed in blocks to bound memory.

    Args:
        u: Core function
        grid_n: Minimum number of cells across the x-window

    Returns:
        ½Σ(Δu)²/h
    """
    if grid_n < 1:
        raise PreconditionError(f"grid_n must be positive, got {grid_n}")
    lo, hi = u.x_window
    if not hi > lo:
        return 0.0

    h = fd_step(u, grid_n)
    cells = int(np.ceil((hi - lo) / h))
    total = 0.0
    for start in range(0, cells, FD_BLOCK):
        stop = min(start + FD_BLOCK, cells)
        x = lo + h * np.arange(start, stop + 1, dtype=float)
        total += float(np.sum(np.diff(u.value(x)) ** 2))
    logger.debug(f"Dirichlet energy on {cells} cells with h={h:.3e}")
    return 0.5 * total / h


def verify_subspace_identity(u: CoreFunction, depths: Optional[Sequence[int]] = None,
                             grid_n: Union[int, Sequence[int]] = DEFAULT_GRID_N, quad_n: int = 256,
                             tolerance: Optional[float] = None) -> SubspaceIdentityReport:
    """
    Compare E^(s)(u, u) with ½D(u, u) under a depth sweep

    Args:
        u: Core function; its scale is rebuilt at every sweep depth
        depths: Sweep depths (Cantor families default to 6, 8, 10)
        grid_n: Minimum finite-difference cells, or one value per depth
        quad_n: Quadrature cells for E^(s)
        tolerance: Relative residual required at the finest depth

    Returns:
        SubspaceIdentityReport with per-depth residuals and the convergence flag
    """
    if tolerance is None:
        tolerance = DEFAULT_TOLERANCES["subspace_relative"]
    if depths is None:
        cantor = u.scale.family in (ScaleFamily.FAT_CANTOR, ScaleFamily.INVERSE_CANTOR)
        depths = DEFAULT_SWEEP_DEPTHS if cantor else (u.scale.depth,)

    grid_sizes = [int(grid_n)] * len(depths) if np.isscalar(grid_n) else [int(n) for n in grid_n]
    if len(grid_sizes) != len(depths):
        raise PreconditionError(f"{len(grid_sizes)} grid sizes for {len(depths)} depths")

    report = SubspaceIdentityReport(family=u.scale.family.value)
    for depth, cells in zip(depths, grid_sizes):
        member = u.at_depth(depth)
        e_s = energy_Es(member, quad_n)
        d = dirichlet_energy(member, cells)
        residual = abs(e_s - d) / max(e_s, np.finfo(float).tiny)
        report.depths.append(int(depth))
        report.grid_sizes.append(cells)
        report.energies_Es.append(e_s)
        report.energies_D.append(d)
        report.residuals.append(residual)
        logger.info(f"Subspace identity {report.family} depth={depth}: E_s={e_s:.10g} D={d:.10g} "
                    f"residual={residual:.3e}")

    report.monotone = all(
        later <= earlier * (1.0 + MONOTONE_SLACK) + 1e-15
        for earlier, later in zip(report.residuals, report.residuals[1:])
    )
    if not report.monotone:
        logger.warning(f"Residuals did not decrease across the sweep: {report.residuals}")
    report.converged = report.monotone and report.residual <= tolerance
    return report


def weak_generator_residual(u: CoreFunction, v: CoreFunction, quad_n: int = 256) -> float:
    """
    |E^(s)(u, v) + ∫(A u) v dx| with A u = ½φ''(s)·𝟙{x not flat}

    The generator term is integrated against ds, whose density is exactly the
    indicator of the complement of the flat set.

    Args:
        u: Core function with a piecewise-C² profile
        v: Core function on the same scale

    Returns:
        Absolute residual of the weak generator identity
    """
    if not u.scale.has_zero_one_slope:
        raise PreconditionError("weak generator identity needs a scale with slope in {0, 1}")
    if not u.profile.has_second_derivative:
        raise UnsupportedProfileError(
            f"{type(u.profile).__name__} is not piecewise C² with a continuous derivative",
            {"profile": u.profile.describe()},
        )
    form = energy_bilinear(u, v, quad_n)

    lo = min(u.x_window[0], v.x_window[0])
    hi = max(u.x_window[1], v.x_window[1])
    generator = 0.0
    if hi > lo:
        measure = stieltjes_measure(u.scale, (lo, hi))
        breakpoints = np.concatenate((u.x_breakpoints(), v.x_breakpoints()))
        integrand = lambda x: 0.5 * u.profile.second_derivative(u.scale.eval(x)) * v.value(x)  # noqa: E731
        generator = stieltjes_integrate(integrand, measure, quad_n, breakpoints)

    logger.debug(f"Weak generator: E(u,v)={form:.12g} <Au,v>={generator:.12g}")
    return abs(form + generator)


def energy_sweep(profile: Profile, scale: ScaleFunction, depths: Sequence[int],
                 grid_n: Union[int, Sequence[int]] = DEFAULT_GRID_N, quad_n: int = 256) -> pd.DataFrame:
    """
    Tabulate E^(s), ½D and their relative residual over depths

    Returns:
        DataFrame with columns family, depth, grid_n, E_s, D, residual
    """
    report = verify_subspace_identity(CoreFunction(profile, scale), depths, grid_n, quad_n)
    frame = pd.DataFrame({
        "family": report.family,
        "depth": report.depths,
        "grid_n": report.grid_sizes,
        "E_s": report.energies_Es,
        "D": report.energies_D,
        "residual": report.residuals,
    })
    return frame[SWEEP_COLUMNS]
