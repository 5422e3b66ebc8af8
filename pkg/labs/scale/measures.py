"""
Lebesgue-Stieltjes measures of monotone functions
Piecewise-constant density plus atoms at finite construction depth
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from labs.errors import PreconditionError
from labs.scale.functions import InverseScale, ScaleFamily, ScaleFunction
from labs.settings import GAUSS_POINTS

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MonotoneMeasure:
    """
    dF for a monotone F on a window

    density_values[i] is the Lebesgue density on [density_edges[i], density_edges[i+1]);
    atoms are (location, mass) pairs with nonnegative mass.
    """
    density_edges: np.ndarray
    density_values: np.ndarray
    atom_locations: np.ndarray
    atom_masses: np.ndarray
    depth: Optional[int] = None

    def __post_init__(self):
        if np.any(self.density_values < 0) or np.any(self.atom_masses < 0):
            raise PreconditionError("measure masses must be nonnegative")
        if self.density_edges.size and self.density_values.size != self.density_edges.size - 1:
            raise PreconditionError("density needs one value per cell")
        order = np.argsort(self.atom_locations, kind="stable")
        object.__setattr__(self, "atom_locations", self.atom_locations[order])
        object.__setattr__(self, "atom_masses", self.atom_masses[order])
        object.__setattr__(self, "_atom_cumulative",
                           np.concatenate(([0.0], np.cumsum(self.atom_masses))))

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        return list(zip(self.atom_locations.tolist(), self.atom_masses.tolist()))

    @property
    def window(self) -> Tuple[float, float]:
        if self.density_edges.size:
            return float(self.density_edges[0]), float(self.density_edges[-1])
        return float(self.atom_locations.min()), float(self.atom_locations.max())

    def density_at(self, y: Union[float, np.ndarray]) -> np.ndarray:
        """Lebesgue density at y (zero outside the window)"""
        points = np.asarray(y, dtype=float)
        if self.density_edges.size == 0:
            return np.zeros(points.shape)
        index = np.searchsorted(self.density_edges, points, side="right") - 1
        inside = (index >= 0) & (index < self.density_values.size)
        return np.where(inside, self.density_values[np.clip(index, 0, self.density_values.size - 1)], 0.0)

    def cumulative_atom_mass(self, y: Union[float, np.ndarray]) -> np.ndarray:
        """Total atom mass at locations <= y"""
        index = np.searchsorted(self.atom_locations, np.asarray(y, dtype=float), side="right")
        return self._atom_cumulative[index]

    def atom_mass_between(self, lo: Union[float, np.ndarray], hi: Union[float, np.ndarray]) -> np.ndarray:
        """Total atom mass at locations in the closed interval [lo, hi] (vectorized)"""
        upper = np.searchsorted(self.atom_locations, np.asarray(hi, dtype=float), side="right")
        lower = np.searchsorted(self.atom_locations, np.asarray(lo, dtype=float), side="left")
        return np.where(upper > lower, self._atom_cumulative[upper] - self._atom_cumulative[lower], 0.0)

    def lebesgue_mass(self, a: float, b: float) -> float:
        """Integral of the density over [a, b]"""
        if self.density_edges.size == 0:
            return 0.0
        lo = np.clip(self.density_edges[:-1], a, b)
        hi = np.clip(self.density_edges[1:], a, b)
        return float(np.sum(self.density_values * (hi - lo)))

    def mass(self, a: float, b: float) -> float:
        """μ([a, b))"""
        atoms = self._atom_cumulative[np.searchsorted(self.atom_locations, b, side="left")] \
            - self._atom_cumulative[np.searchsorted(self.atom_locations, a, side="left")]
        return self.lebesgue_mass(a, b) + float(atoms)

    def total_mass(self) -> float:
        return self.lebesgue_mass(-np.inf, np.inf) + float(self._atom_cumulative[-1])


def stieltjes_measure(F: Union[ScaleFunction, InverseScale], window: Tuple[float, float],
                      depth: Optional[int] = None) -> MonotoneMeasure:
    """
    Build ds or ds^-1 on a window

    Args:
        F: A ScaleFunction (measure ds in x) or its InverseScale (measure ds^-1 in y)
        window: Interval [a, b] in the variable of F
        depth: Construction depth; rebuilds the scale when it differs from F's

    Returns:
        MonotoneMeasure with total mass F(b) - F(a)
    """
    a, b = float(window[0]), float(window[1])
    if not b > a:
        raise PreconditionError(f"stieltjes_measure needs a < b, got {window}")

    inverse = isinstance(F, InverseScale)
    scale = F.scale if inverse else F
    if depth is not None and depth != scale.depth:
        scale = scale.at_depth(depth)

    if not inverse:
        edges = np.unique(np.concatenate(([a, b], scale.breakpoints((a, b)))))
        midpoints = 0.5 * (edges[:-1] + edges[1:])
        values = scale.derivative(midpoints)
        measure = MonotoneMeasure(edges, values, np.empty(0), np.empty(0), scale.depth)
    else:
        density = 1.0 / scale.slope
        if scale.family is ScaleFamily.AFFINE_SLOPE or scale.gap_count == 0:
            locations = np.empty(0)
            masses = np.empty(0)
        else:
            levels = scale._levels()
            keep = (levels >= a) & (levels < b)
            locations = levels[keep]
            masses = scale.gap_length[keep]
        measure = MonotoneMeasure(np.array([a, b]), np.array([density]), locations, masses, scale.depth)

    logger.debug(f"Stieltjes measure on {window}: {measure.atom_masses.size} atoms, "
                 f"total mass {measure.total_mass():.6g}")
    return measure


def stieltjes_integrate(g: Callable[[np.ndarray], np.ndarray], measure: MonotoneMeasure,
                        quad_n: int = 256, breakpoints: Optional[Sequence[float]] = None) -> float:
    """
    ∫ g dμ by composite Gauss-Legendre on the density plus a sum over atoms

    Args:
        g: Vectorized integrand
        measure: The measure μ
        quad_n: Number of uniform cells laid over the window
        breakpoints: Extra cell boundaries where g has kinks

    Returns:
        The integral
    """
    total = 0.0
    if measure.density_edges.size:
        lo, hi = measure.window
        cells = [np.linspace(lo, hi, quad_n + 1), measure.density_edges]
        if breakpoints is not None:
            extra = np.asarray(breakpoints, dtype=float)
            cells.append(extra[(extra > lo) & (extra < hi)])
        edges = np.unique(np.concatenate(cells))
        nodes, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
        half = 0.5 * np.diff(edges)
        centre = 0.5 * (edges[:-1] + edges[1:])
        points = centre[:, None] + half[:, None] * nodes[None, :]
        values = g(points) * measure.density_at(centre)[:, None]
        total = float(np.einsum("ij,j,i->", values, weights, half))
    if measure.atom_masses.size:
        total += float(np.dot(g(measure.atom_locations), measure.atom_masses))
    return total


def cantor_measure(depth: int) -> MonotoneMeasure:
    """
    Depth-n Cantor measure on [0, 1]

    One atom of mass 2^-n at the centre of each surviving triadic interval.

    Args:
        depth: n >= 1

    Returns:
        Purely atomic MonotoneMeasure
    """
    if depth < 1:
        raise PreconditionError(f"depth must be >= 1, got {depth}")
    lefts = np.zeros(1)
    for k in range(1, depth + 1):
        lefts = np.concatenate((lefts, lefts + 2.0 * 3.0 ** -k))
    centres = lefts + 0.5 * 3.0 ** -depth
    return MonotoneMeasure(
        density_edges=np.empty(0),
        density_values=np.empty(0),
        atom_locations=centres,
        atom_masses=np.full(centres.size, 2.0 ** -depth),
        depth=depth,
    )


def lebesgue_measure(window: Tuple[float, float]) -> MonotoneMeasure:
    """Lebesgue measure dx restricted to a window"""
    a, b = float(window[0]), float(window[1])
    if not b > a:
        raise PreconditionError(f"lebesgue_measure needs a < b, got {window}")
    return MonotoneMeasure(np.array([a, b]), np.ones(1), np.empty(0), np.empty(0))
