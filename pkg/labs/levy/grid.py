"""
Functions sampled on a uniform grid over a box
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from labs.errors import PreconditionError

logger = logging.getLogger(__name__)

# Largest admissible |u| on the outer layer of a non-periodic grid, relative to max |u|
BOUNDARY_ATOL = 1e-12

Bounds = Union[float, Sequence[float]]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """
    Samples u(lower + j·h) for j = 0..n-1 in every axis, h = (upper - lower)/n

    A non-periodic grid function must vanish on the boundary layer; a periodic
    one is a function on the torus spanned by the box.
    """
    values: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        d = values.ndim
        lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (d,)).copy()
        upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (d,)).copy()
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if np.any(upper <= lower):
            raise PreconditionError(f"box needs lower < upper, got {lower} and {upper}")
        if not self.periodic:
            scale = max(1.0, float(np.abs(values).max()) if values.size else 0.0)
            if self.boundary_max() > BOUNDARY_ATOL * scale:
                raise PreconditionError(
                    "grid function does not vanish on the boundary layer",
                    {"boundary_max": self.boundary_max()},
                )

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def spacing(self) -> np.ndarray:
        return (self.upper - self.lower) / np.asarray(self.shape, dtype=float)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def nodes(self, axis: int) -> np.ndarray:
        return self.lower[axis] + self.spacing[axis] * np.arange(self.shape[axis])

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        return np.meshgrid(*(self.nodes(k) for k in range(self.dim)), indexing="ij")

    def boundary_max(self) -> float:
        layer = 0.0
        for axis in range(self.dim):
            edges = np.take(self.values, [0, -1], axis=axis)
            layer = max(layer, float(np.abs(edges).max()))
        return layer

    def support_mask(self, atol: float = 0.0) -> np.ndarray:
        return np.abs(self.values) > atol

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def same_grid(self, other: "GridFunction") -> bool:
        return (self.shape == other.shape and self.periodic == other.periodic
                and np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(values, self.lower, self.upper, self.periodic)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self.with_values(self.values - other.values)

    def __mul__(self, factor: float) -> "GridFunction":
        return self.with_values(factor * self.values)

    __rmul__ = __mul__

    @classmethod
    def from_function(cls, f: Callable[..., np.ndarray], lower: Bounds, upper: Bounds,
                      n: Union[int, Sequence[int]], dim: Optional[int] = None,
                      periodic: bool = False) -> "GridFunction":
        """
        Sample f on the grid

        Args:
            f: Callable taking one coordinate array per axis (meshgrid, 'ij' indexing)
            lower: Lower corner (scalar broadcasts)
            upper: Upper corner
            n: Nodes per axis
            dim: Dimension when lower, upper and n are all scalars

        Returns:
            GridFunction of the samples
        """
        sizes = [np.size(lower), np.size(upper), np.size(n)]
        d = dim or max(sizes)
        lower = np.broadcast_to(np.asarray(lower, dtype=float), (d,))
        upper = np.broadcast_to(np.asarray(upper, dtype=float), (d,))
        counts = np.broadcast_to(np.asarray(n, dtype=int), (d,))
        axes = [lower[k] + (upper[k] - lower[k]) / counts[k] * np.arange(counts[k]) for k in range(d)]
        coords = np.meshgrid(*axes, indexing="ij")
        return cls(np.asarray(f(*coords), dtype=float), lower, upper, periodic)

    @classmethod
    def gaussian(cls, center: Sequence[float], sigma: float, lower: Bounds, upper: Bounds,
                 n: Union[int, Sequence[int]], amplitude: float = 1.0) -> "GridFunction":
        """A·exp(-|x - c|²/(2σ²))"""
        c = np.atleast_1d(np.asarray(center, dtype=float))

        def f(*coords):
            r2 = sum((x - ck) ** 2 for x, ck in zip(coords, c))
            return amplitude * np.exp(-r2 / (2.0 * sigma ** 2))

        return cls.from_function(f, lower, upper, n, dim=c.size)

    @classmethod
    def smooth_bump(cls, center: Sequence[float], radius: float, lower: Bounds, upper: Bounds,
                    n: Union[int, Sequence[int]], amplitude: float = 1.0) -> "GridFunction":
        """A·exp(-1/(1 - r²)) for r = |x - c|/radius < 1, zero elsewhere"""
        c = np.atleast_1d(np.asarray(center, dtype=float))

        def f(*coords):
            r2 = sum((x - ck) ** 2 for x, ck in zip(coords, c)) / radius ** 2
            inside = r2 < 1.0
            return np.where(inside, amplitude * np.exp(-1.0 / np.where(inside, 1.0 - r2, 1.0)), 0.0)

        return cls.from_function(f, lower, upper, n, dim=c.size)
