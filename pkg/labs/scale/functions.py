"""
Scale functions with a.e. derivative in {0, 1}
Fat-Cantor and inverse-Cantor constructions, plus the identity and the
affine counterexample family
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from labs.errors import ConstructionError, DomainError, NumericConsistencyError, PreconditionError
from labs.scale.cantor import cantor_function
from labs.settings import BISECTION_MAX_ITER, BISECTION_TOLERANCE

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class ScaleFamily(Enum):
    """Constructive families of scale functions"""
    FAT_CANTOR = "fat_cantor"
    INVERSE_CANTOR = "inverse_cantor"
    IDENTITY = "identity"
    AFFINE_SLOPE = "affine_slope"


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScaleFunction:
    """
    Strictly increasing (in the depth limit) continuous s with s' in {0, 1} a.e.

    The finite-depth representation is exact: s has slope `slope` off a sorted
    list of disjoint flat intervals (gaps) and slope 0 on them. Outside the
    construction window s continues with the same slope, and s(anchor) = 0.
    """
    family: ScaleFamily
    domain_interval: Tuple[float, float]
    anchor: float
    depth: int
    parameters: Dict[str, float] = field(default_factory=dict)
    gap_left: np.ndarray = field(default_factory=lambda: np.empty(0))
    gap_right: np.ndarray = field(default_factory=lambda: np.empty(0))
    gap_length: np.ndarray = field(default_factory=lambda: np.empty(0))
    gap_level: np.ndarray = field(default_factory=lambda: np.empty(0))
    slope: float = 1.0

    def __post_init__(self):
        for name in ("gap_left", "gap_right", "gap_length", "gap_level"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        cumulative = np.concatenate(([0.0], np.cumsum(self.gap_length)))
        object.__setattr__(self, "_cumulative", _frozen(cumulative))
        object.__setattr__(self, "_offset", 0.0)
        object.__setattr__(self, "_offset", float(self._raw(np.array([self.anchor]))[0]))

    # ------------------------------------------------------------------
    # bookkeeping
    # ------------------------------------------------------------------

    @property
    def has_zero_one_slope(self) -> bool:
        """True for the families whose derivative is 0 or 1 a.e."""
        return self.family is not ScaleFamily.AFFINE_SLOPE

    @property
    def gap_count(self) -> int:
        return int(self.gap_left.size)

    @property
    def total_flat_mass(self) -> float:
        return float(self._cumulative[-1])

    def _flat_upto(self, x: np.ndarray) -> np.ndarray:
        """Lebesgue measure of the flat set in (-inf, x]"""
        if self.gap_count == 0:
            return np.zeros_like(x)
        index = np.searchsorted(self.gap_left, x, side="right") - 1
        safe = np.clip(index, 0, None)
        partial = np.clip(x - self.gap_left[safe], 0.0, self.gap_length[safe])
        return np.where(index >= 0, self._cumulative[safe] + partial, 0.0)

    def flat_mass(self, a: float, b: float) -> float:
        """
        Exact measure of E_s in [a, b]

        Args:
            a: Left end
            b: Right end (>= a)

        Returns:
            |E_s ∩ [a, b]| from the gap representation
        """
        if b < a:
            raise PreconditionError(f"flat_mass needs a <= b, got ({a}, {b})")
        upto = self._flat_upto(np.array([a, b], dtype=float))
        return float(upto[1] - upto[0])

    def gaps(self, window: Optional[Tuple[float, float]] = None) -> np.ndarray:
        """Gaps intersecting the window as rows (left, right, level)"""
        rows = np.column_stack((self.gap_left, self.gap_right, self.gap_level))
        if window is None:
            return rows
        lo, hi = window
        keep = (self.gap_right > lo) & (self.gap_left < hi)
        return rows[keep]

    def breakpoints(self, window: Tuple[float, float]) -> np.ndarray:
        """Gap endpoints strictly inside the window"""
        lo, hi = window
        points = np.concatenate((self.gap_left, self.gap_right))
        return np.unique(points[(points > lo) & (points < hi)])

    def min_piece_width(self, window: Tuple[float, float]) -> float:
        """
        Narrowest complete linear piece of s (flat or sloped) between breakpoints in the window

        Pieces cut by the window ends are not counted; with fewer than two
        breakpoints the window width is returned.
        """
        lo, hi = window
        widths = np.diff(self.breakpoints(window))
        widths = widths[widths > 0]
        return float(widths.min()) if widths.size else float(hi - lo)

    def flat_indicator(self, x: ArrayLike) -> np.ndarray:
        """True where x lies in a flat interval [left, right)"""
        points = np.asarray(x, dtype=float)
        if self.gap_count == 0:
            return np.zeros(points.shape, dtype=bool)
        index = np.searchsorted(self.gap_left, points, side="right") - 1
        safe = np.clip(index, 0, None)
        return (index >= 0) & (points < self.gap_right[safe])

    def derivative(self, x: ArrayLike) -> np.ndarray:
        """a.e. derivative s'(x)"""
        return np.where(self.flat_indicator(x), 0.0, self.slope)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    def _raw(self, x: np.ndarray) -> np.ndarray:
        if self.family is ScaleFamily.INVERSE_CANTOR:
            return _bisect_inverse_cantor(x, self.depth)
        if self.family is ScaleFamily.AFFINE_SLOPE:
            return self.slope * x
        return x - self._flat_upto(x)

    def eval(self, x: ArrayLike) -> ArrayLike:
        """
        Evaluate s

        Args:
            x: Point or array of points

        Returns:
            s(x), same shape as x
        """
        points = np.asarray(x, dtype=float)
        values = self._raw(np.atleast_1d(points)) - self._offset
        return float(values[0]) if points.ndim == 0 else values.reshape(points.shape)

    __call__ = eval

    def range(self) -> Tuple[float, float]:
        """J = s(I) for the domain interval I"""
        a, b = self.domain_interval
        values = self.eval(np.array([a, b]))
        return float(values[0]), float(values[1])

    def _levels(self) -> np.ndarray:
        """s-value of every flat interval"""
        return self.gap_left - self._cumulative[:-1] - self._offset

    def inverse_eval(self, y: ArrayLike, strict: bool = True, side: str = "left") -> ArrayLike:
        """
        Evaluate s^-1 with an endpoint tie-break on flat levels

        Args:
            y: Point or array of points
            strict: Raise DomainError for y outside s(I)
            side: "left" for the smallest x with s(x) = y, "right" for the largest

        Returns:
            The chosen endpoint of the preimage of y
        """
        if side not in ("left", "right"):
            raise PreconditionError(f"side must be 'left' or 'right', got {side!r}")
        values = np.asarray(y, dtype=float)
        flat = np.atleast_1d(values)
        if strict:
            lo, hi = self.range()
            slack = BISECTION_TOLERANCE * max(1.0, abs(lo), abs(hi))
            if np.any(flat < lo - slack) or np.any(flat > hi + slack):
                raise DomainError(
                    f"inverse_eval outside range [{lo}, {hi}]",
                    {"min": float(flat.min()), "max": float(flat.max())},
                )
        if self.family is ScaleFamily.AFFINE_SLOPE:
            x = (flat + self._offset) / self.slope
        else:
            index = np.searchsorted(self._levels(), flat, side=side)
            x = flat + self._offset + self._cumulative[index]
        return float(x[0]) if values.ndim == 0 else x.reshape(values.shape)

    def inverse(self) -> "InverseScale":
        return InverseScale(self)

    def at_depth(self, depth: int) -> "ScaleFunction":
        """Same family and parameters rebuilt at another depth"""
        if self.family is ScaleFamily.FAT_CANTOR:
            return build_fat_cantor(self.parameters["flat_fraction"], depth, anchor=self.anchor)
        if self.family is ScaleFamily.INVERSE_CANTOR:
            return build_inverse_cantor(depth, anchor=self.anchor)
        return self

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def descriptor(self) -> Dict[str, Any]:
        return {
            "family": self.family.value,
            "parameters": dict(self.parameters),
            "depth": self.depth,
            "anchor": self.anchor,
            "domain_interval": [float(v) for v in self.domain_interval],
        }

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)

    @classmethod
    def from_json(cls, document: Union[str, Dict[str, Any]]) -> "ScaleFunction":
        return scale_from_descriptor(json.loads(document) if isinstance(document, str) else document)

    def gaps_to_csv(self, path: str) -> None:
        """Write the gap list as CSV rows (left, right, level)"""
        frame = pd.DataFrame(self.gaps(), columns=["left", "right", "level"])
        frame["level"] = frame["level"].astype(int)
        frame.to_csv(path, index=False, lineterminator="\n", float_format="%.17g")


@dataclass(frozen=True, eq=False)
class InverseScale:
    """s^-1 viewed as a monotone function on J"""
    scale: ScaleFunction

    def eval(self, y: ArrayLike) -> ArrayLike:
        return self.scale.inverse_eval(y, strict=False)

    __call__ = eval


def _bisect_inverse_cantor(x: np.ndarray, depth: int) -> np.ndarray:
    """
    Solve sup{y in [0, 1] : c_n(y) + y <= x} by monotone bisection

    Outside [0, 2] the scale continues with slope 1.
    """
    x = np.asarray(x, dtype=float)
    out = np.where(x <= 0.0, x, 1.0 + (x - 2.0))
    inside = (x > 0.0) & (x < 2.0)
    if not np.any(inside):
        return out

    target = x[inside]
    lo = np.zeros_like(target)
    hi = np.ones_like(target)
    for _ in range(BISECTION_MAX_ITER):
        if np.max(hi - lo) <= BISECTION_TOLERANCE:
            break
        mid = 0.5 * (lo + hi)
        below = cantor_function(mid, depth) + mid <= target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    else:
        raise NumericConsistencyError(
            "inverse-Cantor bisection did not converge",
            {"width": float(np.max(hi - lo)), "depth": depth},
        )
    out[inside] = 0.5 * (lo + hi)
    return out


def build_fat_cantor(flat_fraction: float, depth: int, anchor: float = 0.0) -> ScaleFunction:
    """
    Smith-Volterra-Cantor scale function on [0, 1]

    Step k removes a centred open interval of length λ·2^(1-2k) from each of
    the 2^(k-1) surviving intervals; s is flat on the removed intervals, so the
    flat mass at depth n is λ(1 - 2^-n).

    Args:
        flat_fraction: λ in (0, 1)
        depth: n >= 1
        anchor: Point where s vanishes

    Returns:
        ScaleFunction of the FAT_CANTOR family
    """
    if not 0.0 < flat_fraction < 1.0:
        raise PreconditionError(f"flat fraction must lie in (0, 1), got {flat_fraction}")
    if depth < 1:
        raise PreconditionError(f"depth must be >= 1, got {depth}")

    surviving: List[Tuple[float, float]] = [(0.0, 1.0)]
    left: List[float] = []
    right: List[float] = []
    length: List[float] = []
    level: List[int] = []
    for step in range(1, depth + 1):
        removed = flat_fraction * 2.0 ** (1 - 2 * step)
        children = []
        for a, b in surviving:
            if removed >= b - a:
                raise ConstructionError(
                    f"removed length {removed} exceeds interval length {b - a} at step {step}",
                    {"step": step, "interval": (a, b)},
                )
            centre = 0.5 * (a + b)
            gap = (centre - 0.5 * removed, centre + 0.5 * removed)
            left.append(gap[0])
            right.append(gap[1])
            length.append(removed)
            level.append(step)
            children.extend([(a, gap[0]), (gap[1], b)])
        surviving = children

    order = np.argsort(left)
    logger.debug(f"Built fat-Cantor scale λ={flat_fraction} depth={depth} with {len(left)} gaps")
    return ScaleFunction(
        family=ScaleFamily.FAT_CANTOR,
        domain_interval=(0.0, 1.0),
        anchor=anchor,
        depth=depth,
        parameters={"flat_fraction": flat_fraction},
        gap_left=np.asarray(left)[order],
        gap_right=np.asarray(right)[order],
        gap_length=np.asarray(length)[order],
        gap_level=np.asarray(level, dtype=float)[order],
    )


def build_inverse_cantor(depth: int, anchor: float = 0.0) -> ScaleFunction:
    """
    Scale function on [0, 2] defined by s^-1(y) = c_n(y) + y

    c_n jumps by 2^-n at the left end of every removed triadic interval of
    level <= n and at y = 1; s is flat on the matching x-intervals.

    Args:
        depth: n >= 1
        anchor: Point where s vanishes

    Returns:
        ScaleFunction of the INVERSE_CANTOR family
    """
    if depth < 1:
        raise PreconditionError(f"depth must be >= 1, got {depth}")

    jump = 2.0 ** -depth
    # (y-left, y-right, c at y-left, c at y-right)
    surviving = [(0.0, 1.0, 0.0, 1.0)]
    jumps: List[Tuple[float, float, int]] = [(1.0, 1.0, 0)]
    for step in range(1, depth + 1):
        children = []
        for a, b, ca, cb in surviving:
            third = (b - a) / 3.0
            plateau = 0.5 * (ca + cb)
            jumps.append((a + third, plateau, step))
            children.extend([(a, a + third, ca, plateau), (b - third, b, plateau, cb)])
        surviving = children

    jumps.sort()
    left = np.array([y + c - jump for y, c, _ in jumps])
    levels = np.array([lvl if lvl else depth for _, _, lvl in jumps], dtype=float)
    logger.debug(f"Built inverse-Cantor scale depth={depth} with {len(jumps)} flat intervals")
    return ScaleFunction(
        family=ScaleFamily.INVERSE_CANTOR,
        domain_interval=(0.0, 2.0),
        anchor=anchor,
        depth=depth,
        parameters={},
        gap_left=left,
        gap_right=left + jump,
        gap_length=np.full(left.size, jump),
        gap_level=levels,
    )


def build_identity(domain_interval: Tuple[float, float] = (0.0, 1.0),
                   anchor: Optional[float] = None) -> ScaleFunction:
    """Brownian scale s(x) = x - anchor"""
    return ScaleFunction(
        family=ScaleFamily.IDENTITY,
        domain_interval=tuple(domain_interval),
        anchor=domain_interval[0] if anchor is None else anchor,
        depth=0,
    )


def build_affine_slope(slope: float, domain_interval: Tuple[float, float] = (0.0, 1.0),
                       anchor: Optional[float] = None) -> ScaleFunction:
    """
    Counterexample s(x) = c·(x - anchor) with c in (0, 1]

    Its derivative is not in {0, 1}, so it does not give a regular subspace.
    """
    if not 0.0 < slope <= 1.0:
        raise PreconditionError(f"affine slope must lie in (0, 1], got {slope}")
    return ScaleFunction(
        family=ScaleFamily.AFFINE_SLOPE,
        domain_interval=tuple(domain_interval),
        anchor=domain_interval[0] if anchor is None else anchor,
        depth=0,
        parameters={"slope": slope},
        slope=slope,
    )


def scale_from_descriptor(descriptor: Dict[str, Any]) -> ScaleFunction:
    """Build a ScaleFunction from {family, parameters, depth, anchor}"""
    try:
        family = ScaleFamily(descriptor["family"])
    except (KeyError, ValueError) as e:
        raise PreconditionError(f"unknown scale family in {descriptor}") from e

    parameters = descriptor.get("parameters", {})
    depth = int(descriptor.get("depth", 0))
    anchor = descriptor.get("anchor")
    interval = tuple(descriptor.get("domain_interval", (0.0, 1.0)))

    if family is ScaleFamily.FAT_CANTOR:
        return build_fat_cantor(parameters["flat_fraction"], depth, anchor=anchor or 0.0)
    if family is ScaleFamily.INVERSE_CANTOR:
        return build_inverse_cantor(depth, anchor=anchor or 0.0)
    if family is ScaleFamily.AFFINE_SLOPE:
        return build_affine_slope(parameters["slope"], interval, anchor)
    return build_identity(interval, anchor)
