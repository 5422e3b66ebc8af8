"""
Cantor function by exact ternary digit extraction
"""

import logging
from typing import Tuple, Union

import numpy as np

from labs.errors import PreconditionError

logger = logging.getLogger(__name__)

# x in [0, 1) is scaled to an integer numerator over 2**61; 3 * numerator still fits in int64
_FRACTION_BITS = 61
_FRACTION_MASK = (1 << _FRACTION_BITS) - 1

# Points within SNAP_ULPS ulp of k / 3**m, 0 < k < 3**m, m <= SNAP_MAX_POWER, read as that rational
SNAP_MAX_POWER = 20
SNAP_ULPS = 4.0

ArrayLike = Union[float, np.ndarray]


def triadic_snap(x: np.ndarray, depth: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Find points that are the float nearest to a triadic rational k / 3**m

    The smallest m <= min(depth, SNAP_MAX_POWER) wins, so 1/3 snaps to (1, 1)
    and 1/9 to (1, 2).

    Returns:
        (snapped mask, numerators k, powers m); k and m are 0 where not snapped
    """
    x = np.asarray(x, dtype=float)
    snapped = np.zeros(x.shape, dtype=bool)
    numerators = np.zeros(x.shape, dtype=np.int64)
    powers = np.zeros(x.shape, dtype=np.int64)
    tolerance = SNAP_ULPS * np.spacing(x)
    for m in range(1, min(depth, SNAP_MAX_POWER) + 1):
        denominator = 3.0 ** m
        k = np.rint(x * denominator)
        near = ~snapped & (k > 0) & (k < denominator) & (np.abs(x - k / denominator) <= tolerance)
        numerators[near] = k[near].astype(np.int64)
        powers[near] = m
        snapped |= near
    return snapped, numerators, powers


def ternary_digits(x: np.ndarray, depth: int) -> np.ndarray:
    """
    Leading ternary digits of points in [0, 1)

    Points snapped by triadic_snap get the terminating expansion of k / 3**m;
    all others are expanded exactly from their binary value.

    Args:
        x: Points in [0, 1)
        depth: Number of digits

    Returns:
        Integer array of shape (depth,) + x.shape
    """
    x = np.asarray(x, dtype=float)
    numerator = np.floor(np.ldexp(x, _FRACTION_BITS)).astype(np.int64)
    digits = np.empty((depth,) + numerator.shape, dtype=np.int64)
    for k in range(depth):
        numerator = numerator * 3
        digits[k] = numerator >> _FRACTION_BITS
        numerator = numerator & _FRACTION_MASK

    snapped, numerators, powers = triadic_snap(x, depth)
    if np.any(snapped):
        k_snapped = numerators[snapped]
        m_snapped = powers[snapped]
        for position in range(depth):
            place = m_snapped - 1 - position
            column = np.zeros(k_snapped.shape, dtype=np.int64)
            live = place >= 0
            column[live] = (k_snapped[live] // np.power(3, place[live], dtype=np.int64)) % 3
            digits[position][snapped] = column
    return digits


def cantor_function(x: ArrayLike, depth: int) -> ArrayLike:
    """
    Depth-truncated Cantor function c_n

    The first ternary digit equal to 1 at position k <= depth ends the expansion
    with 2**-k; otherwise digits 2 contribute 2**-k each. Points below 0 map to 0
    and points at or above 1 map to 1. The float nearest a triadic rational is
    read as that rational, so c_n(1/3) is exactly 1/2.

    Args:
        x: Point or array of points
        depth: Number of ternary digits read (>= 1)

    Returns:
        c_n(x), same shape as x
    """
    if depth < 1:
        raise PreconditionError(f"depth must be >= 1, got {depth}")

    scalar = np.ndim(x) == 0
    points = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.where(points >= 1.0, 1.0, 0.0)

    inside = (points > 0.0) & (points < 1.0)
    if np.any(inside):
        digits = ternary_digits(points[inside], depth)
        value = np.zeros(digits.shape[1:])
        done = np.zeros(digits.shape[1:], dtype=bool)
        for k in range(depth):
            weight = 2.0 ** -(k + 1)
            stop = ~done & (digits[k] == 1)
            value[stop | (~done & (digits[k] == 2))] += weight
            done |= stop
        out[inside] = value

    return float(out[0]) if scalar else out.reshape(np.shape(x))
