"""
Profile algebra for core functions u = φ∘s
Hat and bump profiles on the image interval J, plus scaling and unit contraction
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from scipy.optimize import brentq

from labs.errors import PreconditionError, UnsupportedProfileError

logger = logging.getLogger(__name__)

# Sampling density used to bracket level crossings of a clamped profile
CROSSING_SAMPLES = 4096


class Profile(ABC):
    """A compactly supported piecewise-C¹ function φ on the real line"""

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """Closed interval outside which φ vanishes"""

    @abstractmethod
    def value(self, y: np.ndarray) -> np.ndarray:
        """φ(y)"""

    @abstractmethod
    def derivative(self, y: np.ndarray) -> np.ndarray:
        """φ'(y), one-sided at breakpoints"""

    @property
    def has_second_derivative(self) -> bool:
        """Whether second_derivative is defined, i.e. φ is piecewise C² with φ' continuous"""
        return False

    def second_derivative(self, y: np.ndarray) -> np.ndarray:
        raise UnsupportedProfileError(f"{type(self).__name__} is not piecewise C² with a continuous derivative")

    def breakpoints(self) -> np.ndarray:
        """Points where φ' may fail to be smooth"""
        return np.asarray(self.support, dtype=float)

    def __call__(self, y):
        return self.value(np.asarray(y, dtype=float))

    def describe(self) -> Dict[str, Any]:
        return {"kind": type(self).__name__}


@dataclass(frozen=True)
class HatProfile(Profile):
    """Tent function on [p, q] peaking at the midpoint"""
    p: float
    q: float
    height: float = 1.0

    def __post_init__(self):
        if not self.q > self.p:
            raise PreconditionError(f"hat needs p < q, got ({self.p}, {self.q})")

    @property
    def support(self) -> Tuple[float, float]:
        return (self.p, self.q)

    @property
    def slope(self) -> float:
        return 2.0 * self.height / (self.q - self.p)

    def value(self, y):
        mid = 0.5 * (self.p + self.q)
        tent = self.height - self.slope * np.abs(np.asarray(y, dtype=float) - mid)
        return np.clip(tent, 0.0, None)

    def derivative(self, y):
        y = np.asarray(y, dtype=float)
        mid = 0.5 * (self.p + self.q)
        rising = (y >= self.p) & (y < mid)
        falling = (y >= mid) & (y < self.q)
        return np.where(rising, self.slope, np.where(falling, -self.slope, 0.0))

    def breakpoints(self):
        return np.array([self.p, 0.5 * (self.p + self.q), self.q])

    def describe(self):
        return {"kind": "hat", "p": self.p, "q": self.q, "height": self.height}


@dataclass(frozen=True)
class BumpProfile(Profile):
    """A·(1 - t²)² with t the affine map of [p, q] onto [-1, 1]; C¹ and piecewise C²"""
    p: float
    q: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.q > self.p:
            raise PreconditionError(f"bump needs p < q, got ({self.p}, {self.q})")

    @property
    def support(self) -> Tuple[float, float]:
        return (self.p, self.q)

    def _local(self, y):
        y = np.asarray(y, dtype=float)
        t = (2.0 * y - self.p - self.q) / (self.q - self.p)
        return t, np.abs(t) < 1.0

    def value(self, y):
        t, inside = self._local(y)
        return np.where(inside, self.amplitude * (1.0 - t ** 2) ** 2, 0.0)

    def derivative(self, y):
        t, inside = self._local(y)
        dt = 2.0 / (self.q - self.p)
        return np.where(inside, -4.0 * self.amplitude * t * (1.0 - t ** 2) * dt, 0.0)

    @property
    def has_second_derivative(self) -> bool:
        return True

    def second_derivative(self, y):
        t, inside = self._local(y)
        dt = 2.0 / (self.q - self.p)
        return np.where(inside, self.amplitude * (12.0 * t ** 2 - 4.0) * dt ** 2, 0.0)

    def describe(self):
        return {"kind": "bump", "p": self.p, "q": self.q, "amplitude": self.amplitude}


@dataclass(frozen=True)
class ScaledProfile(Profile):
    """c·φ"""
    base: Profile
    factor: float

    @property
    def support(self):
        return self.base.support

    def value(self, y):
        return self.factor * self.base.value(y)

    def derivative(self, y):
        return self.factor * self.base.derivative(y)

    @property
    def has_second_derivative(self) -> bool:
        return self.base.has_second_derivative

    def second_derivative(self, y):
        return self.factor * self.base.second_derivative(y)

    def breakpoints(self):
        return self.base.breakpoints()

    def describe(self):
        return {"kind": "scaled", "factor": self.factor, "base": self.base.describe()}


@dataclass(frozen=True)
class ClampedProfile(Profile):
    """Normal contraction clip(φ, lo, hi) with lo <= 0"""
    base: Profile
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.lo > 0.0 or self.hi < self.lo:
            raise PreconditionError(f"clamp needs lo <= 0 <= hi, got ({self.lo}, {self.hi})")

    @property
    def support(self):
        return self.base.support

    def value(self, y):
        return np.clip(self.base.value(y), self.lo, self.hi)

    def derivative(self, y):
        inner = self.base.value(y)
        active = (inner > self.lo) & (inner < self.hi)
        return np.where(active, self.base.derivative(y), 0.0)

    def breakpoints(self):
        p, q = self.support
        grid = np.unique(np.concatenate((np.linspace(p, q, CROSSING_SAMPLES), self.base.breakpoints())))
        crossings = []
        for level in (self.lo, self.hi):
            offset = self.base.value(grid) - level
            for i in np.flatnonzero(np.sign(offset[:-1]) * np.sign(offset[1:]) < 0):
                crossings.append(brentq(lambda y: float(self.base.value(y)) - level, grid[i], grid[i + 1]))
        return np.unique(np.concatenate((self.base.breakpoints(), np.asarray(crossings, dtype=float))))

    def describe(self):
        return {"kind": "clamped", "lo": self.lo, "hi": self.hi, "base": self.base.describe()}


def profile_from_descriptor(descriptor: Dict[str, Any]) -> Profile:
    """Build a profile from the JSON form emitted by Profile.describe"""
    kind = descriptor.get("kind")
    if kind == "hat":
        return HatProfile(descriptor["p"], descriptor["q"], descriptor.get("height", 1.0))
    if kind == "bump":
        return BumpProfile(descriptor["p"], descriptor["q"], descriptor.get("amplitude", 1.0))
    if kind == "scaled":
        return ScaledProfile(profile_from_descriptor(descriptor["base"]), descriptor["factor"])
    if kind == "clamped":
        return ClampedProfile(profile_from_descriptor(descriptor["base"]),
                              descriptor.get("lo", 0.0), descriptor.get("hi", 1.0))
    raise PreconditionError(f"unknown profile kind: {kind}")
