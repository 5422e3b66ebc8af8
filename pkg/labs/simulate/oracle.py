"""
Birth-death chain oracle for the subspace diffusion
Conductances from the scale function, speed weights from Lebesgue measure
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import spsolve

from labs.discrete import FiniteForm
from labs.errors import GridConstructionError, PreconditionError
from labs.scale import ScaleFunction

logger = logging.getLogger(__name__)


class ChainProblem(Enum):
    """Linear problems solved on the chain"""
    HIT_PROBABILITY = "hit_probability"
    EXPECTED_EXIT_TIME = "expected_exit_time"
    OCCUPATION_TIME = "occupation_time"


@dataclass(frozen=True, eq=False)
class ChainOracle:
    """
    Nearest-neighbour chain on x_0 < ... < x_n

    Conductances c_i = 1/(2(s(x_{i+1}) - s(x_i))) and speed weights
    m_i = (x_{i+1} - x_{i-1})/2 (half cells at the ends).
    """
    nodes: np.ndarray
    scale_values: np.ndarray

    def __post_init__(self):
        gaps = np.diff(self.scale_values)
        if self.nodes.size < 3:
            raise GridConstructionError("the chain needs at least one interior node")
        if np.any(~np.isfinite(gaps)) or np.any(gaps <= 0):
            raise GridConstructionError("zero conductance: scale values must increase strictly along the grid")

    @property
    def conductances(self) -> np.ndarray:
        return 0.5 / np.diff(self.scale_values)

    @property
    def speed_weights(self) -> np.ndarray:
        padded = np.concatenate(([self.nodes[0]], self.nodes, [self.nodes[-1]]))
        return 0.5 * (padded[2:] - padded[:-2])

    def index_of(self, x: float) -> int:
        index = int(np.searchsorted(self.nodes, x))
        if index >= self.nodes.size or self.nodes[index] != x:
            raise PreconditionError(f"{x} is not a grid point of the chain")
        if index == 0 or index == self.nodes.size - 1:
            raise PreconditionError(f"{x} is not strictly inside the chain")
        return index

    @classmethod
    def build(cls, s: ScaleFunction, a: float, b: float, n: int = 2000,
              include: Iterable[float] = ()) -> "ChainOracle":
        """
        Uniform grid on [a, b] plus the included points, merged along flat pieces of s

        A grid point whose scale value equals that of the previous kept point is
        dropped; a protected point (a, b or an included point) takes the place of
        an unprotected one.

        Args:
            s: Scale function
            a: Left end
            b: Right end
            n: Uniform cells
            include: Extra points that must be nodes

        Returns:
            ChainOracle
        """
        if not b > a:
            raise PreconditionError(f"chain needs a < b, got ({a}, {b})")
        protected = {float(a), float(b)} | {float(x) for x in include}
        candidates = np.unique(np.concatenate((np.linspace(a, b, n + 1), sorted(protected))))
        values = s.eval(candidates)

        kept_x, kept_s, kept_protected = [], [], []
        for x, value in zip(candidates, values):
            is_protected = float(x) in protected
            if kept_s and value <= kept_s[-1]:
                if not is_protected:
                    continue
                if kept_protected[-1]:
                    raise GridConstructionError(f"protected points {kept_x[-1]} and {x} share the scale value {value}")
                kept_x.pop()
                kept_s.pop()
                kept_protected.pop()
            kept_x.append(float(x))
            kept_s.append(float(value))
            kept_protected.append(is_protected)

        logger.debug(f"Chain oracle: {len(kept_x)} nodes kept from {candidates.size} candidates")
        return cls(nodes=np.asarray(kept_x), scale_values=np.asarray(kept_s))

    def finite_form(self) -> FiniteForm:
        """The chain as a finite Dirichlet form with J_{i,i+1} = c_i/2, k = 0, m = speed weights"""
        size = self.nodes.size
        half = 0.5 * self.conductances
        J = np.diag(half, 1) + np.diag(half, -1)
        return FiniteForm(tuple(range(size)), self.speed_weights, J, np.zeros(size))

    def _solve(self, rhs: np.ndarray, right_value: float) -> np.ndarray:
        """Solve Σ_j c_ij (f_j - f_i) = rhs_i on interior nodes with f(a) = 0, f(b) = right_value"""
        c = self.conductances
        main = -(c[:-1] + c[1:])
        system = diags([c[1:-1], main, c[1:-1]], [-1, 0, 1], format="csc")
        rhs = rhs.astype(float).copy()
        rhs[-1] -= c[-1] * right_value
        interior = spsolve(system, rhs)
        solution = np.concatenate(([0.0], np.atleast_1d(interior), [right_value]))
        if not np.all(np.isfinite(solution)):
            raise GridConstructionError("singular chain system")
        return solution


def chain_oracle_solve(oracle: ChainOracle, problem: ChainProblem, x0: float,
                       window: Optional[Tuple[float, float]] = None) -> float:
    """
    Solve a hitting, exit-time or occupation problem on the chain

    Args:
        oracle: Chain
        problem: Which linear problem
        x0: Grid point strictly inside
        window: Occupation window [c, d] for OCCUPATION_TIME

    Returns:
        P(hit b before a), E[exit time] or E[time in window before exit], from x0
    """
    index = oracle.index_of(x0)
    interior = slice(1, oracle.nodes.size - 1)
    if problem is ChainProblem.HIT_PROBABILITY:
        solution = oracle._solve(np.zeros(oracle.nodes.size - 2), 1.0)
    elif problem is ChainProblem.EXPECTED_EXIT_TIME:
        solution = oracle._solve(-oracle.speed_weights[interior], 0.0)
    elif problem is ChainProblem.OCCUPATION_TIME:
        if window is None:
            raise PreconditionError("occupation time needs a window")
        nodes = oracle.nodes[interior]
        inside = (nodes >= window[0]) & (nodes <= window[1])
        solution = oracle._solve(-oracle.speed_weights[interior] * inside, 0.0)
    else:
        raise PreconditionError(f"unknown chain problem {problem}")
    return float(solution[index])
