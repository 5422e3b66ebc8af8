"""
Finite-state symmetric Dirichlet forms
Beurling-Deny triple (m, J, k) and its matrix Q with E(u, v) = uᵀQv
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Hashable, Optional, Sequence, Tuple, Union

import numpy as np

from labs.errors import NotMarkovianError, PreconditionError

logger = logging.getLogger(__name__)

# Random fixtures use multiples of 1/DYADIC_DENOMINATOR so every sum is exact in binary
DYADIC_DENOMINATOR = 16


@dataclass(frozen=True, eq=False)
class FiniteForm:
    """
    E(u, v) = Σ_{x<y} 2J_xy (u_x - u_y)(v_x - v_y) + Σ_x k_x u_x v_x on L²(m)
    """
    states: Tuple[Hashable, ...]
    m: np.ndarray
    J: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        states = tuple(self.states)
        n = len(states)
        m = np.asarray(self.m, dtype=float).reshape(-1)
        J = np.asarray(self.J, dtype=float).reshape(n, n)
        k = np.asarray(self.k, dtype=float).reshape(-1)
        for name, value in (("states", states), ("m", m), ("J", J), ("k", k)):
            object.__setattr__(self, name, value)

        if len(set(states)) != n:
            raise PreconditionError("state labels must be distinct")
        if m.size != n or k.size != n:
            raise PreconditionError(f"m and k need {n} entries, got {m.size} and {k.size}")
        if np.any(m <= 0):
            raise PreconditionError("reference weights m must be strictly positive")
        if np.any(k < 0):
            raise PreconditionError("killing weights k must be nonnegative")
        if not np.array_equal(J, J.T):
            raise PreconditionError("jump matrix J must be symmetric")
        if np.any(np.diag(J) != 0):
            raise PreconditionError("jump matrix J must have zero diagonal")
        if np.any(J < 0):
            raise PreconditionError("jump intensities must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state: Hashable) -> int:
        return self.states.index(state)

    def reconstruct(self) -> np.ndarray:
        """Matrix Q of the induced form"""
        Q = -2.0 * self.J
        np.fill_diagonal(Q, 2.0 * self.J.sum(axis=1) + self.k)
        return Q

    def energy(self, u: Sequence[float], v: Optional[Sequence[float]] = None) -> float:
        """E(u, v); E(u, u) when v is omitted"""
        u = np.asarray(u, dtype=float)
        v = u if v is None else np.asarray(v, dtype=float)
        return float(u @ self.reconstruct() @ v)

    def indicator(self, state: Hashable) -> np.ndarray:
        vector = np.zeros(self.size)
        vector[self.index(state)] = 1.0
        return vector

    def same_as(self, other: "FiniteForm") -> bool:
        """Exact equality of the triple and the reference weights"""
        return (self.states == other.states and np.array_equal(self.m, other.m)
                and np.array_equal(self.J, other.J) and np.array_equal(self.k, other.k))

    def with_jump(self, i: int, j: int, value: float) -> "FiniteForm":
        """Copy with J_ij = J_ji = value"""
        J = self.J.copy()
        J[i, j] = J[j, i] = value
        return FiniteForm(self.states, self.m, J, self.k)

    def to_dict(self) -> Dict[str, Any]:
        upper = [self.J[i, i + 1:].tolist() for i in range(self.size)]
        return {"states": list(self.states), "m": self.m.tolist(), "J": upper, "k": self.k.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, document: Union[str, Dict[str, Any]]) -> "FiniteForm":
        """
        Read {states, m, J, k} where J lists the strict upper triangle row by row

        Returns:
            FiniteForm
        """
        data = json.loads(document) if isinstance(document, str) else document
        states = tuple(data["states"])
        n = len(states)
        rows = data["J"]
        if len(rows) not in (n, n - 1) or any(len(rows[i]) != n - i - 1 for i in range(len(rows))):
            raise PreconditionError("J must list the strict upper triangle row by row")
        J = np.zeros((n, n))
        for i, row in enumerate(rows):
            J[i, i + 1:] = row
        J = J + J.T
        return cls(states, data["m"], J, data.get("k", [0.0] * n))


def bd_decompose(Q: np.ndarray, m: Sequence[float],
                 states: Optional[Sequence[Hashable]] = None) -> FiniteForm:
    """
    Extract the Beurling-Deny triple of E(u, v) = uᵀQv

    Args:
        Q: Symmetric matrix of the form
        m: Reference weights
        states: Labels (defaults to 0..n-1)

    Returns:
        FiniteForm with J_xy = -Q_xy/2 and k_x = Σ_y Q_xy
    """
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[0]
    if Q.shape != (n, n) or not np.array_equal(Q, Q.T):
        raise PreconditionError("Q must be a symmetric square matrix")

    off_diagonal = Q - np.diag(np.diag(Q))
    positive = np.argwhere(off_diagonal > 0)
    if positive.size:
        i, j = (int(v) for v in positive[0])
        raise NotMarkovianError(f"positive off-diagonal entry Q[{i}, {j}] = {Q[i, j]}", {"entry": (i, j)})
    k = Q.sum(axis=1)
    negative = np.flatnonzero(k < 0)
    if negative.size:
        i = int(negative[0])
        raise NotMarkovianError(f"negative row sum in row {i}: {k[i]}", {"row": i})

    labels = tuple(states) if states is not None else tuple(range(n))
    return FiniteForm(labels, m, -0.5 * off_diagonal, k)


def random_form(rng: np.random.Generator, n_states: int = 5, density: float = 0.6,
                max_numerator: int = 32) -> FiniteForm:
    """
    Random Markovian form with dyadic entries

    Args:
        rng: Random generator
        n_states: Number of states
        density: Probability that a pair carries a jump
        max_numerator: Entries are integers in [1, max_numerator] over DYADIC_DENOMINATOR

    Returns:
        FiniteForm over states 0..n_states-1
    """
    draw = lambda size: rng.integers(1, max_numerator + 1, size=size) / DYADIC_DENOMINATOR  # noqa: E731
    upper = np.triu(draw((n_states, n_states)) * (rng.random((n_states, n_states)) < density), 1)
    k = draw(n_states) * (rng.random(n_states) < 0.5)
    return FiniteForm(tuple(range(n_states)), draw(n_states), upper + upper.T, k)
