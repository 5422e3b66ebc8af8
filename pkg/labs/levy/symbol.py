"""
Symmetric Lévy symbols
ψ(x) = ½xᵀSx + Σ w_i(1 - cos(x·y_i)) for a PSD matrix S and a finite symmetric atomic jump measure
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

from labs.errors import PreconditionError
from labs.settings import DEFAULT_TOLERANCES, RANK_THRESHOLD

logger = logging.getLogger(__name__)

# Symmetry and PSD checks on S, and atom matching under y -> -y
SYMBOL_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class LevySymbol:
    """
    The pair (S, j) defining a translation-invariant symmetric form

    atoms has shape (n_atoms, d); weights has shape (n_atoms,).
    """
    S: np.ndarray
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.S, dtype=float))
        d = S.shape[0]
        atoms = np.asarray(self.atoms, dtype=float).reshape(-1, d)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

        if S.shape != (d, d):
            raise PreconditionError(f"S must be square, got shape {S.shape}")
        if not np.allclose(S, S.T, atol=SYMBOL_ATOL):
            raise PreconditionError("S must be symmetric")
        eigenvalues = np.linalg.eigvalsh(S)
        if eigenvalues.size and eigenvalues.min() < -SYMBOL_ATOL * max(1.0, abs(eigenvalues).max()):
            raise PreconditionError(f"S must be positive semidefinite, smallest eigenvalue {eigenvalues.min()}")
        if weights.size != atoms.shape[0]:
            raise PreconditionError("one weight per atom is required")
        if np.any(weights <= 0):
            raise PreconditionError("atom weights must be positive")
        for y, w in zip(atoms, weights):
            mirror = np.all(np.isclose(atoms, -y, atol=SYMBOL_ATOL), axis=1) & np.isclose(weights, w)
            if not np.any(mirror):
                raise PreconditionError(f"jump measure is not symmetric: atom {y.tolist()} has no mirror")

    @property
    def dim(self) -> int:
        return int(self.S.shape[0])

    @property
    def has_jumps(self) -> bool:
        return self.weights.size > 0

    def rotated(self, P: np.ndarray) -> "LevySymbol":
        """
        Symbol of x -> u(Px) for orthogonal P

        Args:
            P: Orthogonal d×d matrix

        Returns:
            LevySymbol with PᵀSP and atoms Pᵀy
        """
        P = np.asarray(P, dtype=float)
        if not np.allclose(P.T @ P, np.eye(self.dim), atol=1e-12):
            raise PreconditionError("rotation matrix must be orthogonal")
        return LevySymbol(P.T @ self.S @ P, self.atoms @ P, self.weights)

    def to_dict(self) -> Dict[str, Any]:
        if self.dim == 1:
            atoms = [[float(y[0]), float(w)] for y, w in zip(self.atoms, self.weights)]
        else:
            atoms = [[y.tolist(), float(w)] for y, w in zip(self.atoms, self.weights)]
        return {"S": self.S.tolist(), "atoms": atoms}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, document: Union[str, Dict[str, Any]]) -> "LevySymbol":
        """Read {S: rows, atoms: [[y, w], ...]}"""
        data = json.loads(document) if isinstance(document, str) else document
        S = np.atleast_2d(np.asarray(data["S"], dtype=float))
        d = S.shape[0]
        pairs = data.get("atoms", [])
        atoms = np.array([np.atleast_1d(y) for y, _ in pairs], dtype=float).reshape(-1, d)
        weights = np.array([w for _, w in pairs], dtype=float)
        return cls(S, atoms, weights)


def symbol_eval(sym: LevySymbol, x) -> Union[float, np.ndarray]:
    """
    Evaluate ψ

    Args:
        sym: Lévy symbol
        x: Point of shape (d,) or array of points of shape (..., d)

    Returns:
        ψ(x), a float for a single point
    """
    points = np.asarray(x, dtype=float)
    single = points.ndim == 0 or (points.ndim == 1 and points.shape[0] == sym.dim)
    if single:
        points = points.reshape(1, sym.dim)
    elif sym.dim == 1 and points.shape[-1] != 1:
        points = points[..., None]
    value = 0.5 * np.einsum("...i,ij,...j->...", points, sym.S, points)
    if sym.has_jumps:
        phases = np.tensordot(points, sym.atoms, axes=([-1], [1]))
        value = value + np.sum(sym.weights * (1.0 - np.cos(phases)), axis=-1)
    return float(value.reshape(-1)[0]) if single else value


@dataclass(frozen=True)
class Diagonalization:
    """PᵀSP = diag(eigenvalues), eigenvalues sorted descending"""
    P: np.ndarray
    eigenvalues: np.ndarray
    rank: int
    reconstruction_error: float

    @property
    def positive_directions(self) -> np.ndarray:
        """Columns of P with eigenvalue counted in the rank"""
        return self.P[:, :self.rank]


def diagonalize(sym: LevySymbol, threshold: float = RANK_THRESHOLD) -> Diagonalization:
    """
    Orthogonal diagonalization of S with numerical rank

    Args:
        sym: Lévy symbol
        threshold: Relative eigenvalue threshold for the rank

    Returns:
        Diagonalization (P, eigenvalues descending, rank, ‖PᵀSP - diag‖)
    """
    eigenvalues, P = np.linalg.eigh(sym.S)
    eigenvalues = eigenvalues[::-1]
    P = P[:, ::-1]
    top = eigenvalues[0] if eigenvalues.size else 0.0
    rank = int(np.sum(eigenvalues > threshold * top)) if top > 0 else 0
    error = float(np.linalg.norm(P.T @ sym.S @ P - np.diag(eigenvalues)))
    if error > DEFAULT_TOLERANCES["diagonalize"] * max(1.0, abs(top)):
        logger.warning(f"Diagonalization reconstruction error {error:.3e}")
    return Diagonalization(P=P, eigenvalues=eigenvalues, rank=rank, reconstruction_error=error)
