"""
Lévy form energies
Fourier-side energy from the symbol, the direct local/jump split, and the pairing identity
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy import ndimage

from labs.errors import AliasingError, PreconditionError
from labs.levy.grid import GridFunction
from labs.levy.symbol import LevySymbol, diagonalize, symbol_eval

logger = logging.getLogger(__name__)

# An atom counts as on-grid when y/h is within this distance of an integer in every axis
ON_GRID_ATOL = 1e-9

# Interpolation order for off-grid atom shifts
SHIFT_ORDER = 3


@dataclass(frozen=True)
class DirectEnergy:
    """Strongly local and jump parts of E(u, v)"""
    local: float
    jump: float
    interpolated_atoms: Tuple[int, ...] = ()

    @property
    def total(self) -> float:
        return self.local + self.jump

    @property
    def interpolated(self) -> bool:
        return bool(self.interpolated_atoms)


@dataclass
class PositivityCertificate:
    """Witness that the local part is positive on every eligible fixture"""
    holds: bool
    rank: int
    eligible: List[int] = field(default_factory=list)
    excluded: List[int] = field(default_factory=list)
    local_energies: List[float] = field(default_factory=list)
    note: str = ""

    def __bool__(self) -> bool:
        return self.holds


def _check_compatible(sym: LevySymbol, *functions: GridFunction) -> None:
    for u in functions:
        if u.dim != sym.dim:
            raise PreconditionError(f"symbol has dimension {sym.dim}, grid function {u.dim}")
    for u in functions[1:]:
        if not u.same_grid(functions[0]):
            raise PreconditionError("grid functions live on different grids")


def _gradient(u: GridFunction) -> List[np.ndarray]:
    """Fourth-order central differences, zero outside the box unless periodic"""
    gradient = []
    for axis, h in enumerate(u.spacing):
        if u.periodic:
            step = lambda k: np.roll(u.values, -k, axis=axis)  # noqa: E731
        else:
            width = [(0, 0)] * u.dim
            width[axis] = (2, 2)
            padded = np.pad(u.values, width)
            n = u.shape[axis]
            step = lambda k: np.take(padded, np.arange(2 + k, 2 + k + n), axis=axis)  # noqa: E731
        gradient.append((-step(2) + 8.0 * step(1) - 8.0 * step(-1) + step(-2)) / (12.0 * h))
    return gradient


def _shift_integer(values: np.ndarray, steps: Sequence[int], periodic: bool) -> np.ndarray:
    """out[j] = values[j + steps], zero-filled unless periodic"""
    if periodic:
        return np.roll(values, [-s for s in steps], axis=tuple(range(values.ndim)))
    out = np.zeros_like(values)
    source, target = [], []
    for s, n in zip(steps, values.shape):
        if abs(s) >= n:
            return out
        source.append(slice(s, n) if s >= 0 else slice(0, n + s))
        target.append(slice(0, n - s) if s >= 0 else slice(-s, n))
    out[tuple(target)] = values[tuple(source)]
    return out


def _on_grid(u: GridFunction, y: np.ndarray) -> Tuple[bool, np.ndarray]:
    steps = y / u.spacing
    rounded = np.round(steps)
    return bool(np.all(np.abs(steps - rounded) <= ON_GRID_ATOL)), rounded.astype(int)


def shifted(u: GridFunction, y: np.ndarray) -> Tuple[np.ndarray, bool]:
    """
    Samples of x -> u(x + y)

    Returns:
        (values, interpolated) where interpolated flags a spline shift for off-grid y
    """
    exact, steps = _on_grid(u, y)
    if exact:
        return _shift_integer(u.values, steps, u.periodic), False
    mode = "grid-wrap" if u.periodic else "grid-constant"
    values = ndimage.shift(u.values, -y / u.spacing, order=SHIFT_ORDER, mode=mode, cval=0.0)
    return values, True


def energy_fourier(sym: LevySymbol, u: GridFunction) -> float:
    """
    E(u, u) = (2π)^-d Σ |û(ξ)|² ψ(ξ) Δξ

    û(ξ) = ∫u(x)e^{-iξ·x}dx is approximated by h^d times the discrete transform
    of the samples; ξ runs over the discrete frequency grid.

    Args:
        sym: Lévy symbol
        u: Grid function

    Returns:
        Nonnegative energy

    Raises:
        AliasingError: an atom has |y| > L/2 along some axis of a box of side L
    """
    _check_compatible(sym, u)
    length = u.upper - u.lower
    # |y| > L/2 is |y|·Δξ > π for the frequency spacing Δξ = 2π/L
    for index, y in enumerate(sym.atoms):
        if np.any(np.abs(y) > 0.5 * length):
            raise AliasingError(
                f"atom {y.tolist()} exceeds half the box {length.tolist()}; frequency grid cannot resolve it",
                {"atom": index},
            )

    transform = np.fft.fftn(u.values) * u.cell_volume
    axes = [2.0 * np.pi * np.fft.fftfreq(n, h) for n, h in zip(u.shape, u.spacing)]
    xi = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    psi = symbol_eval(sym, xi.reshape(-1, u.dim)).reshape(u.shape)
    d_xi = float(np.prod(2.0 * np.pi / length))
    energy = float(np.sum(np.abs(transform) ** 2 * psi)) * d_xi / (2.0 * np.pi) ** u.dim
    return max(energy, 0.0)


def energy_direct_bilinear(sym: LevySymbol, u: GridFunction, v: GridFunction) -> DirectEnergy:
    """
    Local part ½∫(S∇u, ∇v)dx and jump part ½Σ w_i∫(u(x+y_i) - u(x))(v(x+y_i) - v(x))dx

    Args:
        sym: Lévy symbol
        u: Grid function
        v: Grid function on the same grid

    Returns:
        DirectEnergy; off-grid atoms are listed in interpolated_atoms
    """
    _check_compatible(sym, u, v)
    volume = u.cell_volume

    local = 0.0
    if np.any(sym.S):
        grad_u = _gradient(u)
        grad_v = grad_u if v is u else _gradient(v)
        for i in range(sym.dim):
            for j in range(sym.dim):
                if sym.S[i, j]:
                    local += sym.S[i, j] * float(np.sum(grad_u[i] * grad_v[j]))
        local *= 0.5 * volume

    jump = 0.0
    interpolated = []
    for index, (y, w) in enumerate(zip(sym.atoms, sym.weights)):
        u_y, flagged = shifted(u, y)
        v_y = u_y if v is u else shifted(v, y)[0]
        jump += w * float(np.sum((u_y - u.values) * (v_y - v.values)))
        if flagged:
            interpolated.append(index)
    jump *= 0.5 * volume

    if interpolated:
        logger.warning(f"Atoms {interpolated} are off the grid; jump part uses spline interpolation")
    return DirectEnergy(local=local, jump=jump, interpolated_atoms=tuple(interpolated))


def energy_direct(sym: LevySymbol, u: GridFunction) -> DirectEnergy:
    """Direct (local, jump) split of E(u, u)"""
    return energy_direct_bilinear(sym, u, u)


def pairing_identity_residual(sym: LevySymbol, u: GridFunction, v: GridFunction) -> float:
    """
    |E(u, v) + 2∫u(x)v(y)J(dx, dy)| for u, v with disjoint supports

    For the atomic kernel J(dx, dy) = ½Σ w_i δ_{y_i}(dy - x)dx the pairing term
    is Σ w_i ∫u(x)v(x + y_i)dx.

    Args:
        sym: Lévy symbol
        u: Grid function
        v: Grid function with support disjoint from u

    Returns:
        Absolute residual
    """
    _check_compatible(sym, u, v)
    if np.any(u.support_mask() & v.support_mask()):
        raise PreconditionError("pairing identity needs grid functions with disjoint supports")
    form = energy_direct_bilinear(sym, u, v).total
    pairing = 0.0
    for y, w in zip(sym.atoms, sym.weights):
        v_y, _ = shifted(v, y)
        pairing += w * float(np.sum(u.values * v_y))
    pairing *= u.cell_volume
    logger.debug(f"Pairing identity: E(u,v)={form:.12g} pairing={pairing:.12g}")
    return abs(form + pairing)


def local_positivity_certificate(sym: LevySymbol, fixtures: Sequence[GridFunction],
                                 direction_rtol: float = 1e-12) -> PositivityCertificate:
    """
    Check that the local part is strictly positive on fixtures that vary along S

    A fixture is eligible when its gradient has a nonzero component along some
    eigenvector of S with positive eigenvalue.

    Args:
        sym: Lévy symbol
        fixtures: Nonzero grid functions
        direction_rtol: Directional energy threshold relative to ∫|∇u|²

    Returns:
        PositivityCertificate
    """
    diag = diagonalize(sym)
    certificate = PositivityCertificate(holds=True, rank=diag.rank)
    if diag.rank == 0:
        certificate.excluded = list(range(len(fixtures)))
        certificate.note = "no local part"
        return certificate

    directions = diag.positive_directions
    for index, u in enumerate(fixtures):
        if u.is_zero():
            raise PreconditionError(f"fixture {index} is identically zero")
        gradient = np.stack(_gradient(u), axis=-1)
        total = float(np.sum(gradient ** 2))
        along = np.einsum("...i,ik->...k", gradient, directions)
        directional = np.sum(along ** 2, axis=tuple(range(u.dim)))
        local = energy_direct(sym, u).local
        certificate.local_energies.append(local)
        if directional.max() > direction_rtol * total and total > 0:
            certificate.eligible.append(index)
            if not local > 0:
                certificate.holds = False
        else:
            certificate.excluded.append(index)

    if not certificate.eligible:
        certificate.note = "no eligible fixture"
    logger.info(f"Local positivity: rank={diag.rank} eligible={certificate.eligible} "
                f"excluded={certificate.excluded} holds={certificate.holds}")
    return certificate
