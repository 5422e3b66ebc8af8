"""
Independent coupling of one-dimensional subspace forms
Tensor-product energies, properness of the product subspace, and rectangle part cores
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from labs.errors import PreconditionError
from labs.forms1d import CoreFunction, energy_Es, l2_norm_squared
from labs.scale import ScaleFunction, scale_from_descriptor

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]

# Total node budget of the d-dimensional finite-difference oracle
DIRECT_NODE_BUDGET = 1 << 21


@dataclass(frozen=True, eq=False)
class ProductForm:
    """Components (s_i, I_i) of an independent coupling"""
    components: Tuple[Tuple[ScaleFunction, Interval], ...]

    def __post_init__(self):
        components = tuple((scale, (float(a), float(b))) for scale, (a, b) in self.components)
        object.__setattr__(self, "components", components)
        if not components:
            raise PreconditionError("a product form needs at least one component")
        for index, (_, (a, b)) in enumerate(components):
            if not b > a:
                raise PreconditionError(f"component {index} has an empty interval ({a}, {b})")

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def scales(self) -> List[ScaleFunction]:
        return [scale for scale, _ in self.components]

    @property
    def intervals(self) -> List[Interval]:
        return [interval for _, interval in self.components]

    def permuted(self, order: Sequence[int]) -> "ProductForm":
        return ProductForm(tuple(self.components[i] for i in order))

    def to_json(self) -> str:
        return json.dumps([
            {"scale": scale.descriptor(), "interval": list(interval)} for scale, interval in self.components
        ])

    @classmethod
    def from_json(cls, document: Union[str, List[Dict[str, Any]]]) -> "ProductForm":
        data = json.loads(document) if isinstance(document, str) else document
        return cls(tuple((scale_from_descriptor(item["scale"]), tuple(item["interval"])) for item in data))


@dataclass(frozen=True)
class TensorFunction:
    """u = f_1 ⊗ ... ⊗ f_d"""
    factors: Tuple[CoreFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dim(self) -> int:
        return len(self.factors)

    def permuted(self, order: Sequence[int]) -> "TensorFunction":
        return TensorFunction(tuple(self.factors[i] for i in order))


@dataclass
class ProperCertificate:
    """Flat masses |E_{s_i}| of the components"""
    flat_masses: List[float] = field(default_factory=list)

    @property
    def proper(self) -> bool:
        return any(mass > 0 for mass in self.flat_masses)

    def as_dict(self) -> Dict[str, Any]:
        return {"flat_masses": self.flat_masses, "proper": self.proper}


def _check_factors(P: ProductForm, u: TensorFunction) -> None:
    if u.dim != P.dim:
        raise PreconditionError(f"product form has {P.dim} components, tensor function {u.dim} factors")
    for index, (factor, (scale, (a, b))) in enumerate(zip(u.factors, P.components)):
        if factor.scale is not scale and factor.scale.to_json() != scale.to_json():
            raise PreconditionError(f"factor {index} uses a different scale than its component")
        lo, hi = factor.x_window
        if lo < a or hi > b:
            raise PreconditionError(f"factor {index} is supported on [{lo}, {hi}], outside ({a}, {b})")


def product_energy(P: ProductForm, u: TensorFunction, quad_n: int = 256) -> float:
    """
    Energy of a tensor function under the independent coupling

    Args:
        P: Product form
        u: Tensor function with one factor per component

    Returns:
        Σ_i E^(s_i)(f_i, f_i) Π_{j≠i} ‖f_j‖²_{L²(dx)}
    """
    _check_factors(P, u)
    energies = [energy_Es(f, quad_n) for f in u.factors]
    norms = [l2_norm_squared(f, quad_n) for f in u.factors]
    total = 0.0
    for i, energy in enumerate(energies):
        total += energy * float(np.prod([norm for j, norm in enumerate(norms) if j != i]))
    logger.debug(f"Product energy {total:.12g} from factor energies {energies} and norms {norms}")
    return total


def properness_certificate(P: ProductForm) -> ProperCertificate:
    """
    Exact flat mass of every component on its interval

    The coupling is a proper regular subspace of d-dimensional Brownian motion
    iff some flat mass is positive.
    """
    certificate = ProperCertificate([scale.flat_mass(a, b) for scale, (a, b) in P.components])
    logger.info(f"Properness: flat masses {certificate.flat_masses}, proper={certificate.proper}")
    return certificate


def rectangle_part_core(P: ProductForm, G: Sequence[Interval]) -> Callable[[TensorFunction], bool]:
    """
    Membership test for the core of the part form on a rectangle G

    A side of G that coincides with the end of its component interval is
    treated as closed.

    Args:
        P: Product form
        G: One open subinterval per component

    Returns:
        Predicate accepting u iff every factor's support lies in its side of G
    """
    sides = [(float(lo), float(hi)) for lo, hi in G]
    if len(sides) != P.dim:
        raise PreconditionError(f"rectangle has {len(sides)} sides for {P.dim} components")
    for index, ((lo, hi), (a, b)) in enumerate(zip(sides, P.intervals)):
        if lo < a or hi > b or not hi > lo:
            raise PreconditionError(f"side {index} ({lo}, {hi}) is not a subinterval of ({a}, {b})")

    def admits(u: TensorFunction) -> bool:
        _check_factors(P, u)
        for factor, (lo, hi), (a, b) in zip(u.factors, sides, P.intervals):
            left, right = factor.x_window
            inside_left = left >= lo if lo == a else left > lo
            inside_right = right <= hi if hi == b else right < hi
            if not (inside_left and inside_right):
                return False
        return True

    return admits


def _axis_nodes(factor: CoreFunction, count: int) -> np.ndarray:
    lo, hi = factor.x_window
    uniform = np.linspace(lo, hi, count + 1)
    kinks = factor.x_breakpoints()
    return np.unique(np.concatenate((uniform, kinks[(kinks > lo) & (kinks < hi)])))


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    widths = np.diff(nodes)
    weights = np.zeros(nodes.size)
    weights[:-1] += 0.5 * widths
    weights[1:] += 0.5 * widths
    return weights


def direct_dirichlet_energy(P: ProductForm, u: TensorFunction, grid_n: int = 0) -> float:
    """
    ½∫|∇u|² dx by finite differences on a d-dimensional tensor grid

    Each axis is sampled on a uniform grid over the factor's support merged
    with the kinks of the factor. Differences along one axis are weighted by
    trapezoid weights along the others.

    Args:
        P: Product form
        u: Tensor function
        grid_n: Uniform cells per axis (defaults to the node budget split evenly)

    Returns:
        The d-dimensional Dirichlet energy
    """
    _check_factors(P, u)
    count = grid_n or max(16, int(DIRECT_NODE_BUDGET ** (1.0 / P.dim)))
    axes = [_axis_nodes(factor, count) for factor in u.factors]
    samples = [factor.value(nodes) for factor, nodes in zip(u.factors, axes)]
    weights = [_trapezoid_weights(nodes) for nodes in axes]

    values = samples[0]
    for sample in samples[1:]:
        values = np.multiply.outer(values, sample)

    total = 0.0
    for i in range(P.dim):
        shape = [1] * P.dim
        shape[i] = -1
        term = np.diff(values, axis=i) ** 2 / np.diff(axes[i]).reshape(shape)
        for j in range(P.dim):
            if j != i:
                shape = [1] * P.dim
                shape[j] = -1
                term = term * weights[j].reshape(shape)
        total += float(np.sum(term))
    logger.debug(f"Direct {P.dim}-d energy on grid {[a.size for a in axes]}: {0.5 * total:.12g}")
    return 0.5 * total
