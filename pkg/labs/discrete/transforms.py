"""
Transformations of finite-state Dirichlet forms and the subspace comparison
Killing, resurrection, state homeomorphism and time change
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from labs.discrete.forms import FiniteForm
from labs.errors import PreconditionError

logger = logging.getLogger(__name__)


def _weights(F: FiniteForm, values: Sequence[float], name: str) -> np.ndarray:
    array = np.asarray(values, dtype=float).reshape(-1)
    if array.size != F.size:
        raise PreconditionError(f"{name} needs {F.size} entries, got {array.size}")
    return array


def kill(F: FiniteForm, k_extra: Sequence[float]) -> FiniteForm:
    """
    Perturbed form E^k(u, v) = E(u, v) + Σ k'_x u_x v_x

    Args:
        F: Form
        k_extra: Nonnegative additional killing weights

    Returns:
        FiniteForm with killing k + k'
    """
    extra = _weights(F, k_extra, "killing weights")
    if np.any(extra < 0):
        index = int(np.flatnonzero(extra < 0)[0])
        raise PreconditionError(f"killing weight for state {F.states[index]!r} is negative", {"state": index})
    return FiniteForm(F.states, F.m, F.J, F.k + extra)


def resurrect(F: FiniteForm) -> FiniteForm:
    """Resurrected form: the jump part kept, the killing part dropped"""
    return FiniteForm(F.states, F.m, F.J, np.zeros(F.size))


def _permutation(F: FiniteForm, sigma: Mapping[Hashable, Hashable]) -> np.ndarray:
    if set(sigma.keys()) != set(F.states) or set(sigma.values()) != set(F.states):
        raise PreconditionError("state map must be a bijection of the state set onto itself")
    return np.array([F.index(sigma[state]) for state in F.states])


def homeomorph(F: FiniteForm, sigma: Mapping[Hashable, Hashable]) -> FiniteForm:
    """
    Transport F along a bijection σ of the states

    Args:
        F: Form
        sigma: Mapping state -> state

    Returns:
        FiniteForm with m̂ = m∘σ⁻¹, Ĵ_{σx σy} = J_xy and k̂_{σx} = k_x
    """
    target = _permutation(F, sigma)
    m = np.empty(F.size)
    k = np.empty(F.size)
    J = np.empty((F.size, F.size))
    m[target] = F.m
    k[target] = F.k
    J[np.ix_(target, target)] = F.J
    return FiniteForm(F.states, m, J, k)


def transport(F: FiniteForm, sigma: Mapping[Hashable, Hashable], u: Sequence[float]) -> np.ndarray:
    """û = u∘σ⁻¹ as a vector over F.states"""
    target = _permutation(F, sigma)
    moved = np.empty(F.size)
    moved[target] = np.asarray(u, dtype=float)
    return moved


def inverse_map(sigma: Mapping[Hashable, Hashable]) -> Dict[Hashable, Hashable]:
    return {image: state for state, image in sigma.items()}


def time_change(F: FiniteForm, mu: Sequence[float]) -> FiniteForm:
    """
    Time-changed form: reference weights μ, same J and k

    Args:
        F: Form
        mu: Strictly positive weights (full support)

    Returns:
        FiniteForm on L²(μ)
    """
    weights = _weights(F, mu, "time-change weights")
    if np.any(weights <= 0):
        index = int(np.flatnonzero(weights <= 0)[0])
        raise PreconditionError(f"time-change weight for state {F.states[index]!r} is not positive",
                                {"state": index})
    return FiniteForm(F.states, weights, F.J, F.k)


@dataclass
class SubspaceReport:
    """Outcome of comparing a candidate form F' with F on a core"""
    is_subspace: bool
    triples_match: bool
    failing_pairs: List[Tuple[int, int]] = field(default_factory=list)
    pairs_checked: int = 0

    @property
    def failing_pair(self) -> Optional[Tuple[int, int]]:
        return self.failing_pairs[0] if self.failing_pairs else None

    @property
    def equivalence_holds(self) -> bool:
        return self.is_subspace == self.triples_match

    def as_dict(self) -> Dict[str, Any]:
        return {
            "is_subspace": self.is_subspace,
            "triples_match": self.triples_match,
            "equivalence_holds": self.equivalence_holds,
            "failing_pairs": [list(pair) for pair in self.failing_pairs],
            "pairs_checked": self.pairs_checked,
        }


def subspace_check(F_sub: FiniteForm, F: FiniteForm,
                   core: Optional[Sequence[Sequence[float]]] = None) -> SubspaceReport:
    """
    Compare E' with E on all core pairs and the triples (J', k') with (J, k)

    Args:
        F_sub: Candidate subspace form F'
        F: Ambient form
        core: Functions spanning the core (defaults to the state indicators)

    Returns:
        SubspaceReport; with a spanning core is_subspace and triples_match coincide
    """
    if F_sub.states != F.states:
        raise PreconditionError("forms are defined over different state sets")
    if not np.array_equal(F_sub.m, F.m):
        raise PreconditionError("forms use different reference weights")

    basis = np.eye(F.size) if core is None else np.asarray(core, dtype=float)
    Q_sub = F_sub.reconstruct()
    Q = F.reconstruct()
    report = SubspaceReport(
        is_subspace=True,
        triples_match=bool(np.array_equal(F_sub.J, F.J) and np.array_equal(F_sub.k, F.k)),
    )
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            report.pairs_checked += 1
            if basis[i] @ Q_sub @ basis[j] != basis[i] @ Q @ basis[j]:
                report.is_subspace = False
                report.failing_pairs.append((i, j))

    if not report.equivalence_holds:
        logger.warning(f"Energy agreement and triple agreement differ: {report.as_dict()}")
    return report


TRANSFORMS: Dict[str, Callable[..., FiniteForm]] = {
    "kill": lambda F, k: kill(F, k),
    "resurrect": lambda F: resurrect(F),
    "homeomorph": lambda F, sigma: homeomorph(F, _labels(F, sigma)),
    "time_change": lambda F, mu: time_change(F, mu),
}


def _labels(F: FiniteForm, sigma: Mapping[Any, Any]) -> Dict[Hashable, Hashable]:
    """JSON object keys are strings; match them back to the state labels"""
    by_text = {str(state): state for state in F.states}
    try:
        return {by_text[str(key)]: by_text[str(value)] for key, value in sigma.items()}
    except KeyError as e:
        raise PreconditionError(f"state map mentions unknown state {e.args[0]!r}") from e


def apply_pipeline(F: FiniteForm, steps: List[Dict[str, Any]]) -> FiniteForm:
    """
    Apply a JSON transform pipeline left to right

    Args:
        F: Starting form
        steps: [{"op": name, "args": {...}}, ...] with op in kill, resurrect,
            homeomorph, time_change

    Returns:
        Transformed form
    """
    form = F
    for position, step in enumerate(steps):
        op = step.get("op")
        if op not in TRANSFORMS:
            raise PreconditionError(f"unknown transform {op!r} at step {position}")
        form = TRANSFORMS[op](form, **step.get("args", {}))
        logger.debug(f"Pipeline step {position}: {op}")
    return form
