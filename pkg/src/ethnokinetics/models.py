"""Parameter records and right-hand sides of the ethnogenesis models.

Every function here is a pure drift evaluation: no integration, no state.
States are plain sequences or 1-D arrays; the returned derivative is always a
fresh ``float64`` array.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from . import _kernels as K
from .errors import ParamSignViolation


def _require(cond, name, msg):
    if not cond:
        raise ValueError(f"{name}: {msg}")


@dataclass(frozen=True)
class LVParams:
    """Nondimensional Lotka-Volterra coefficients."""

    beta1: float
    beta2: float
    gamma: float

    def __post_init__(self):
        _require(self.gamma > 0, "gamma", "must be positive")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)


@dataclass(frozen=True)
class TwoVarParams:
    """Two-variable excitable model.

    ``alpha`` is the excitation threshold, ``y0`` the resting level of the
    non-passionary population.
    """

    alpha: float
    y0: float
    beta1: float
    beta2: float
    gamma: float

    def __post_init__(self):
        _require(0 < self.alpha < 1, "alpha", "must lie in (0, 1)")
        _require(self.y0 > 0, "y0", "must be positive")
        _require(self.gamma > 0, "gamma", "must be positive")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)


@dataclass(frozen=True)
class ThreeVarParams:
    """Coefficients of the passionary / harmonious / subpassionary model.

    Signs of the couplings are free here; the stochastic and prism code paths
    call :meth:`check_stochastic_signs` at their entry points.
    """

    alpha1: float
    alpha2: float
    y0: float
    z0: float
    beta12: float
    beta13: float
    beta21: float
    beta23: float
    beta31: float
    beta32: float
    gamma1: float
    gamma2: float
    gamma3: float

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma3", "alpha1", "alpha2", "y0"):
            _require(getattr(self, name) > 0, name, "must be positive")
        _require(self.z0 >= 0, "z0", "must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def check_stochastic_signs(self):
        if self.beta12 > 0:
            raise ParamSignViolation(f"beta12={self.beta12} must be <= 0")
        if self.beta32 > 0:
            raise ParamSignViolation(f"beta32={self.beta32} must be <= 0")

    def replace(self, **changes) -> "ThreeVarParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ThreeVarParams(**values)


@dataclass(frozen=True)
class NoiseSpec:
    """Volatilities of the three log-populations plus the RNG seed."""

    sigma1: float
    sigma2: float
    sigma3: float
    seed: int = 0

    def __post_init__(self):
        for name in ("sigma1", "sigma2", "sigma3"):
            _require(getattr(self, name) >= 0, name, "must be non-negative")

    @classmethod
    def uniform(cls, sigma: float, seed: int = 0) -> "NoiseSpec":
        return cls(sigma, sigma, sigma, seed)

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([self.sigma1, self.sigma2, self.sigma3], dtype=float)

    def with_seed(self, seed: int) -> "NoiseSpec":
        return NoiseSpec(self.sigma1, self.sigma2, self.sigma3, seed)


@dataclass(frozen=True)
class InteractionSpec:
    """Mutual passionary suppression between two ethnoses.

    The second ethnos is born ``T1`` time units after the first; the two start
    communicating ``T2`` units after that birth.
    """

    c1: float
    c2: float
    T1: float = 20.0
    T2: float = 15.0

    def __post_init__(self):
        _require(self.c1 >= 0, "c1", "must be non-negative")
        _require(self.c2 >= 0, "c2", "must be non-negative")
        _require(self.T1 >= 0, "T1", "must be non-negative")
        _require(self.T2 >= 0, "T2", "must be non-negative")

    @property
    def contact_time(self) -> float:
        return self.T1 + self.T2


def _state(s, n):
    arr = np.asarray(s, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"expected a state with {n} components, got shape {arr.shape}")
    return arr


def rhs_lotka_volterra(s, p: LVParams) -> np.ndarray:
    return K.evaluate(K.LOTKA_VOLTERRA, 0.0, _state(s, 2), p.as_array())


def rhs_two_var(s, p: TwoVarParams) -> np.ndarray:
    return K.evaluate(K.TWO_VAR, 0.0, _state(s, 2), p.as_array())


def rhs_three_var(s, p: ThreeVarParams) -> np.ndarray:
    return K.evaluate(K.THREE_VAR, 0.0, _state(s, 3), p.as_array())


def drift_log_three_var(v, p: ThreeVarParams) -> np.ndarray:
    """Drift of the log-populations ``v = ln(x, y, z)``.

    ``exp(v) * drift_log_three_var(v, p)`` reproduces ``rhs_three_var(exp(v), p)``.
    No Ito correction is applied in these coordinates.
    """
    return K.evaluate(K.LOG_THREE_VAR, 0.0, _state(v, 3), p.as_array())


def drift_direct_three_var(s, p: ThreeVarParams, noise: NoiseSpec) -> np.ndarray:
    """Drift of the population-coordinate SDE, including ``sigma_i**2 / 2``."""
    return K.evaluate(K.DIRECT_SDE, 0.0, _state(s, 3), sde_param_vector(p, noise))


def drift_interaction(s, p: ThreeVarParams, i: InteractionSpec, noise: NoiseSpec, t: float) -> np.ndarray:
    """Deterministic drift of the coupled two-ethnos system at time ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return K.evaluate(K.INTERACTION, float(t), _state(s, 6), interaction_param_vector(p, noise, i))


def brackets_two_var(s, p: TwoVarParams) -> np.ndarray:
    """The per-capita factors whose zero sets are the non-trivial nullclines."""
    x, y = _state(s, 2)
    return np.array([(1 - x) * (x - p.alpha) + p.beta1 * (y - p.y0), p.y0 - y + p.beta2 * x])


def brackets_lotka_volterra(s, p: LVParams) -> np.ndarray:
    x, y = _state(s, 2)
    return np.array([1 - x + p.beta1 * y, 1 - y + p.beta2 * x])


def brackets_three_var(s, p: ThreeVarParams) -> np.ndarray:
    x, y, z = _state(s, 3)
    return np.array(K.brackets_three(x, y, z, p.as_array()))


def sde_param_vector(p: ThreeVarParams, noise: NoiseSpec) -> np.ndarray:
    return np.concatenate([p.as_array(), noise.sigmas])


def interaction_param_vector(p: ThreeVarParams, noise: NoiseSpec, i: InteractionSpec) -> np.ndarray:
    return np.concatenate([p.as_array(), noise.sigmas, [i.c1, i.c2, i.T1, i.T2]])


@dataclass(frozen=True)
class RHS:
    """A compiled model right-hand side bound to its parameter vector.

    Calling it as ``rhs(t, state)`` evaluates the derivative; the integrators
    recognise the type and run the compiled loop instead.
    """

    kind: int
    params: np.ndarray
    labels: tuple
    positive: bool = True

    def __call__(self, t, s) -> np.ndarray:
        return K.evaluate(self.kind, float(t), np.asarray(s, dtype=float), self.params)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __eq__(self, other):
        return (
            isinstance(other, RHS)
            and self.kind == other.kind
            and np.array_equal(self.params, other.params)
            and self.labels == other.labels
        )

    __hash__ = None


def model_rhs(p, noise: NoiseSpec | None = None, interaction: InteractionSpec | None = None) -> RHS:
    """Bind the right-hand side matching the parameter record ``p``."""
    if isinstance(p, LVParams):
        return RHS(K.LOTKA_VOLTERRA, p.as_array(), ("x", "y"))
    if isinstance(p, TwoVarParams):
        return RHS(K.TWO_VAR, p.as_array(), ("x", "y"))
    if isinstance(p, ThreeVarParams):
        if interaction is not None:
            noise = noise or NoiseSpec(0.0, 0.0, 0.0)
            return RHS(
                K.INTERACTION,
                interaction_param_vector(p, noise, interaction),
                ("x1", "y1", "z1", "x2", "y2", "z2"),
            )
        if noise is not None:
            return RHS(K.DIRECT_SDE, sde_param_vector(p, noise), ("x", "y", "z"))
        return RHS(K.THREE_VAR, p.as_array(), ("x", "y", "z"))
    raise TypeError(f"no model for parameter type {type(p).__name__}")
