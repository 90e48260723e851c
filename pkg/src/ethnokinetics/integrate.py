"""Fixed-step RK4 integration and trajectory post-processing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .errors import KnotMisalignment, NonFiniteState
from .models import RHS

DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class TimeGrid:
    """Time axis from ``t0`` to ``tf`` with step at most ``dt``.

    Mandatory knots split the span into segments; each segment gets its own
    step ``span / ceil(span / dt)`` so that every knot is hit exactly.
    """

    t0: float
    tf: float
    dt: float = DEFAULT_DT
    mandatory_knots: tuple = ()

    def __post_init__(self):
        if not self.tf > self.t0:
            raise ValueError(f"tf ({self.tf}) must exceed t0 ({self.t0})")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        knots = tuple(sorted({float(k) for k in self.mandatory_knots}))
        for k in knots:
            if k < self.t0 or k > self.tf:
                raise KnotMisalignment(f"knot {k} outside [{self.t0}, {self.tf}]")
        object.__setattr__(self, "mandatory_knots", knots)

    def breakpoints(self) -> list:
        pts = [float(self.t0)]
        pts += [k for k in self.mandatory_knots if self.t0 < k < self.tf]
        pts.append(float(self.tf))
        return pts

    def times(self) -> np.ndarray:
        pts = self.breakpoints()
        chunks = []
        for a, b in zip(pts[:-1], pts[1:]):
            n = max(1, math.ceil((b - a) / self.dt - 1e-9))
            step = (b - a) / n
            chunks.append(a + step * np.arange(n))
        chunks.append(np.array([pts[-1]]))
        return np.concatenate(chunks)

    def __len__(self):
        return len(self.times())

    def index_of(self, t: float) -> int:
        """Grid index holding exactly ``t``; raises KnotMisalignment otherwise."""
        times = self.times()
        i = int(np.searchsorted(times, t))
        if i < len(times) and times[i] == t:
            return i
        raise KnotMisalignment(f"t={t} is not a grid point")

    def with_knots(self, *knots) -> "TimeGrid":
        return replace(self, mandatory_knots=tuple(self.mandatory_knots) + tuple(knots))


@dataclass(frozen=True, eq=False)
class Trajectory:
    grid: TimeGrid
    samples: np.ndarray
    labels: tuple
    t: np.ndarray = field(default=None)

    def __post_init__(self):
        t = self.grid.times() if self.t is None else np.asarray(self.t, dtype=float)
        object.__setattr__(self, "t", t)
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] != t.shape[0]:
            raise ValueError(f"samples shape {samples.shape} does not match {t.shape[0]} grid points")
        if samples.shape[1] != len(self.labels):
            raise ValueError("one label per state component required")
        object.__setattr__(self, "samples", samples)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.samples[:, self.labels.index(label)]

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1].copy()

    def __eq__(self, other):
        return (
            isinstance(other, Trajectory)
            and self.labels == other.labels
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None


def _labels_for(dim):
    return {2: ("x", "y"), 3: ("x", "y", "z"), 6: ("x1", "y1", "z1", "x2", "y2", "z2")}.get(
        dim, tuple(f"s{i}" for i in range(dim))
    )


def integrate_ode(rhs: RHS | Callable, initial: Sequence[float], grid: TimeGrid) -> Trajectory:
    """Integrate ``rhs`` with classical RK4 over every point of ``grid``.

    ``rhs`` is either a bound model (:func:`ethnokinetics.models.model_rhs`),
    which runs compiled, or any callable ``f(t, state) -> derivative``.
    """
    y0 = np.asarray(initial, dtype=float)
    times = grid.times()
    if isinstance(rhs, RHS):
        if y0.shape != (rhs.dim,):
            raise ValueError(f"initial state needs {rhs.dim} components")
        if rhs.positive and not np.all(y0 > 0):
            raise ValueError("population models need strictly positive initial conditions")
        samples, failed = K.rk4(rhs.kind, times, y0, rhs.params)
        labels = rhs.labels
    else:
        samples, failed = _rk4_python(rhs, times, y0)
        labels = _labels_for(y0.shape[0])
    if failed >= 0:
        raise NonFiniteState(
            f"non-finite state at step {failed} (t={times[failed]:.6g}); reduce dt or check parameters",
            step=failed,
            time=float(times[failed]),
        )
    return Trajectory(grid, samples, labels, t=times)


def _rk4_python(f, times, y0):
    out = np.empty((len(times), y0.shape[0]))
    out[0] = y = y0.copy()
    for i in range(len(times) - 1):
        t, h = times[i], times[i + 1] - times[i]
        k1 = np.asarray(f(t, y), dtype=float)
        k2 = np.asarray(f(t + h / 2, y + h / 2 * k1), dtype=float)
        k3 = np.asarray(f(t + h / 2, y + h / 2 * k2), dtype=float)
        k4 = np.asarray(f(t + h, y + h * k3), dtype=float)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            return out[: i + 1], i + 1
        out[i + 1] = y
    return out, -1


@dataclass(frozen=True)
class ExcitationReport:
    excited: bool
    peak_value: float
    peak_time: float
    spike_duration: float
    terminal_state: np.ndarray
    terminal_attractor: np.ndarray | None = None
    settle_time: float | None = None


def _crossing_time(t, x, i, level):
    """Linear interpolation of the ``level`` crossing between samples i and i+1."""
    x0, x1 = x[i], x[i + 1]
    if x1 == x0:
        return t[i]
    return t[i] + (level - x0) * (t[i + 1] - t[i]) / (x1 - x0)


def spike_duration(t: np.ndarray, x: np.ndarray, level: float) -> float:
    """Length of the excursion above ``level`` that contains the maximum of ``x``."""
    k = int(np.argmax(x))
    if x[k] <= level:
        return 0.0
    below = np.nonzero(x[:k] <= level)[0]
    if below.size:
        start = _crossing_time(t, x, below[-1], level)
    else:
        start = t[0]
    after = np.nonzero(x[k:] <= level)[0]
    if after.size:
        j = k + after[0] - 1
        end = _crossing_time(t, x, j, level)
    else:
        end = t[-1]
    return float(end - start)


def detect_excitation(
    traj: Trajectory,
    x_index: int = 0,
    excitation_level: float | None = None,
    settle_tolerance: float = 1e-3,
    equilibria: Sequence | None = None,
    reference_level: float | None = None,
    threshold: float | None = None,
) -> ExcitationReport:
    """Summarise the bust carried by component ``x_index``.

    When ``excitation_level`` is omitted it defaults to ``2 * max(x(0), threshold)``
    (``threshold`` being the model's alpha, 0 if unknown). ``reference_level``
    sets the level used for the spike duration and defaults to the excitation
    level.
    """
    if len(traj.t) == 0:
        raise ValueError("empty trajectory")
    x = traj.samples[:, x_index]
    if excitation_level is None:
        excitation_level = 2.0 * max(x[0], threshold or 0.0)
    if reference_level is None:
        reference_level = excitation_level
    k = int(np.argmax(x))
    peak = float(x[k])
    final = traj.final
    attractor = None
    settle = None
    if equilibria:
        pts = [np.asarray(e, dtype=float) for e in equilibria]
        dists = [np.linalg.norm(final - e) for e in pts]
        j = int(np.argmin(dists))
        if dists[j] <= settle_tolerance:
            attractor = pts[j]
            away = np.linalg.norm(traj.samples - attractor, axis=1) > settle_tolerance
            idx = np.nonzero(away)[0]
            settle = float(traj.t[idx[-1] + 1]) if idx.size else float(traj.t[0])
    return ExcitationReport(
        excited=peak >= excitation_level,
        peak_value=peak,
        peak_time=float(traj.t[k]),
        spike_duration=spike_duration(traj.t, x, reference_level),
        terminal_state=final,
        terminal_attractor=attractor,
        settle_time=settle,
    )


@dataclass(frozen=True)
class RealScale:
    """Conversion from model units to years and head-counts.

    ``x = 1`` stands for ``K`` passionaries; ``y = 1`` (and ``z = 1``) for
    ``nonpassionary_factor * K`` people.
    """

    years_per_unit: float = 15.0
    K: float = 10_000.0
    nonpassionary_factor: float = 100.0

    def __post_init__(self):
        for name in ("years_per_unit", "K", "nonpassionary_factor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name}: must be positive")

    def factor(self, label: str) -> float:
        return self.K if label.startswith("x") else self.K * self.nonpassionary_factor


def scale_to_real(traj: Trajectory, scale: RealScale = RealScale()) -> Trajectory:
    y = scale.years_per_unit
    grid = TimeGrid(
        traj.grid.t0 * y,
        traj.grid.tf * y,
        traj.grid.dt * y,
        tuple(k * y for k in traj.grid.mandatory_knots),
    )
    factors = np.array([scale.factor(lbl) for lbl in traj.labels])
    return Trajectory(grid, traj.samples * factors, traj.labels, t=traj.t * y)
