"""Two ethnoses with a birth lag and mutual passionary suppression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import KnotMisalignment, NonFiniteState
from .integrate import TimeGrid, Trajectory
from .models import InteractionSpec, NoiseSpec, ThreeVarParams, interaction_param_vector
from .sde import BrownianPath, brownian_path, derive_seed

LABELS = ("x1", "y1", "z1", "x2", "y2", "z2")


@dataclass(frozen=True, eq=False)
class DualTrajectory:
    grid: TimeGrid
    t: np.ndarray
    ethnos1: np.ndarray
    ethnos2: np.ndarray
    spec: InteractionSpec

    def as_trajectory(self) -> Trajectory:
        return Trajectory(self.grid, np.hstack([self.ethnos1, self.ethnos2]), LABELS, t=self.t)

    def __eq__(self, other):
        return (
            isinstance(other, DualTrajectory)
            and np.array_equal(self.ethnos1, other.ethnos1)
            and np.array_equal(self.ethnos2, other.ethnos2)
        )

    __hash__ = None


def interaction_grid(spec: InteractionSpec, tf: float, dt: float = 1e-3, t0: float = 0.0) -> TimeGrid:
    """Grid on [t0, tf] with the birth and first-contact times as knots."""
    knots = [k for k in (spec.T1, spec.contact_time) if t0 < k < tf]
    return TimeGrid(t0, tf, dt, tuple(knots))


def integrate_interacting(
    p: ThreeVarParams,
    n: NoiseSpec,
    spec: InteractionSpec,
    initial,
    grid: TimeGrid,
    path: BrownianPath | None = None,
) -> DualTrajectory:
    """Euler-Maruyama (log coordinates per ethnos) of the coupled system.

    Both ethnoses start from ``initial``; the second is frozen there until
    ``T1``. ``T1`` and ``T1 + T2`` must be grid points whenever they fall
    inside the horizon, so the indicator gates switch exactly on a step.
    """
    p.check_stochastic_signs()
    x0 = np.asarray(initial, dtype=float)
    if x0.shape != (3,) or not np.all(x0 > 0):
        raise ValueError("initial state must have 3 strictly positive components")
    times = grid.times()
    for knot in (spec.T1, spec.contact_time):
        if times[0] < knot < times[-1] and times[np.searchsorted(times, knot)] != knot:
            raise KnotMisalignment(f"gate time {knot} is not a grid point; use interaction_grid()")
    if path is None:
        path = brownian_path(grid, 6, n.seed)
    if path.dims != 6 or path.increments.shape[0] != len(times) - 1:
        raise ValueError("interaction needs a 6-component Brownian path on the same grid")
    v0 = np.log(np.concatenate([x0, x0]))
    samples, failed = K.em_interaction_log(times, v0, interaction_param_vector(p, n, spec), path.increments)
    if failed >= 0:
        raise NonFiniteState(f"integration failed at step {failed}", step=failed, time=float(times[failed]))
    # undo the exp(log(.)) round-off on rows that are the initial state by definition
    samples[0, :3] = x0
    samples[times <= spec.T1, 3:] = x0
    return DualTrajectory(grid, times, samples[:, :3], samples[:, 3:], spec)


@dataclass(frozen=True)
class DominanceReport:
    peak1: float
    peak2: float
    peak_ratio: float
    suppressed: str
    margin: float


def dominance_report(
    dual: DualTrajectory,
    tie_tolerance: float = 0.01,
    reference_peaks: tuple | None = None,
) -> DominanceReport:
    """Which ethnos lost out.

    With ``reference_peaks`` (each ethnos' uncoupled peak) the loser is the one
    whose peak fell furthest below its own reference, and ``margin`` is the
    difference of the two relative drops. Without references the smaller peak
    loses and ``margin`` is the relative peak difference. A margin below
    ``tie_tolerance`` is reported as ``"neither"``.
    """
    peak1 = float(dual.ethnos1[:, 0].max())
    peak2 = float(dual.ethnos2[:, 0].max())
    if reference_peaks is not None:
        drop1 = 1.0 - peak1 / reference_peaks[0]
        drop2 = 1.0 - peak2 / reference_peaks[1]
        margin = abs(drop1 - drop2)
        loser = "ethnos1" if drop1 > drop2 else "ethnos2"
    else:
        margin = abs(peak1 - peak2) / max(peak1, peak2)
        loser = "ethnos1" if peak1 < peak2 else "ethnos2"
    return DominanceReport(
        peak1=peak1,
        peak2=peak2,
        peak_ratio=peak2 / peak1,
        suppressed="neither" if margin < tie_tolerance else loser,
        margin=margin,
    )


def dominance_ensemble(
    p: ThreeVarParams,
    n: NoiseSpec,
    spec: InteractionSpec,
    initial,
    grid: TimeGrid,
    runs: int,
    tie_tolerance: float = 0.01,
    paired_reference: bool = True,
) -> list:
    """Dominance reports for ``runs`` noisy realisations (seeds via derive_seed).

    With ``paired_reference`` each coupled run is compared against the
    uncoupled (c1 = c2 = 0) run driven by the same Brownian path, so the
    report isolates the effect of the coupling from the noise itself.
    """
    uncoupled = InteractionSpec(0.0, 0.0, spec.T1, spec.T2)
    reports = []
    for i in range(runs):
        ni = n.with_seed(derive_seed(n.seed, i))
        path = brownian_path(grid, 6, ni.seed)
        dual = integrate_interacting(p, ni, spec, initial, grid, path)
        refs = None
        if paired_reference:
            ref = integrate_interacting(p, ni, uncoupled, initial, grid, path)
            refs = (float(ref.ethnos1[:, 0].max()), float(ref.ethnos2[:, 0].max()))
        reports.append(dominance_report(dual, tie_tolerance, refs))
    return reports
