"""Seeded Brownian drivers, Euler-Maruyama integrators and ensemble statistics."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import EthnoError, NonFiniteState
from .integrate import TimeGrid, Trajectory
from .models import NoiseSpec, ThreeVarParams, sde_param_vector

log = logging.getLogger(__name__)

SEED_POLICY = "numpy SeedSequence([base_seed, run_index]) -> first 64-bit word"


@dataclass(frozen=True, eq=False)
class BrownianPath:
    """Pre-drawn Gaussian increments ``dW[n] ~ N(0, t[n+1] - t[n])`` per component."""

    grid: TimeGrid
    increments: np.ndarray
    dims: int
    seed: int | None = None

    @property
    def values(self) -> np.ndarray:
        """Cumulative path starting at W(t0) = 0."""
        w = np.zeros((self.increments.shape[0] + 1, self.dims))
        np.cumsum(self.increments, axis=0, out=w[1:])
        return w

    def __eq__(self, other):
        return isinstance(other, BrownianPath) and np.array_equal(self.increments, other.increments)

    __hash__ = None


def brownian_path(grid: TimeGrid, dims: int, seed: int) -> BrownianPath:
    if dims < 1:
        raise ValueError("dims must be >= 1")
    times = grid.times()
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((len(times) - 1, dims))
    z *= np.sqrt(np.diff(times))[:, None]
    return BrownianPath(grid, z, dims, seed)


def derive_seed(base_seed: int, run_index: int) -> int:
    """Seed for run ``run_index`` of an ensemble, independent of execution order."""
    ss = np.random.SeedSequence([int(base_seed) % 2**64, int(run_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _check_inputs(p, initial, grid, path, dims):
    p.check_stochastic_signs()
    x0 = np.asarray(initial, dtype=float)
    if x0.shape != (3,) or not np.all(x0 > 0):
        raise ValueError("initial state must have 3 strictly positive components")
    if path.dims != dims:
        raise ValueError(f"Brownian path must have {dims} components, got {path.dims}")
    times = grid.times()
    if path.increments.shape[0] != len(times) - 1:
        raise ValueError("Brownian path was drawn on a different grid")
    return x0, times


def _raise_failure(failed, times):
    raise NonFiniteState(
        f"integration failed at step {failed} (t={times[failed]:.6g}); reduce dt",
        step=failed,
        time=float(times[failed]),
    )


def integrate_sde_log(
    p: ThreeVarParams, n: NoiseSpec, initial, grid: TimeGrid, path: BrownianPath | None = None
) -> Trajectory:
    """Euler-Maruyama on ``d ln X`` with additive noise; positive by construction.

    When ``path`` is omitted it is drawn from ``n.seed``.
    """
    if path is None:
        path = brownian_path(grid, 3, n.seed)
    x0, times = _check_inputs(p, initial, grid, path, 3)
    samples, failed = K.em_log(times, np.log(x0), p.as_array(), n.sigmas, path.increments)
    if failed >= 0:
        _raise_failure(failed, times)
    samples[0] = x0
    return Trajectory(grid, samples, ("x", "y", "z"), t=times)


def integrate_sde_direct(
    p: ThreeVarParams, n: NoiseSpec, initial, grid: TimeGrid, path: BrownianPath | None = None
) -> Trajectory:
    """Euler-Maruyama on the population SDE with multiplicative noise.

    Kept as a cross-check of :func:`integrate_sde_log`; a step that leaves the
    positive orthant raises :class:`NonFiniteState`.
    """
    if path is None:
        path = brownian_path(grid, 3, n.seed)
    x0, times = _check_inputs(p, initial, grid, path, 3)
    samples, failed = K.em_direct(times, x0, sde_param_vector(p, n), path.increments)
    if failed >= 0:
        _raise_failure(failed, times)
    return Trajectory(grid, samples, ("x", "y", "z"), t=times)


def count_busts(x: np.ndarray, level: float, reset: float | None = None) -> int:
    """Number of excursions of ``x`` to ``level`` or above.

    A new bust only counts after ``x`` has dropped below ``reset``
    (``level / 4`` by default).
    """
    if reset is None:
        reset = level / 4
    return int(K.count_busts(np.ascontiguousarray(x, dtype=float), float(level), float(reset)))


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    t: np.ndarray
    labels: tuple
    mean: np.ndarray
    p10: np.ndarray
    p50: np.ndarray
    p90: np.ndarray
    peaks: np.ndarray
    peak_times: np.ndarray
    bust_counts: np.ndarray
    runs: int
    seeds: tuple
    failures: dict = field(default_factory=dict)
    seed_policy: str = SEED_POLICY

    @property
    def multi_bust_fraction(self) -> float:
        return float(np.mean(self.bust_counts >= 2)) if len(self.bust_counts) else 0.0


def _one_run(p, noise, initial, grid, seed, bust_level, reset, stride):
    traj = integrate_sde_log(p, noise.with_seed(seed), initial, grid)
    x = traj.samples[:, 0]
    k = int(np.argmax(x))
    return (
        traj.samples[::stride].copy(),
        float(x[k]),
        float(traj.t[k]),
        count_busts(x, bust_level, reset),
    )


def ensemble_stats(
    p: ThreeVarParams,
    n: NoiseSpec,
    initial,
    grid: TimeGrid,
    runs: int,
    bust_level: float = 0.3,
    reset_level: float | None = None,
    band_points: int = 2001,
    workers: int | None = None,
) -> EnsembleSummary:
    """Run ``runs`` independent log-space integrations and summarise them.

    Run ``i`` uses seed ``derive_seed(n.seed, i)``. Peaks and bust counts are
    taken from the full-resolution path; the mean/quantile bands are computed
    on every ``stride``-th grid point so that at most ``band_points`` remain.
    Failed runs are recorded in ``failures`` and left out of the statistics.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    p.check_stochastic_signs()
    times = grid.times()
    stride = max(1, -(-(len(times) - 1) // max(1, band_points - 1)))
    seeds = tuple(derive_seed(n.seed, i) for i in range(runs))
    reset = bust_level / 4 if reset_level is None else reset_level

    def task(i):
        try:
            return i, _one_run(p, n, initial, grid, seeds[i], bust_level, reset, stride)
        except EthnoError as exc:
            return i, exc

    workers = workers or os.cpu_count() or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, range(runs)))
    else:
        results = [task(i) for i in range(runs)]
    results.sort(key=lambda r: r[0])

    failures = {i: str(r) for i, r in results if isinstance(r, Exception)}
    for i, msg in failures.items():
        log.warning("run %d failed: %s", i, msg)
    ok = [r for _, r in results if not isinstance(r, Exception)]
    if not ok:
        raise NonFiniteState("every ensemble run failed")
    stack = np.stack([r[0] for r in ok])
    q10, q50, q90 = np.quantile(stack, [0.1, 0.5, 0.9], axis=0)
    return EnsembleSummary(
        t=times[::stride],
        labels=("x", "y", "z"),
        mean=stack.mean(axis=0),
        p10=q10,
        p50=q50,
        p90=q90,
        peaks=np.array([r[1] for r in ok]),
        peak_times=np.array([r[2] for r in ok]),
        bust_counts=np.array([r[3] for r in ok], dtype=int),
        runs=runs,
        seeds=seeds,
        failures=failures,
    )
