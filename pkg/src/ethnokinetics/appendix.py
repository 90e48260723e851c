"""Numerical checks of the prism construction and the Brownian range bound.

A prism is the box (0, a] x (0, b] x (0, c] in population coordinates. The
drift of the three-variable model points inward on its outer facets when the
per-capita brackets are negative there; a sequence of prisms growing by
``e**k`` in every direction carries the same property slab by slab.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import NoValidBase, ParamSignViolation
from .models import ThreeVarParams


@dataclass(frozen=True)
class Prism:
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not getattr(self, name) > 1:
                raise ValueError(f"prism bound {name}={getattr(self, name)} must exceed 1")

    def contains(self, state, strict: bool = True) -> bool:
        x, y, z = state
        if strict:
            return 0 < x < self.a and 0 < y < self.b and 0 < z < self.c
        return 0 < x <= self.a and 0 < y <= self.b and 0 < z <= self.c


@dataclass(frozen=True)
class FacetCheck:
    facet: str
    passed: bool
    worst: float
    where: tuple


def _brackets(p, x, y, z):
    return K.brackets_three(
        np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float), p.as_array()
    )


def _sup(values, coords):
    i = int(np.argmax(values))
    return float(values.flat[i]), tuple(float(np.broadcast_to(c, values.shape).flat[i]) for c in coords)


def prism_drift_check(p: ThreeVarParams, prism: Prism, samples_per_facet: int = 201) -> dict:
    """Supremum of the relevant bracket on each outer facet; pass iff negative.

    With beta12 <= 0 the x-facet bracket is largest as y -> 0+, and with
    beta32 <= 0 the same holds on the z-facet, so y is pinned at 0 there.
    Open lower ends of the box are sampled at their closure.
    """
    p.check_stochastic_signs()
    a, b, c = prism.a, prism.b, prism.c
    m = samples_per_facet
    zs = np.linspace(0.0, c, m)
    xs = np.linspace(0.0, a, m)

    bx = _brackets(p, np.full(m, a), np.zeros(m), zs)[0]
    wx, (_, _, zx) = _sup(bx, (a, 0.0, zs))
    bz = _brackets(p, xs, np.zeros(m), np.full(m, c))[2]
    wz, (xz, _, _) = _sup(bz, (xs, 0.0, c))
    X, Z = np.meshgrid(xs, zs, indexing="ij")
    by = _brackets(p, X, np.full_like(X, b), Z)[1]
    wy, (xy, _, zy) = _sup(by, (X, b, Z))
    return {
        "x": FacetCheck("x", wx < 0, wx, (a, 0.0, zx)),
        "y": FacetCheck("y", wy < 0, wy, (xy, b, zy)),
        "z": FacetCheck("z", wz < 0, wz, (xz, 0.0, c)),
    }


def expanded_x_curve(p: ThreeVarParams, k: float, x):
    """z-value of the x-nullcline parabola (at y = 0) shrunk by ``e**k``."""
    x = np.asarray(x, dtype=float)
    return -((1 - x) * (x - p.alpha1) - p.beta12 * p.y0 - p.beta13 * p.z0) / (p.beta13 * math.exp(k))


def expanded_z_curve(p: ThreeVarParams, k: float, z):
    """x-value of the z-nullcline parabola (at y = 0) shrunk by ``e**k``."""
    z = np.asarray(z, dtype=float)
    return -((p.z0 - z) * (z - p.alpha2) - p.beta32 * p.y0) / (p.beta31 * math.exp(k))


@dataclass(frozen=True)
class SlabCheck:
    index: int
    direction: str
    passed: bool
    worst: float


@dataclass(frozen=True)
class PrismSequence:
    k: float
    prisms: tuple
    origin_state: tuple
    checks: tuple = ()

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)


def _y_floor(p, a, c):
    return p.y0 + p.beta21 * a + p.beta23 * (c - p.z0)


def _base_ok(p, k, s, points):
    span = np.linspace(s, s * math.exp(k), points)
    return bool(np.all(s < expanded_x_curve(p, k, span)) and np.all(s < expanded_z_curve(p, k, span)))


def slab_checks(p: ThreeVarParams, prisms, resolution: int = 50) -> list:
    """Bracket signs on the slabs between consecutive prisms, ``resolution**3`` samples each."""
    out = []
    r = resolution
    for i in range(1, len(prisms)):
        lo, hi = prisms[i - 1], prisms[i]
        slabs = {
            "x": (np.linspace(lo.a, hi.a, r), np.linspace(0, hi.b, r), np.linspace(0, hi.c, r), 0),
            "y": (np.linspace(0, hi.a, r), np.linspace(lo.b, hi.b, r), np.linspace(0, hi.c, r), 1),
            "z": (np.linspace(0, hi.a, r), np.linspace(0, hi.b, r), np.linspace(lo.c, hi.c, r), 2),
        }
        for name, (xs, ys, zs, j) in slabs.items():
            X, Y, Z = np.meshgrid(xs, ys, zs, indexing="ij")
            worst = float(np.max(_brackets(p, X, Y, Z)[j]))
            out.append(SlabCheck(i, name, worst < 0, worst))
    return out


def build_prism_sequence(
    p: ThreeVarParams,
    k: float,
    n: int,
    initial,
    margin: float = 1e-2,
    scan_step: float = 1.05,
    curve_points: int = 1000,
    check_resolution: int = 50,
) -> PrismSequence:
    """Nested prisms with ``a_i = a_{i-1} e^k``, ``c_i = c_{i-1} e^k``.

    ``a_0 = c_0`` is the first value of an ascending scan (factor
    ``scan_step``) lying strictly below both expanded parabolas on
    ``[a_0, a_0 e^k]``. ``b_i`` follows
    ``max(y0 + beta21 a_{i+1} + beta23 (c_{i+1} - z0) + margin, b_{i-1} e^k)``;
    the margin keeps the y-slab brackets strictly negative. The returned
    sequence carries its slab checks.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    if n < 1:
        raise ValueError("need at least one prism")
    p.check_stochastic_signs()
    if p.beta13 <= 0 or p.beta31 <= 0:
        raise ParamSignViolation("prism construction assumes beta13 > 0 and beta31 > 0")
    x0, y0_, z0_ = (float(v) for v in initial)
    growth = math.exp(k)

    s = max(1.0, x0, z0_) * (1 + 1e-9) + 1e-9
    while not _base_ok(p, k, s, curve_points):
        s *= scan_step
        if s > 1e6:
            raise NoValidBase(f"no a0 = c0 <= 1e6 satisfies the prism inequalities for k={k}")

    a = [s]
    for _ in range(n):
        a.append(a[-1] * growth)
    c = list(a)
    b = [max(_y_floor(p, a[1], c[1]), y0_, 1.0) + margin]
    for i in range(1, n):
        b.append(max(_y_floor(p, a[i + 1], c[i + 1]) + margin, b[-1] * growth))
    prisms = tuple(Prism(a[i], b[i], c[i]) for i in range(n))
    if not prisms[0].contains((x0, y0_, z0_)):
        raise NoValidBase("prism 0 does not contain the initial state")
    checks = list(slab_checks(p, prisms, check_resolution))
    for i, pr in enumerate(prisms):
        for f in prism_drift_check(p, pr).values():
            checks.append(SlabCheck(i, f"facet-{f.facet}", f.passed, f.worst))
    return PrismSequence(k, prisms, (x0, y0_, z0_), tuple(checks))


def gaussian_tail(d: float) -> float:
    """P(N(0,1) >= d)."""
    return 0.5 * math.erfc(d / math.sqrt(2.0))


def range_bound(a: float, tau: float) -> float:
    """Reflection-principle bound on P(max |W| >= a over [0, tau])."""
    return 4.0 * gaussian_tail(a / math.sqrt(tau))


def _chunk_extremes(seed, chunk, m, steps, sd):
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(chunk)]))
    w = rng.standard_normal((m, steps))
    np.cumsum(w, axis=1, out=w)
    return np.maximum(w.max(axis=1), -w.min(axis=1)) * sd


def brownian_range_probabilities(
    levels,
    tau: float,
    n_samples: int = 100_000,
    seed: int = 0,
    dt: float = 1e-4,
    workers: int | None = None,
    chunk_cells: int = 2_000_000,
):
    """Monte Carlo P(sup W >= a or inf W <= -a) for several levels at once.

    Paths are simulated in fixed-size chunks, chunk ``j`` seeded from
    ``(seed, j)``, so the estimate does not depend on ``workers``.
    Returns ``(empirical, bounds)`` arrays aligned with ``levels``.
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    if tau <= 0 or np.any(levels <= 0):
        raise ValueError("levels and tau must be positive")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    steps = max(1, math.ceil(tau / dt - 1e-9))
    sd = math.sqrt(tau / steps)
    per_chunk = max(1, chunk_cells // steps)
    sizes = [min(per_chunk, n_samples - s) for s in range(0, n_samples, per_chunk)]

    def task(j):
        return _chunk_extremes(seed, j, sizes[j], steps, sd)

    workers = workers or os.cpu_count() or 1
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, range(len(sizes))))
    else:
        parts = [task(j) for j in range(len(sizes))]
    extremes = np.concatenate(parts)
    empirical = (extremes[:, None] >= levels[None, :]).mean(axis=0)
    bounds = np.array([range_bound(a, tau) for a in levels])
    return empirical, bounds


def brownian_range_bound(
    a: float, tau: float, n_samples: int = 100_000, seed: int = 0, dt: float = 1e-4, workers: int | None = None
):
    """``(empirical probability, analytic bound)`` for one level ``a``."""
    emp, bound = brownian_range_probabilities([a], tau, n_samples, seed, dt, workers)
    return float(emp[0]), float(bound[0])


def min_k_for_tau(tau: float, sigma_max: float, tol: float = 1e-6) -> float:
    """Smallest step k with 4 P(N(0,1) >= k / (2 sigma sqrt(tau))) < 1/3, by bisection."""
    if tau <= 0 or sigma_max <= 0:
        raise ValueError("tau and sigma_max must be positive")
    scale = 2.0 * sigma_max * math.sqrt(tau)

    def excess(k):
        return 4.0 * gaussian_tail(k / scale) - 1.0 / 3.0

    lo, hi = 0.0, scale
    while excess(hi) >= 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            hi = mid
        else:
            lo = mid
    return hi
