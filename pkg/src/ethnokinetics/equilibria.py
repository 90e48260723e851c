"""Steady states, their linear stability, and nullcline tracing."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from skimage.measure import find_contours

from . import _kernels as K
from .errors import NewtonDivergence, ResidualTooLarge
from .models import (
    LVParams,
    ThreeVarParams,
    TwoVarParams,
    rhs_lotka_volterra,
    rhs_three_var,
    rhs_two_var,
)

log = logging.getLogger(__name__)

STABILITY_TOL = 1e-8
FAMILIES = ("origin", "axis_y", "axis_x_pair", "interior", "x2_family", "x34_family", "x56_family", "numeric")


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    point: np.ndarray
    family: str
    stability: str
    eigenvalues: np.ndarray
    residual: float
    aliases: tuple = ()

    @property
    def re_lambda_max(self) -> float:
        return float(np.max(self.eigenvalues.real))


def real_quadratic_roots(a: float, b: float, c: float) -> list:
    """Real roots of ``a x^2 + b x + c`` (a repeated root is returned twice)."""
    if a == 0:
        return [] if b == 0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0:
        return [0.0, 0.0]
    return sorted([q / a, c / q])


def _rhs_for(p) -> Callable:
    if isinstance(p, ThreeVarParams):
        return rhs_three_var
    if isinstance(p, TwoVarParams):
        return rhs_two_var
    if isinstance(p, LVParams):
        return rhs_lotka_volterra
    raise TypeError(type(p).__name__)


def jacobian(rhs: Callable, point, p, rel_step: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian, step ``rel_step * max(1, |s_j|)``."""
    s = np.asarray(point, dtype=float)
    d = s.shape[0]
    jac = np.empty((d, d))
    for j in range(d):
        h = rel_step * max(1.0, abs(s[j]))
        e = np.zeros(d)
        e[j] = h
        jac[:, j] = (rhs(s + e, p) - rhs(s - e, p)) / (2 * h)
    return jac


def stability_class(eigenvalues, tol: float = STABILITY_TOL) -> str:
    re = np.real(eigenvalues)
    if np.any(np.abs(re) <= tol):
        return "marginal"
    if np.all(re < 0):
        return "stable"
    if np.all(re > 0):
        return "unstable"
    return "saddle"


def classify_equilibrium(rhs: Callable, point, p, residual_tol: float = 1e-8):
    """Linear stability of ``point``; returns ``(stability, eigenvalues)``."""
    s = np.asarray(point, dtype=float)
    res = float(np.linalg.norm(rhs(s, p)))
    if res >= residual_tol:
        raise ResidualTooLarge(f"|f(point)| = {res:.3g} is not an equilibrium")
    eig = np.linalg.eigvals(jacobian(rhs, s, p))
    return stability_class(eig), eig


def _report(rhs, point, p, family):
    point = np.asarray(point, dtype=float)
    stability, eig = classify_equilibrium(rhs, point, p)
    return EquilibriumReport(point, family, stability, eig, float(np.linalg.norm(rhs(point, p))))


def _merge(reports, radius=1e-9):
    merged = []
    for r in reports:
        for i, m in enumerate(merged):
            if np.linalg.norm(m.point - r.point) <= radius:
                merged[i] = EquilibriumReport(
                    m.point, m.family, m.stability, m.eigenvalues, m.residual, m.aliases + (r.family,)
                )
                break
        else:
            merged.append(r)
    return merged


def equilibria_two_var(p: TwoVarParams) -> list:
    """Closed-form steady states of the two-variable model, each classified.

    Complex pairs are skipped, so fewer than six entries means some roots were
    complex (or coincided).
    """
    pts = [((0.0, 0.0), "origin"), ((0.0, p.y0), "axis_y")]
    # (1-x)(x-alpha) - beta1*y0 = 0 on the x axis
    for x in real_quadratic_roots(1.0, -(1 + p.alpha), p.alpha + p.beta1 * p.y0):
        pts.append(((x, 0.0), "axis_x_pair"))
    # parabola meets the line y = y0 + beta2 x
    for x in real_quadratic_roots(1.0, -(1 + p.alpha + p.beta1 * p.beta2), p.alpha):
        pts.append(((x, p.y0 + p.beta2 * x), "interior"))
    reports = _merge([_report(rhs_two_var, pt, p, fam) for pt, fam in pts])
    log.debug("two-variable model: %d real equilibria", len(reports))
    return reports


def closed_form_three_var(p: ThreeVarParams) -> list:
    """The x = 0 steady states as ``(point, family)`` pairs."""
    pts = [((0.0, 0.0, 0.0), "origin"), ((0.0, p.y0 - p.beta23 * p.z0, 0.0), "x2_family")]
    k = p.beta32 * p.beta23
    for z in real_quadratic_roots(1.0, -(p.z0 + p.alpha2 + k), p.z0 * (p.alpha2 + k)):
        pts.append(((0.0, p.y0 + p.beta23 * (z - p.z0), z), "x34_family"))
    for z in real_quadratic_roots(1.0, -(p.z0 + p.alpha2), p.z0 * p.alpha2 + p.beta32 * p.y0):
        pts.append(((0.0, 0.0, z), "x56_family"))
    return pts


def newton_search(
    p: ThreeVarParams,
    n_per_axis: int = 20,
    box: tuple = (0.0, 1.2),
    max_iter: int = 50,
    merge_radius: float = 1e-6,
    tol: float = 1e-13,
):
    """Newton from an ``n_per_axis**3`` seed lattice over ``box**3``.

    Returns ``(roots, failures)``; roots are distinct converged points,
    failures a list of :class:`NewtonDivergence`, one per bad seed.
    """
    axis = np.linspace(box[0], box[1], n_per_axis)
    seeds = np.array(np.meshgrid(axis, axis, axis, indexing="ij")).reshape(3, -1).T.copy()
    roots, status = K.newton_batch(K.THREE_VAR, seeds, p.as_array(), max_iter, tol)
    reasons = {1: "singular Jacobian", 2: "iterate blew up", 3: "no convergence"}
    failures = [NewtonDivergence(seeds[i], reasons[int(s)]) for i, s in enumerate(status) if s != 0]
    found = []
    for r in roots[status == 0]:
        if not any(np.linalg.norm(r - f) <= merge_radius for f in found):
            found.append(r)
    return found, failures


def equilibria_three_var(p: ThreeVarParams, newton: bool = True, **search) -> list:
    """All closed-form x = 0 steady states plus Newton-found states with x != 0."""
    reports = [_report(rhs_three_var, pt, p, fam) for pt, fam in closed_form_three_var(p)]
    if newton:
        roots, failures = newton_search(p, **search)
        if failures:
            log.debug("%d Newton seeds failed", len(failures))
        for r in roots:
            if abs(r[0]) > 1e-9:
                reports.append(_report(rhs_three_var, r, p, "numeric"))
    return _merge(reports)


def _bracket_field(p, which, X, Y, plane, fixed):
    if isinstance(p, (TwoVarParams, LVParams)):
        x, y = X, Y
        if isinstance(p, TwoVarParams):
            fields = ((1 - x) * (x - p.alpha) + p.beta1 * (y - p.y0), p.y0 - y + p.beta2 * x)
        else:
            fields = (1 - x + p.beta1 * y, 1 - y + p.beta2 * x)
        return fields[which]
    coords = [np.full_like(X, v) for v in fixed]
    coords[plane[0]] = X
    coords[plane[1]] = Y
    return K.brackets_three(coords[0], coords[1], coords[2], p.as_array())[which]


def trace_nullclines(
    p,
    which: int,
    window: tuple = ((0.0, 1.2), (0.0, 1.0)),
    resolution: tuple = (241, 201),
    plane: tuple = (0, 1),
    fixed: tuple | None = None,
    include_axes: bool = True,
) -> list:
    """Polylines (arrays of shape (k, 2)) where the ``which``-th derivative vanishes.

    The non-trivial branch is the zero contour of the per-capita factor, found
    by marching squares on a ``resolution`` lattice over ``window``. The
    trivial branch (the variable itself equal to zero) is emitted as an
    explicit segment when it lies in the plotted plane and window. For the
    three-variable model ``plane`` picks the two plotted coordinates and the
    third is held at ``fixed`` (default: x=0, y=y0, z=z0).
    """
    (xlo, xhi), (ylo, yhi) = window
    if not (xhi > xlo and yhi > ylo):
        raise ValueError("window must have positive width and height")
    nx, ny = resolution
    xs = np.linspace(xlo, xhi, nx)
    ys = np.linspace(ylo, yhi, ny)
    X, Y = np.meshgrid(xs, ys)
    if isinstance(p, ThreeVarParams) and fixed is None:
        fixed = (0.0, p.y0, p.z0)
    field = _bracket_field(p, which, X, Y, plane, fixed)
    lines = []
    if include_axes:
        if which == plane[0] and xlo <= 0 <= xhi:
            lines.append(np.array([[0.0, ylo], [0.0, yhi]]))
        elif which == plane[1] and ylo <= 0 <= yhi:
            lines.append(np.array([[xlo, 0.0], [xhi, 0.0]]))
    dx = (xhi - xlo) / (nx - 1)
    dy = (yhi - ylo) / (ny - 1)
    for c in find_contours(field, 0.0):
        lines.append(np.column_stack([xlo + c[:, 1] * dx, ylo + c[:, 0] * dy]))
    return lines
