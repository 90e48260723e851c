"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly as a script.
Tolerances are the stated ones; failing criteria are left failing.
"""

import math
import time

import numpy as np
import pytest

import conftest
from ethnokinetics.appendix import (
    Prism,
    brownian_range_probabilities,
    build_prism_sequence,
    gaussian_tail,
    min_k_for_tau,
    prism_drift_check,
)
from ethnokinetics.equilibria import equilibria_three_var, jacobian
from ethnokinetics.integrate import TimeGrid, integrate_ode, spike_duration
from ethnokinetics.interaction import dominance_ensemble, integrate_interacting
from ethnokinetics.models import InteractionSpec, NoiseSpec, model_rhs, rhs_two_var
from ethnokinetics.presets import PRESETS
from ethnokinetics.sde import BrownianPath, brownian_path, ensemble_stats, integrate_sde_log, integrate_sde_direct

SEED_SWEEP = 100


def record(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def run_preset(name, initial=None, tf=200.0, dt=1e-3):
    s = PRESETS[name]
    return integrate_ode(model_rhs(s.params), initial or s.initial, TimeGrid(0.0, tf, dt))


def test_criterion_1_fig2():
    start = time.perf_counter()
    traj = run_preset("fig2")
    elapsed = time.perf_counter() - start
    x, y = traj["x"], traj["y"]
    k = int(np.argmax(x))
    dur = spike_duration(traj.t, x, 0.1)
    checks = {
        "x peak in [0.9,1.1]": 0.9 <= x[k] <= 1.1,
        "peak time in [12,18]": 12 <= traj.t[k] <= 18,
        "y peak in [0.17,0.23]": 0.17 <= y.max() <= 0.23,
        "duration in [45,75]": 45 <= dur <= 75,
        "runtime < 5 s": elapsed < 5,
    }
    bad = [c for c, ok in checks.items() if not ok]
    record(1, not bad, f"x_peak={x[k]:.4f} t={traj.t[k]:.3f} y_peak={y.max():.4f} duration={dur:.2f} "
                       f"runtime={elapsed:.2f}s failing={bad}")


def test_criterion_2_fig4():
    excited = run_preset("fig4", tf=2000.0)
    quiet = run_preset("fig4", initial=(0.04, 0.053, 0.05), tf=2000.0)
    peak = excited["x"].max()
    end1 = np.max(np.abs(excited.final - [0, 0.075, 0.22]))
    end2 = np.max(np.abs(quiet.final - [0, 0.053, 0]))
    ok = 0.45 <= peak <= 0.55 and end1 < 1e-2 and quiet["x"].max() < 0.1 and end2 < 1e-2
    record(2, ok, f"peak={peak:.4f} terminal_gap={end1:.2e} sub_peak={quiet['x'].max():.4f} sub_terminal_gap={end2:.2e} "
                  f"(horizon 2000)")


def test_criterion_3_fig5_fig6():
    p5 = run_preset("fig5")["x"].max()
    p6 = run_preset("fig6")["x"].max()
    record(3, 0.15 <= p5 <= 0.25 and 0.6 <= p6 <= 0.8, f"fig5_peak={p5:.4f} in [0.15,0.25]; fig6_peak={p6:.4f} in [0.6,0.8]")


def test_criterion_4_equilibria():
    p = PRESETS["fig4"].params
    reports = equilibria_three_var(p)
    listed = [(0, 0, 0), (0, 0.053, 0), (0, 0.064, 0.11), (0, 0.075, 0.22), (0, 0, 0.22), (0, 0, 0.11)]
    found = []
    for target in listed:
        gaps = [np.max(np.abs(r.point - target)) for r in reports]
        i = int(np.argmin(gaps))
        found.append((gaps[i] < 1e-9, reports[i].stability))
    stable = sorted(tuple(round(float(v), 9) for v in r.point) for r in reports if r.stability == "stable")
    ok = all(f for f, _ in found) and stable == [(0, 0.053, 0), (0, 0.075, 0.22)]
    record(4, ok, f"listed_found={sum(f for f, _ in found)}/6 stable={stable} total_states={len(reports)}")


def test_criterion_5_sde_consistency():
    p, n = PRESETS["fig7a"].params, PRESETS["fig7a"].noise
    x0 = PRESETS["fig7a"].initial
    fine, coarse = TimeGrid(0, 50, 5e-4), TimeGrid(0, 50, 1e-3)
    gaps_coarse, improved = [], 0
    for seed in range(50):
        path_f = brownian_path(fine, 3, seed)
        path_c = BrownianPath(coarse, path_f.increments.reshape(-1, 2, 3).sum(axis=1), 3, seed)
        g_c = np.max(np.abs(integrate_sde_log(p, n, x0, coarse, path_c)["x"] - integrate_sde_direct(p, n, x0, coarse, path_c)["x"]))
        g_f = np.max(np.abs(integrate_sde_log(p, n, x0, fine, path_f)["x"] - integrate_sde_direct(p, n, x0, fine, path_f)["x"]))
        gaps_coarse.append(g_c)
        improved += g_f < g_c
    worst = max(gaps_coarse)
    ok = worst < 0.05 and improved >= 45
    record(5, ok, f"max_gap_dt1e-3={worst:.2e} (<0.05) halving_improves={improved}/50 (need >=45)")


def test_criterion_6_busts():
    s = PRESETS["fig7b"]
    start = time.perf_counter()
    e = ensemble_stats(s.params, s.noise, s.initial, s.grid, 200, bust_level=0.3, reset_level=0.075)
    elapsed = time.perf_counter() - start
    med = float(np.median(e.peaks))
    det = float(run_preset("fig4")["x"].max())
    ok = e.multi_bust_fraction > 0 and med > 0.5 and elapsed < 120
    record(6, ok, f"multi_bust_fraction={e.multi_bust_fraction:.3f} median_peak={med:.4f} (>0.5; deterministic {det:.4f}) "
                  f"failed_runs={len(e.failures)} runtime={elapsed:.1f}s")


def test_criterion_7_interaction():
    s = PRESETS["fig8"]
    quiet = NoiseSpec.uniform(0.0)
    spec = s.interaction
    coupled = integrate_interacting(s.params, quiet, spec, s.initial, s.grid)
    ref = integrate_interacting(s.params, quiet, InteractionSpec(0, 0, spec.T1, spec.T2), s.initial, s.grid)
    drop2 = 1 - coupled.ethnos2[:, 0].max() / ref.ethnos2[:, 0].max()
    drift1 = abs(coupled.ethnos1[:, 0].max() / ref.ethnos1[:, 0].max() - 1)
    reps = dominance_ensemble(s.params, NoiseSpec.uniform(0.05, 0), spec, s.initial, s.grid, 200)
    counts = {k: sum(r.suppressed == k for r in reps) for k in ("ethnos1", "ethnos2", "neither")}
    ok = drop2 >= 0.10 and drift1 <= 0.03 and counts["ethnos1"] > 0 and counts["ethnos2"] > 0 \
        and counts["ethnos2"] > counts["ethnos1"]
    record(7, ok, f"T1={spec.T1} T2={spec.T2} X2_drop={drop2:.3f} (>=0.10) X1_change={drift1:.4f} (<=0.03) "
                  f"noisy_outcomes={counts}")


@pytest.mark.slow
def test_criterion_8_appendix():
    p = PRESETS["fig4"].params
    good = prism_drift_check(p, Prism(3.0, 1.5, 3.0))
    bad = prism_drift_check(p, Prism(1.5, 1.5, 1.5))
    a_ok = (all(r.passed for r in good.values()) and not bad["x"].passed
            and abs(good["x"].worst + 3.822) < 1e-6 and abs(bad["x"].worst - 0.483) < 1e-6)

    seq = build_prism_sequence(p, 0.75, 3, PRESETS["fig4"].initial)
    b_ok = seq.prisms[1].a == seq.prisms[0].a * math.exp(0.75) and seq.valid

    c_ok, worst_excess = True, -np.inf
    start = time.perf_counter()
    levels = [1.0, 1.5, 2.0, 3.0]
    for tau in (0.5, 1.0, 2.0):
        emp, bound = brownian_range_probabilities(levels, tau, 100_000, seed=0, dt=1e-4)
        slack = 3 * np.sqrt(np.minimum(bound, 1) * (1 - np.minimum(bound, 1)) / 100_000)
        worst_excess = max(worst_excess, float(np.max(emp - bound)))
        c_ok &= bool(np.all(emp <= bound + slack))
    mc_time = time.perf_counter() - start

    k = min_k_for_tau(1.0, 1.0)
    d_ok = abs(k - 2.766) <= 1e-3 and abs(4 * gaussian_tail(k / 2) - 1 / 3) < 1e-5
    record(8, a_ok and b_ok and c_ok and d_ok,
           f"(a) worst={good['x'].worst:.6f}/{bad['x'].worst:.6f} {a_ok} (b) ratio={seq.prisms[1].a / seq.prisms[0].a:.6f} "
           f"valid={seq.valid} (c) max(emp-bound)={worst_excess:.4f} {c_ok} [{mc_time:.0f}s] (d) k={k:.6f} {d_ok}")


def test_criterion_9_hygiene():
    p4 = PRESETS["fig4"].params
    f = [integrate_ode(model_rhs(p4), (0.07, 0.053, 0.05), TimeGrid(0, 10, h)).final for h in (0.1, 0.05, 0.025)]
    ratio = np.linalg.norm(f[0] - f[1]) / np.linalg.norm(f[1] - f[2])

    p2 = PRESETS["fig2"].params
    eig = np.linalg.eigvals(jacobian(rhs_two_var, (0.0, p2.y0), p2))
    eig_gap = float(np.min(np.abs(eig - (-p2.gamma * p2.y0))))

    negatives, swept = 0, []
    grid = TimeGrid(0, 200, 1e-3)
    for name, s in PRESETS.items():
        if s.model == "two_var":
            continue
        sigma = s.noise if s.noise is not None and s.noise.sigmas.max() > 0 else NoiseSpec.uniform(0.05)
        for seed in range(SEED_SWEEP):
            n = sigma.with_seed(seed)
            if s.model == "interaction":
                dual = integrate_interacting(s.params, n, s.interaction, s.initial, s.grid)
                samples = np.hstack([dual.ethnos1, dual.ethnos2])
            else:
                samples = integrate_sde_log(s.params, n, s.initial, grid).samples
            negatives += int(np.sum(~(samples > 0)))
        swept.append(name)
    ok = 10 <= ratio <= 24 and eig_gap < 1e-5 and negatives == 0
    record(9, ok, f"richardson={ratio:.3f} eig_gap={eig_gap:.1e} nonpositive_samples={negatives} "
                  f"presets={','.join(swept)} x {SEED_SWEEP} seeds")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
