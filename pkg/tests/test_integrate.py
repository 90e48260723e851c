import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from conftest import CAPTION_INITIAL, CAPTION_TABLE
from ethnokinetics.appendix import build_prism_sequence
from ethnokinetics.errors import KnotMisalignment, NonFiniteState
from ethnokinetics.integrate import (
    RealScale,
    TimeGrid,
    Trajectory,
    detect_excitation,
    integrate_ode,
    scale_to_real,
    spike_duration,
)
from ethnokinetics.models import ThreeVarParams, TwoVarParams, model_rhs, rhs_three_var


def run(p, x0, tf, dt=1e-3):
    return integrate_ode(model_rhs(p), x0, TimeGrid(0.0, tf, dt))


class TestTimeGrid:
    def test_uniform(self):
        t = TimeGrid(0, 1, 0.1).times()
        assert len(t) == 11 and t[0] == 0 and t[-1] == 1
        assert np.allclose(np.diff(t), 0.1)

    def test_knots_hit_exactly(self):
        g = TimeGrid(0, 10, 0.3, (2.05, 7.3))
        t = g.times()
        assert 2.05 in t and 7.3 in t
        assert np.max(np.diff(t)) <= 0.3 + 1e-12
        assert g.index_of(7.3) == int(np.flatnonzero(t == 7.3)[0])

    def test_dt_snaps_down(self):
        t = TimeGrid(0, 1, 0.3).times()
        assert np.allclose(np.diff(t), 0.25)

    def test_index_of_missing(self):
        with pytest.raises(KnotMisalignment):
            TimeGrid(0, 1, 0.1).index_of(0.05)

    @pytest.mark.parametrize("args", [(1, 0, 0.1), (0, 1, 0.0), (0, 1, -1)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            TimeGrid(*args)

    def test_knot_outside(self):
        with pytest.raises(KnotMisalignment):
            TimeGrid(0, 1, 0.1, (2.0,))


def test_zero_rhs_constant():
    traj = integrate_ode(lambda t, s: np.zeros_like(s), [0.3, 0.4], TimeGrid(0, 5, 0.5))
    assert np.array_equal(traj.samples, np.tile([0.3, 0.4], (11, 1)))


def test_python_and_compiled_paths_agree(fig4):
    grid = TimeGrid(0, 20, 1e-2)
    compiled = integrate_ode(model_rhs(fig4), (0.07, 0.053, 0.05), grid)
    python = integrate_ode(lambda t, s: rhs_three_var(s, fig4), (0.07, 0.053, 0.05), grid)
    assert np.max(np.abs(compiled.samples - python.samples)) < 1e-13


def test_against_scipy_oracle(fig4):
    x0 = (0.07, 0.053, 0.05)
    traj = run(fig4, x0, 60.0)
    ref = solve_ivp(lambda t, s: rhs_three_var(s, fig4), (0, 60), x0, method="DOP853",
                    rtol=1e-12, atol=1e-14, t_eval=traj.t[::1000])
    assert np.max(np.abs(traj.samples[::1000] - ref.y.T)) < 1e-8


def test_richardson_order(fig4):
    f = [run(fig4, (0.07, 0.053, 0.05), 10.0, h).final for h in (0.1, 0.05, 0.025)]
    ratio = np.linalg.norm(f[0] - f[1]) / np.linalg.norm(f[1] - f[2])
    assert 10 <= ratio <= 24


def test_rejects_nonpositive_initial(fig4):
    with pytest.raises(ValueError):
        run(fig4, (0.0, 0.05, 0.05), 1.0)


def test_nonfinite_detected():
    with np.errstate(over="ignore", invalid="ignore"), pytest.raises(NonFiniteState) as exc:
        integrate_ode(lambda t, s: s**3, [10.0], TimeGrid(0, 10, 0.5))
    assert exc.value.step is not None


def test_blowup_in_compiled_path():
    p = TwoVarParams(0.02, 0.05, -1 / 3, 2.5, 0.1)
    with pytest.raises(NonFiniteState):
        integrate_ode(model_rhs(p), (50.0, 0.05), TimeGrid(0, 100, 1.0))


@pytest.mark.parametrize("name", ["fig2", "fig3", "fig4", "fig5", "fig6"])
def test_positivity_captions(name):
    kw = CAPTION_TABLE[name]
    p = TwoVarParams(**kw) if "alpha" in kw else ThreeVarParams(**kw)
    traj = run(p, CAPTION_INITIAL[name], 200.0, 1e-2)
    assert np.all(traj.samples > 0)


def test_fig2_example(fig2):
    traj = run(fig2, (0.1, 0.05), 200.0)
    rep = detect_excitation(traj)
    assert rep.peak_value == pytest.approx(0.9262653783732044, abs=1e-9)
    assert rep.peak_time == pytest.approx(17.262, abs=1e-9)


def test_fig4_example(fig4):
    traj = run(fig4, (0.07, 0.053, 0.05), 200.0)
    rep = detect_excitation(traj, excitation_level=0.3)
    assert rep.excited
    assert rep.peak_value == pytest.approx(0.4824932145279906, abs=1e-9)
    assert rep.peak_time == pytest.approx(26.151, abs=1e-9)


def test_fig4_subthreshold(fig4):
    traj = run(fig4, (0.04, 0.053, 0.05), 1000.0, 1e-2)
    rep = detect_excitation(traj, equilibria=[(0, 0.053, 0), (0, 0.075, 0.22)], settle_tolerance=1e-2)
    assert not rep.excited
    assert np.allclose(rep.terminal_attractor, (0, 0.053, 0))


def test_constant_trajectory_not_excited(fig4):
    traj = run(fig4, (1e-300, 0.075, 0.22), 10.0)
    rep = detect_excitation(traj, excitation_level=0.3)
    assert not rep.excited and rep.spike_duration == 0.0


def test_default_excitation_level(fig4):
    traj = run(fig4, (0.07, 0.053, 0.05), 100.0, 1e-2)
    # default level 2 * max(x0, threshold) = 0.14
    assert detect_excitation(traj, threshold=fig4.alpha1).excited
    assert not detect_excitation(traj, excitation_level=0.6).excited


def test_spike_duration_triangle():
    t = np.linspace(0, 10, 1001)
    x = np.maximum(0, 1 - np.abs(t - 5) / 5)
    assert spike_duration(t, x, 0.5) == pytest.approx(5.0, abs=1e-9)
    assert spike_duration(t, x, 2.0) == 0.0


class TestRealScale:
    def test_units(self):
        grid = TimeGrid(0, 60, 1.0)
        t = grid.times()
        traj = Trajectory(grid, np.column_stack([np.ones_like(t), np.ones_like(t)]), ("x", "y"), t=t)
        real = scale_to_real(traj)
        assert real.t[-1] == 900.0
        assert np.all(real.samples[:, 0] == 10_000) and np.all(real.samples[:, 1] == 1_000_000)

    def test_doubling_time(self):
        grid = TimeGrid(20, 30, 0.5)
        t = grid.times()
        y = 2 ** ((t - 20) / 10)
        real = scale_to_real(Trajectory(grid, y[:, None], ("y",), t=t), RealScale())
        rt = real.t[np.searchsorted(real.samples[:, 0], 2 * real.samples[0, 0])]
        assert rt - real.t[0] == pytest.approx(150.0)

    def test_invalid(self):
        with pytest.raises(ValueError):
            RealScale(years_per_unit=0)


def test_equilibrium_stickiness(fig4):
    traj = run(fig4, (1e-300, 0.053, 1e-300), 200.0, 1e-2)
    assert np.max(np.abs(traj.samples - [0, 0.053, 0])) < 1e-9


def test_bounded_by_smallest_prism(fig4):
    seq = build_prism_sequence(fig4, 0.75, 2, (0.07, 0.053, 0.05), check_resolution=10)
    box = seq.prisms[0]
    for x0 in (0.04, 0.07, 0.1, 0.4):
        traj = run(fig4, (x0, 0.053, 0.05), 200.0, 1e-2)
        assert np.all(traj.samples < [box.a, box.b, box.c])


def test_trajectory_label_access(fig4):
    traj = run(fig4, (0.07, 0.053, 0.05), 1.0, 0.1)
    assert np.array_equal(traj["y"], traj.samples[:, 1])
    assert len(traj.samples) == len(traj.grid)
    assert traj == run(fig4, (0.07, 0.053, 0.05), 1.0, 0.1)
    assert math.isclose(traj.t[-1], 1.0)
