"""Command-line front end: ``ethnokinetics <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import appendix, equilibria, interaction, output, sde
from .config import Scenario, load_scenario, scenario_to_text, state_labels
from .errors import EthnoError, ParamSignViolation, ParseError, UnknownPreset, ValidationError
from .integrate import RealScale, integrate_ode, scale_to_real
from .models import InteractionSpec, ThreeVarParams, TwoVarParams, model_rhs
from .presets import PRESETS

log = logging.getLogger("ethnokinetics")

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


class CliError(Exception):
    """Bad command-line usage; maps to the validation exit code."""


def _scenario(args) -> Scenario:
    if args.scenario and args.preset:
        raise CliError("give either --scenario or --preset, not both")
    source = args.scenario or args.preset
    if source is None:
        raise CliError("a scenario is required (--scenario FILE or --preset NAME)")
    s = load_scenario(source)
    if args.dt is not None:
        s = s.with_dt(args.dt)
    if args.tf is not None:
        s = s.with_horizon(args.tf)
    if args.seed is not None:
        s = s.with_seed(args.seed)
    return s


def _out(args, name):
    return os.path.join(args.out, name)


def _trajectory_rows(traj):
    return ["t", *traj.labels], [traj.t, *traj.samples.T]


def _write_trajectory(args, s, traj, stem="trajectory"):
    header, cols = _trajectory_rows(traj)
    written = [output.write_columns(_out(args, f"{stem}.csv"), header, cols)]
    if args.scale or "scaled" in s.outputs:
        real = scale_to_real(traj, s.scale or RealScale())
        header, cols = _trajectory_rows(real)
        header[0] = "t_years"
        written.append(output.write_columns(_out(args, f"{stem}_scaled.csv"), header, cols))
    if args.plot or "plot" in s.outputs:
        series = {lbl: traj.samples[:, i] for i, lbl in enumerate(traj.labels)}
        written.append(output.write_time_series_svg(_out(args, f"{stem}.svg"), traj.t, series, s.name))
    return written


def _deterministic(s: Scenario):
    if s.model == "interaction":
        return interaction.integrate_interacting(s.params, s.noise, s.interaction, s.initial, s.grid).as_trajectory()
    if s.model == "sde":
        return sde.integrate_sde_log(s.params, s.noise, s.initial, s.grid)
    return integrate_ode(model_rhs(s.params), s.initial, s.grid)


def cmd_simulate(args):
    s = _scenario(args)
    if args.deterministic and s.model == "sde":
        traj = integrate_ode(model_rhs(s.params), s.initial, s.grid)
    else:
        traj = _deterministic(s)
    return _write_trajectory(args, s, traj)


def cmd_sde(args):
    s = _scenario(args)
    if not isinstance(s.params, ThreeVarParams) or s.noise is None:
        raise CliError("the sde subcommand needs a three-variable scenario with a noise section")
    n = s.noise if args.sigma is None else type(s.noise).uniform(args.sigma, s.noise.seed)
    integrator = sde.integrate_sde_direct if args.direct else sde.integrate_sde_log
    traj = integrator(s.params, n, s.initial, s.grid)
    return _write_trajectory(args, s, traj)


def cmd_equilibria(args):
    s = _scenario(args)
    if isinstance(s.params, ThreeVarParams):
        reports = equilibria.equilibria_three_var(s.params, newton=not args.closed_form)
    elif isinstance(s.params, TwoVarParams):
        reports = equilibria.equilibria_two_var(s.params)
    else:
        raise CliError(f"equilibria are not available for model {s.model}")
    labels = state_labels("three_var" if isinstance(s.params, ThreeVarParams) else "two_var")
    rows = [[*r.point, r.family, r.stability, r.re_lambda_max] for r in reports]
    path = output.write_csv(_out(args, "equilibria.csv"), [*labels, "family", "stability", "re_lambda_max"], rows)
    for r in reports:
        print(f"{tuple(round(float(v), 6) for v in r.point)}  {r.family:12s} {r.stability}")
    return [path]


def cmd_nullclines(args):
    s = _scenario(args)
    plane = tuple(args.plane)
    labels = state_labels(s.model)
    window = ((args.window[0], args.window[1]), (args.window[2], args.window[3]))
    rows = []
    all_lines = []
    for which in plane:
        lines = equilibria.trace_nullclines(s.params, which, window=window, plane=plane)
        all_lines += lines
        for b, ln in enumerate(lines):
            rows += [[labels[which], b, u, v] for u, v in ln]
    written = [output.write_csv(_out(args, "nullclines.csv"), ["variable", "branch", "u", "v"], rows)]
    if args.plot:
        traj = _deterministic(s) if s.model != "interaction" else None
        trajs = [traj.samples[:, list(plane)]] if traj is not None else []
        written.append(
            output.write_phase_svg(
                _out(args, "nullclines.svg"),
                all_lines,
                trajs,
                window=window,
                labels=(labels[plane[0]], labels[plane[1]]),
            )
        )
    return written


def cmd_ensemble(args):
    s = _scenario(args)
    if s.model != "sde":
        raise CliError("the ensemble subcommand needs an sde scenario")
    summary = sde.ensemble_stats(
        s.params, s.noise, s.initial, s.grid, args.runs, bust_level=args.bust_level, workers=args.workers
    )
    header, cols = ["t"], [summary.t]
    for i, lbl in enumerate(summary.labels):
        for stat in ("mean", "p10", "p50", "p90"):
            header.append(f"{stat}_{lbl}")
            cols.append(getattr(summary, stat)[:, i])
    written = [output.write_columns(_out(args, "ensemble.csv"), header, cols)]
    ok = [i for i in range(summary.runs) if i not in summary.failures]
    rows = [
        [i, summary.seeds[i], pk, pt, b]
        for i, pk, pt, b in zip(ok, summary.peaks, summary.peak_times, summary.bust_counts)
    ]
    written.append(output.write_csv(_out(args, "runs.csv"), ["run", "seed", "peak", "peak_time", "busts"], rows))
    print(f"runs={summary.runs} failed={len(summary.failures)} median_peak={np.median(summary.peaks):.4f} "
          f"multi_bust_fraction={summary.multi_bust_fraction:.3f}")
    if args.plot:
        series = {f"{lbl} (p50)": summary.p50[:, i] for i, lbl in enumerate(summary.labels)}
        written.append(output.write_time_series_svg(_out(args, "ensemble.svg"), summary.t, series, s.name))
    return written


def cmd_interact(args):
    s = _scenario(args)
    if s.model != "interaction":
        raise CliError("the interact subcommand needs an interaction scenario")
    n = s.noise if args.sigma is None else type(s.noise).uniform(args.sigma, s.noise.seed)
    spec = s.interaction
    path = sde.brownian_path(s.grid, 6, n.seed)
    dual = interaction.integrate_interacting(s.params, n, spec, s.initial, s.grid, path)
    ref = interaction.integrate_interacting(
        s.params, n, InteractionSpec(0.0, 0.0, spec.T1, spec.T2), s.initial, s.grid, path
    )
    refs = (float(ref.ethnos1[:, 0].max()), float(ref.ethnos2[:, 0].max()))
    rep = interaction.dominance_report(dual, reference_peaks=refs)
    written = _write_trajectory(args, s, dual.as_trajectory())
    written.append(
        output.write_csv(
            _out(args, "dominance.csv"),
            ["peak1", "peak2", "reference_peak1", "reference_peak2", "suppressed", "margin"],
            [[rep.peak1, rep.peak2, refs[0], refs[1], rep.suppressed, rep.margin]],
        )
    )
    print(f"peak1={rep.peak1:.4f} (uncoupled {refs[0]:.4f})  peak2={rep.peak2:.4f} (uncoupled {refs[1]:.4f})  "
          f"suppressed={rep.suppressed}")
    return written


def cmd_prism(args):
    s = _scenario(args)
    if not isinstance(s.params, ThreeVarParams):
        raise CliError("prism construction needs a three-variable scenario")
    seq = appendix.build_prism_sequence(s.params, args.k, args.n, s.initial)
    written = [
        output.write_csv(_out(args, "prisms.csv"), ["i", "a", "b", "c"], [[i, p.a, p.b, p.c] for i, p in enumerate(seq.prisms)]),
        output.write_csv(
            _out(args, "prism_checks.csv"),
            ["i", "check", "passed", "worst"],
            [[c.index, c.direction, str(c.passed).lower(), c.worst] for c in seq.checks],
        ),
    ]
    print(f"k={seq.k} ratio={seq.prisms[-1].a / seq.prisms[-2].a if len(seq.prisms) > 1 else math.exp(seq.k):.6f} "
          f"valid={seq.valid}")
    if not seq.valid:
        raise EthnoError("some slab or facet checks failed; see prism_checks.csv")
    return written


def cmd_bounds(args):
    rows = []
    for tau in args.tau:
        emp, bound = appendix.brownian_range_probabilities(
            args.levels, tau, args.samples, args.seed or 0, args.mc_dt, workers=args.workers
        )
        for a, e, b in zip(args.levels, emp, bound):
            slack = 3 * math.sqrt(max(e * (1 - e), 1e-12) / args.samples)
            rows.append([tau, a, e, b, str(bool(e <= b + slack)).lower()])
    written = [output.write_csv(_out(args, "bounds.csv"), ["tau", "a", "empirical", "bound", "holds"], rows)]
    k = appendix.min_k_for_tau(args.k_tau, args.sigma_max)
    print(f"min k for tau={args.k_tau}, sigma={args.sigma_max}: {k:.6f}")
    return written


def cmd_presets(args):
    if args.preset:
        s = load_scenario(args.preset)
        text = scenario_to_text(s)
        if args.out_given:
            path = _out(args, f"{args.preset}.cfg")
            os.makedirs(args.out, exist_ok=True)
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            return [path]
        sys.stdout.write(text)
        return []
    for name, s in PRESETS.items():
        print(f"{name:6s} {s.model}")
    return []


def _floats(n):
    def parse(text):
        vals = [float(v) for v in text.split(",")]
        if n and len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers")
        return vals

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", metavar="FILE", help="config file")
    common.add_argument("--preset", metavar="NAME", help=f"bundled scenario ({', '.join(PRESETS)})")
    common.add_argument("--out", default=None, metavar="DIR", help="output directory (default: .)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--dt", type=float, default=None, help="override the grid step")
    common.add_argument("--tf", type=float, default=None, help="override the horizon")
    common.add_argument("--plot", action="store_true", help="also write SVG plots")
    common.add_argument("--workers", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--scale", action="store_true", help="also write years / head-count CSV")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ethnokinetics", description="Excitable-dynamics models of ethnogenesis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="integrate a scenario")
    p.add_argument("--deterministic", action="store_true", help="drop the noise of an sde scenario")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("equilibria", parents=[common], help="steady states and their stability")
    p.add_argument("--closed-form", action="store_true", help="skip the Newton search")
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("nullclines", parents=[common], help="trace nullclines in a coordinate plane")
    p.add_argument("--plane", type=_floats(2), default=[0, 1], help="two coordinate indices, e.g. 0,2")
    p.add_argument("--window", type=_floats(4), default=[0.0, 1.2, 0.0, 1.0], help="umin,umax,vmin,vmax")
    p.set_defaults(func=cmd_nullclines)

    p = sub.add_parser("sde", parents=[common], help="one stochastic realisation")
    p.add_argument("--sigma", type=float, default=None, help="override all three volatilities")
    p.add_argument("--direct", action="store_true", help="integrate in population coordinates")
    p.set_defaults(func=cmd_sde)

    p = sub.add_parser("ensemble", parents=[common], help="ensemble statistics of an sde scenario")
    p.add_argument("--runs", type=int, default=200)
    p.add_argument("--bust-level", type=float, default=0.3)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("interact", parents=[common], help="two interacting ethnoses")
    p.add_argument("--sigma", type=float, default=None, help="override all volatilities")
    p.set_defaults(func=cmd_interact)

    p = sub.add_parser("prism", parents=[common], help="build and check a prism sequence")
    p.add_argument("--k", type=float, default=0.75)
    p.add_argument("--n", type=int, default=3)
    p.set_defaults(func=cmd_prism)

    p = sub.add_parser("bounds", parents=[common], help="Brownian range bound and k threshold")
    p.add_argument("--tau", type=_floats(0), default=[0.5, 1.0, 2.0])
    p.add_argument("--levels", type=_floats(0), default=[1.0, 1.5, 2.0, 3.0])
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--mc-dt", type=float, default=1e-4)
    p.add_argument("--k-tau", type=float, default=1.0)
    p.add_argument("--sigma-max", type=float, default=1.0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("presets", parents=[common], help="list presets, or print one as a config file")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    args.out_given = args.out is not None
    args.out = args.out or "."
    if hasattr(args, "plane"):
        args.plane = [int(v) for v in args.plane]
    try:
        written = args.func(args)
    except (CliError, ParseError, ValidationError, UnknownPreset, ParamSignViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except EthnoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
