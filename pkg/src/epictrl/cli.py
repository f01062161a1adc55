"""Command-line front end.

Subcommands: simulate, equilibria, stability, campaign, sweep.  Scenarios
come from builtins or key=value files; flags override the law, gains, and
integration settings.  Exit codes: 0 ok, 2 validation error, 3 runtime
invariant violation, 4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import campaign as campaign_mod
from . import control, equilibria, stability
from .integrator import IntegrationError, Trajectory, integrate
from .model import ModelParams, ModelError, State
from .output import (
    effort_svg_text,
    populations_svg_text,
    write_campaign_csvs,
    write_trajectory_csv,
)
from .scenarios import Scenario, ScenarioError, load_scenario

_SWEEP_PARAMS = ("g", "g1", "beta", "omega")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epictrl",
        description=(
            "Simulation and vaccination-control analysis for a "
            "constant-population SEIR epidemic model"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, extra in (
        ("simulate", "integrate the closed loop and emit the trajectory"),
        ("equilibria", "print both fixed points and the reproduction ratio"),
        ("stability", "print the stability report"),
        ("campaign", "size the vaccination campaign over the window"),
        ("sweep", "rerun over a list of parameter values"),
    ):
        cmd = sub.add_parser(name, help=extra)
        cmd.add_argument("scenario", help="builtin name or scenario file")
        cmd.add_argument(
            "--law", choices=("none", "law1", "law2"), default=None
        )
        cmd.add_argument("--g", type=float, default=None)
        cmd.add_argument("--g1", type=float, default=None)
        cmd.add_argument(
            "--g1-mode",
            choices=("printed", "derived"),
            default="printed",
            help=(
                "printed: use --g1 as given; derived: set g1 = mu+omega+g"
            ),
        )
        cmd.add_argument("--k0", type=float, default=None)
        cmd.add_argument("--step", type=float, default=None)
        cmd.add_argument("--horizon", type=float, default=None)
        cmd.add_argument("--window", type=float, default=None)
        cmd.add_argument("--week-length", type=float, default=None)
        cmd.add_argument("--out-dir", default=None)
        cmd.add_argument("--svg", action="store_true")
        cmd.add_argument("--clamp-v", action="store_true")
        if name == "sweep":
            cmd.add_argument(
                "--param", choices=_SWEEP_PARAMS, required=True
            )
            cmd.add_argument(
                "--values",
                required=True,
                help="comma-separated parameter values",
            )
    return parser


def _resolve_law(sc: Scenario, args: argparse.Namespace) -> control.ControlLaw:
    kind = args.law if args.law is not None else sc.law.kind
    clamp = bool(args.clamp_v) or sc.law.clamp_v
    if kind == control.LAW_NONE:
        return control.no_vaccination()
    same_kind = sc.law.kind == kind
    g = args.g if args.g is not None else (sc.law.g if same_kind else None)
    if g is None:
        raise ScenarioError(f"cli: --law {kind} requires --g")
    if kind == control.LAW1:
        k0 = (
            args.k0
            if args.k0 is not None
            else (sc.law.k0 if same_kind else 1.0)
        )
        return control.law1(g=g, k0=k0, clamp_v=clamp)
    if args.g1_mode == "derived":
        g1 = sc.params.mu + sc.params.omega + g
    else:
        g1 = (
            args.g1
            if args.g1 is not None
            else (sc.law.g1 if same_kind else None)
        )
        if g1 is None:
            raise ScenarioError(
                "cli: --law law2 with --g1-mode printed requires --g1"
            )
    return control.law2(sc.params, g=g, g1=g1, clamp_v=clamp)


def _apply_overrides(sc: Scenario, args: argparse.Namespace) -> Scenario:
    integration = sc.integration
    if args.step is not None:
        integration = replace(integration, step=args.step)
    if args.horizon is not None:
        integration = replace(integration, horizon=args.horizon)
    sc = replace(sc, integration=integration, law=_resolve_law(sc, args))
    if args.window is not None:
        sc = replace(sc, window=args.window)
    if args.week_length is not None:
        sc = replace(sc, week_length=args.week_length)
    if args.svg and "svg" not in sc.outputs:
        sc = replace(sc, outputs=sc.outputs + ("svg",))
    return sc


def _out_dir(args: argparse.Namespace) -> Path:
    raw = args.out_dir or os.environ.get("EPICTRL_OUT_DIR") or "."
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _report_law(sc: Scenario) -> list[str]:
    law = sc.law
    lines = [f"law: {law.kind}"]
    if law.kind == control.LAW1:
        bound = control.law1_min_gain(sc.params, sc.initial.s, law.k0)
        ok = "meets" if law.g > bound else "is below"
        lines.append(
            f"  g = {law.g:g} per day ({ok} the sufficient convergence "
            f"bound {bound:.6g})"
        )
    elif law.kind == control.LAW2:
        derived = sc.params.mu + sc.params.omega + law.g
        lines.append(f"  g = {law.g:g} per day, g1 = {law.g1:.10g} per day")
        lines.append(
            f"  matched g1 (mu+omega+g) = {derived:.10g}; "
            f"difference from applied g1 = {law.g1 - derived:.3g}"
        )
        certs = control.law2_nonneg_certificates(sc.params, law.g, law.g1)
        lines.append(f"  nonnegativity certified: {certs.certified}")
    return lines


def _summarize(sc: Scenario, traj: Trajectory) -> str:
    n = sc.params.n_total
    k = int(np.argmax(traj.i))
    final = traj.final
    lines = [
        f"scenario: {sc.name}",
        *_report_law(sc),
        f"horizon: {sc.integration.horizon:g} days at step "
        f"{sc.integration.step:g}",
        f"peak I: {traj.i[k]:.6g} people ({100 * traj.i[k] / n:.4f}% of N) "
        f"at day {traj.t[k]:.2f}",
        f"final state (day {final.t:g}): S = {final.s:.6g}, "
        f"E = {final.e:.6g}, I = {final.i:.6g}, R = {final.r:.6g} "
        f"({100 * final.r / n:.4f}% of N removed)",
        f"V range over samples: [{traj.v_min:.6g}, {traj.v_max:.6g}]",
    ]
    if traj.switch_event is not None:
        lines.append(
            f"susceptible population reached zero at day "
            f"{traj.switch_event.t:.4f}; vaccination switched to the "
            "maintenance branch"
        )
    return "\n".join(lines)


def _cmd_simulate(sc: Scenario, out_dir: Path) -> list[Path]:
    traj = integrate(sc.params, sc.initial, sc.law, sc.integration)
    files = []
    if "csv" in sc.outputs:
        files.append(
            write_trajectory_csv(
                traj,
                out_dir / f"{sc.name}_trajectory.csv",
                conservation_tol=sc.integration.conservation_tol,
                positivity_tol=sc.integration.positivity_tol,
            )
        )
    if "svg" in sc.outputs:
        pop = out_dir / f"{sc.name}_populations.svg"
        pop.write_text(populations_svg_text(traj, sc.name))
        eff = out_dir / f"{sc.name}_effort.svg"
        eff.write_text(effort_svg_text(traj, sc.name))
        files += [pop, eff]
    if "summary" in sc.outputs:
        print(_summarize(sc, traj))
    return files


def _cmd_equilibria(sc: Scenario, out_dir: Path) -> list[Path]:
    p = sc.params
    n = p.n_total
    df = equilibria.disease_free(p)
    ratio = equilibria.reproduction_ratio(p)
    print(f"scenario: {sc.name}")
    print(f"reproduction ratio: {ratio:.6g}")
    print(
        f"disease-free point: S = {df.s_star:g}, E = 0, I = 0, R = 0 "
        f"(residual {equilibria.residual(p, df):.3g})"
    )
    endemic_pt = equilibria.endemic(p)
    if endemic_pt is None:
        print("endemic point: none (reproduction ratio below 1)")
    else:
        pct = tuple(
            100.0 * v / n
            for v in (
                endemic_pt.s_star,
                endemic_pt.e_star,
                endemic_pt.i_star,
                endemic_pt.r_star,
            )
        )
        print(
            f"endemic point: S = {endemic_pt.s_star:.6g} ({pct[0]:.4f}%), "
            f"E = {endemic_pt.e_star:.6g} ({pct[1]:.4f}%), "
            f"I = {endemic_pt.i_star:.6g} ({pct[2]:.4f}%), "
            f"R = {endemic_pt.r_star:.6g} ({pct[3]:.4f}%)"
        )
        if endemic_pt.degenerate:
            print("  (degenerate: coincides with the disease-free point)")
        print(f"  residual: {equilibria.residual(p, endemic_pt):.3g}")
    return []


def _cmd_stability(sc: Scenario, out_dir: Path) -> list[Path]:
    report = stability.assess(sc.params)
    print(f"scenario: {sc.name}")
    print(
        f"disease-free point: "
        f"{'stable' if report.df_stable else 'unstable'} "
        f"(beta threshold {report.df_threshold:.6g})"
    )
    eig = ", ".join(f"{x.real:.6g}" for x in report.df_eigenvalues)
    print(f"  eigenvalues: {eig}")
    if not report.endemic_exists:
        print("endemic point: none")
        return []
    print(
        f"endemic point: sup-ratio {report.hinf_ratio:.6g} vs 1/beta = "
        f"{1.0 / sc.params.beta:.6g} -> frequency-domain condition "
        f"{'met' if report.hinf_condition_met else 'not met'}"
    )
    print(
        f"  characteristic polynomial stable (Routh-Hurwitz): "
        f"{report.routh_hurwitz_p2}"
    )
    roots = stability.endemic_eigenvalues(sc.params)
    formatted = ", ".join(
        f"{z.real:.6g}{z.imag:+.6g}j" if z.imag else f"{z.real:.6g}"
        for z in roots
    )
    print(f"  eigenvalues: {formatted}")
    print(f"  verdicts consistent: {report.verdict_consistent}")
    return []


def _cmd_campaign(sc: Scenario, out_dir: Path) -> list[Path]:
    traj = integrate(sc.params, sc.initial, sc.law, sc.integration)
    endemic_pt = equilibria.endemic(sc.params)
    baseline = endemic_pt.r_star if endemic_pt is not None else 0.0
    plan = campaign_mod.build_plan(
        traj, baseline, window=sc.window, week_length=sc.week_length
    )
    daily, weekly = write_campaign_csvs(
        plan,
        out_dir / f"{sc.name}_campaign_daily.csv",
        out_dir / f"{sc.name}_campaign_weekly.csv",
    )
    print(f"scenario: {sc.name}")
    print("\n".join(_report_law(sc)))
    print(
        f"baseline removed population (no vaccination): {baseline:.6g} "
        "people"
    )
    print(
        f"target population: {plan.target_n:.6g} people over "
        f"{plan.window:g} days"
    )
    print(f"effort integral: {plan.effort_integral:.6g} people")
    print(f"doses per target individual f: {plan.f:.6g}")
    return [daily, weekly]


def _parse_values(raw: str) -> list[float]:
    vals = [x.strip() for x in raw.split(",")]
    vals = [x for x in vals if x]
    if not vals:
        raise ScenarioError("cli: sweep --values must list at least one value")
    out = []
    for x in vals:
        try:
            out.append(float(x))
        except ValueError:
            raise ScenarioError(
                f"cli: sweep --values: {x!r} is not a number"
            ) from None
    return out


def _sweep_variant(sc: Scenario, param: str, value: float) -> Scenario:
    if param in ("beta", "omega"):
        params = replace(sc.params, **{param: value})
        law = sc.law
        if law.kind == control.LAW2:
            law = control.law2(params, g=law.g, g1=law.g1, clamp_v=law.clamp_v)
        return replace(sc, params=params, law=law)
    if sc.law.kind == control.LAW_NONE:
        raise ScenarioError(
            f"cli: sweep over {param!r} requires --law law1 or law2"
        )
    if param == "g1" and sc.law.kind != control.LAW2:
        raise ScenarioError("cli: sweep over 'g1' requires --law law2")
    law = sc.law
    if law.kind == control.LAW1:
        law = control.law1(
            g=value if param == "g" else law.g, k0=law.k0, clamp_v=law.clamp_v
        )
    else:
        law = control.law2(
            sc.params,
            g=value if param == "g" else law.g,
            g1=value if param == "g1" else law.g1,
            clamp_v=law.clamp_v,
        )
    return replace(sc, law=law)


def _cmd_sweep(sc: Scenario, out_dir: Path, args: argparse.Namespace) -> list[Path]:
    values = _parse_values(args.values)
    runs: list[tuple[float, Trajectory]] = []
    for value in values:
        variant = _sweep_variant(sc, args.param, value)
        traj = integrate(
            variant.params, variant.initial, variant.law, variant.integration
        )
        runs.append((value, traj))
    base_t = runs[0][1].t
    header = "t_days," + ",".join(f"I_{v:g}" for v, _ in runs)
    lines = [header]
    for k in range(len(base_t)):
        cells = [repr(float(base_t[k]))]
        cells += [repr(float(traj.i[k])) for _, traj in runs]
        lines.append(",".join(cells))
    combined = out_dir / f"{sc.name}_sweep_{args.param}.csv"
    combined.write_text("\n".join(lines) + "\n")
    summary_lines = ["value,peak_i,peak_day,r_window_end"]
    print(f"scenario: {sc.name}, sweep over {args.param}")
    print(f"{'value':>12} {'peak I':>14} {'peak day':>9} {'R(window)':>14}")
    for value, traj in runs:
        k = int(np.argmax(traj.i))
        r_end = float(np.interp(sc.window, traj.t, traj.r))
        summary_lines.append(
            f"{value!r},{float(traj.i[k])!r},{float(traj.t[k])!r},{r_end!r}"
        )
        print(
            f"{value:>12g} {traj.i[k]:>14.6g} {traj.t[k]:>9.2f} "
            f"{r_end:>14.6g}"
        )
    summary = out_dir / f"{sc.name}_sweep_{args.param}_summary.csv"
    summary.write_text("\n".join(summary_lines) + "\n")
    return [combined, summary]


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            sc = _apply_overrides(load_scenario(args.scenario), args)
            out_dir = _out_dir(args)
            if args.command == "simulate":
                files = _cmd_simulate(sc, out_dir)
            elif args.command == "equilibria":
                files = _cmd_equilibria(sc, out_dir)
            elif args.command == "stability":
                files = _cmd_stability(sc, out_dir)
            elif args.command == "campaign":
                files = _cmd_campaign(sc, out_dir)
            else:
                files = _cmd_sweep(sc, out_dir, args)
        for item in caught:
            print(f"epictrl: warning: {item.message}", file=sys.stderr)
    except IntegrationError as exc:
        print(f"epictrl: invariant violation: {exc}", file=sys.stderr)
        return 3
    except (ModelError, control.ControlError, campaign_mod.CampaignError,
            ScenarioError, ValueError) as exc:
        print(f"epictrl: validation error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"epictrl: i/o error: {exc}", file=sys.stderr)
        return 4
    for path in files:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
