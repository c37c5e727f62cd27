"""Command-line front end.

    twomode <command> --config PATH [--out PATH] [--jobs N] [--seed N]

Commands: spectrum | steady | stability | evolve | sweep | locate |
thresholds.  All outputs are plain CSV/JSON whose leading '# ' comment
lines echo the effective configuration and seed; rerunning with that
header as the config reproduces the file byte-for-byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
partial output is kept and marked with a trailing '# error =' line).
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, header_lines, parse_config
from .dynamics import (
    Overflow,
    Trajectory,
    canonical_start,
    classify_trajectory,
    integrate,
    random_start,
)
from .model import TwoModeState, spectrum_arrays
from .phase_diagram import (
    BracketInvalid,
    CriticalPoints,
    NotBlueDetuned,
    critical_points_json,
    grid_csv_lines,
    locate_ep,
    locate_et,
    r_line,
    sweep,
    thresholds,
    transition_line,
)
from .stability import GaugeModeMissing, classify
from .steady import solve_steady_states

DEFAULT_OUT = {
    "spectrum": "spectrum.csv",
    "steady": "steady.csv",
    "stability": "stability.csv",
    "evolve": "trajectory.csv",
    "sweep": "sweep.csv",
    "locate": "critical_points.json",
    "thresholds": "thresholds.csv",
}


class NumericalFailure(RuntimeError):
    """Computation failed after producing the lines collected so far."""

    def __init__(self, message: str, lines: list[str]):
        super().__init__(message)
        self.lines = lines


def _write(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _fmt(x: float) -> str:
    return repr(float(x))


def _cmd_spectrum(config: RunConfig) -> list[str]:
    spec = config.spectrum
    xs = np.linspace(spec.x_min, spec.x_max, spec.n)
    e_u, e_l = spectrum_arrays(config.model, xs)
    lines = ["x,re_e_upper,im_e_upper,re_e_lower,im_e_lower"]
    for x, u, l in zip(xs, e_u, e_l):
        lines.append(f"{_fmt(x)},{_fmt(u.real)},{_fmt(u.imag)},{_fmt(l.real)},{_fmt(l.imag)}")
    return lines


def _cmd_steady(config: RunConfig) -> list[str]:
    states = solve_steady_states(config.model)
    lines = ["x,n_x,n_c,phi_cx,energy,branch,stability,margin"]
    for s in states:
        try:
            rep = classify(config.model, s)
            verdict, margin = rep.verdict, _fmt(rep.margin)
        except GaugeModeMissing:
            verdict, margin = "marginal", ""
        lines.append(
            f"{_fmt(s.x)},{_fmt(s.n_x)},{_fmt(s.n_c)},{_fmt(s.phi_cx)},"
            f"{_fmt(s.energy)},{s.branch},{verdict},{margin}"
        )
    return lines


def _cmd_stability(config: RunConfig) -> list[str]:
    cut = config.stability
    values = np.linspace(cut.min, cut.max, cut.n)
    lines = ["axis_value,solution_index,x,n_c,phi_cx,energy,branch,verdict,margin"]
    for v in values:
        params = dataclasses.replace(config.model, **{cut.axis: float(v)})
        try:
            states = solve_steady_states(params)
        except ValueError:
            continue
        for k, s in enumerate(states):
            try:
                rep = classify(params, s)
                verdict, margin = rep.verdict, _fmt(rep.margin)
            except GaugeModeMissing:
                verdict, margin = "marginal", ""
            lines.append(
                f"{_fmt(v)},{k},{_fmt(s.x)},{_fmt(s.n_c)},{_fmt(s.phi_cx)},"
                f"{_fmt(s.energy)},{s.branch},{verdict},{margin}"
            )
    return lines


def _traj_lines(traj: Trajectory) -> list[str]:
    lines = ["t,re_psiC,im_psiC,re_psiX,im_psiX,nC2,nX2"]
    nc2, nx2 = traj.n_c2, traj.n_x2
    for i, t in enumerate(traj.times):
        c, x = traj.psi_c[i], traj.psi_x[i]
        lines.append(
            f"{_fmt(t)},{_fmt(c.real)},{_fmt(c.imag)},{_fmt(x.real)},{_fmt(x.imag)},"
            f"{_fmt(nc2[i])},{_fmt(nx2[i])}"
        )
    return lines


def _cmd_evolve(config: RunConfig) -> list[str]:
    ev = config.evolve
    if ev.start == "explicit":
        initial = TwoModeState(complex(ev.psi_c_re, ev.psi_c_im), complex(ev.psi_x_re, ev.psi_x_im))
    elif ev.start == "random":
        initial = random_start(config.seed)
    else:
        initial = canonical_start(config.model, ev.start)
    try:
        traj = integrate(config.model, initial, dt=ev.dt, t_end=ev.t_end, stride=ev.stride)
    except Overflow as ov:
        lines = _traj_lines(ov.trajectory)
        lines.append("# verdict = diverged")
        raise NumericalFailure(str(ov), lines) from ov
    lines = _traj_lines(traj)
    if ev.t_end >= 500.0:
        verdict = classify_trajectory(traj, ev.transient_fraction)
        lines.append(f"# verdict = {verdict.kind}")
        if verdict.frequency is not None:
            lines.append(f"# frequency = {_fmt(verdict.frequency)}")
        lines.append(f"# transient_end = {_fmt(verdict.transient_end)}")
    return lines


def _critical_points(config: RunConfig, transition=()) -> CriticalPoints:
    loc = config.locate
    ep = locate_ep(config.model)
    et = None
    if loc.target in ("et", "both"):
        try:
            et_res = locate_et(
                config.model,
                (loc.gamma_lo, loc.gamma_hi),
                p_range=(loc.p_min, loc.p_max),
            )
            et = (et_res.gamma_c, et_res.p)
        except BracketInvalid:
            et = None
    slope, intercept = r_line(config.model)
    return CriticalPoints(
        ep=(ep.gamma_c, ep.p_numeric if ep.p_numeric is not None else ep.p_closed_form),
        et=et,
        r_line_slope=slope,
        r_line_intercept=intercept,
        transition=tuple(transition),
    )


def _cmd_locate(config: RunConfig) -> list[str]:
    points = _critical_points(config)
    return critical_points_json(points).splitlines()


def _cmd_sweep(config: RunConfig, jobs_override: int | None) -> tuple[list[str], list[str]]:
    sw = config.sweep
    jobs = jobs_override if jobs_override is not None else sw.jobs
    grid = sweep(
        config.model,
        gamma_range=(sw.gamma_min, sw.gamma_max),
        p_range=(sw.p_min, sw.p_max),
        resolution=(sw.n_gamma, sw.n_p),
        jobs=jobs,
    )
    line = transition_line(grid, omega_r=config.model.omega_r)
    points = _critical_points(config, transition=line.points)
    return list(grid_csv_lines(grid)), critical_points_json(points).splitlines()


def _cmd_thresholds(config: RunConfig) -> list[str]:
    th = config.thresholds
    events = thresholds(config.model, config.model.gamma_c, p_range=(th.p_min, th.p_max), n_scan=th.n)
    lines = ["p,kind,before_solutions,before_stable,after_solutions,after_stable"]
    for e in events:
        lines.append(f"{_fmt(e.p)},{e.kind},{e.before[0]},{e.before[1]},{e.after[0]},{e.after[1]}")
    return lines


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="twomode",
        description="Spectra, steady states, stability, dynamics and phase "
        "diagrams of a two-mode gain/loss system.",
    )
    parser.add_argument("--version", action="version", version=f"twomode {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in DEFAULT_OUT:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="INI configuration file")
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--jobs", type=int, default=None, help="worker processes (sweep)")
        sp.add_argument("--seed", type=int, default=None, help="override [run] seed")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
        config = parse_config(text)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        if args.jobs is not None and args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if args.command in ("steady", "stability", "sweep", "thresholds", "locate") and config.model.g2 <= 0:
            raise ConfigError("this command requires g2 > 0")
    except (OSError, ConfigError) as exc:
        print(f"twomode: config error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out) if args.out else Path(DEFAULT_OUT[args.command])
    header = header_lines(config, args.command)

    try:
        if args.command == "spectrum":
            body = _cmd_spectrum(config)
        elif args.command == "steady":
            body = _cmd_steady(config)
        elif args.command == "stability":
            body = _cmd_stability(config)
        elif args.command == "evolve":
            body = _cmd_evolve(config)
        elif args.command == "locate":
            body = _cmd_locate(config)
        elif args.command == "thresholds":
            body = _cmd_thresholds(config)
        else:
            grid_body, points_body = _cmd_sweep(config, args.jobs)
            _write(out, header + grid_body)
            points_path = out.with_suffix(".points.json")
            _write(points_path, header + points_body)
            print(f"wrote {out} and {points_path}")
            return 0
    except NumericalFailure as exc:
        _write(out, header + exc.lines + [f"# error = {exc}"])
        print(f"twomode: numerical failure: {exc} (partial output in {out})", file=sys.stderr)
        return 3
    except (NotBlueDetuned, BracketInvalid, ValueError) as exc:
        _write(out, header + [f"# error = {exc}"])
        print(f"twomode: numerical failure: {exc}", file=sys.stderr)
        return 3

    _write(out, header + body)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
