"""Config-driven batch front end.

Subcommands:

* ``solve --config FILE``     solve one problem, write a knot CSV
* ``cascade --config FILE``   reduce a cascade model, solve, write CSV and
  the composed top-scale force expression
* ``converge --config FILE``  error-vs-n study, write a report CSV
* ``coeffs (--delta R | --theta R | --params a,b,c,d)``  print the spline
  weights and their truncation coefficients

Configs are INI files with sections [problem] or [cascade], [method] and
[output]; see the bundled files under configs/.  Exit status: 0 on success,
1 on configuration or validation errors, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .assembly import EndConditionMode, build
from .cascade import CascadeModel, IvpProblem, reduce
from .forces import ForceExpr, parse
from .linsolve import LinearSolveError, lu_solve
from .oracle import convergence_study, max_abs_error
from .spline_params import SplineParams, from_theta, optimal_family, truncation_coeffs, validate

__all__ = ["main", "RunConfig", "load_config"]


@dataclass
class RunConfig:
    """Parsed and validated configuration for one run."""

    subcommand: str
    problem: Optional[IvpProblem]
    model: Optional[CascadeModel]
    exact: Optional[ForceExpr]
    mode: EndConditionMode
    params: SplineParams
    n: Optional[int]
    n_list: Optional[tuple[int, ...]]
    csv_path: Path


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _require(section: configparser.SectionProxy, key: str) -> str:
    if key not in section:
        raise ValueError(f"missing key {key!r} in section [{section.name}]")
    return section[key]


def _parse_method(section: configparser.SectionProxy) -> tuple[EndConditionMode, SplineParams]:
    mode_text = _require(section, "mode").strip().lower()
    try:
        mode = EndConditionMode(mode_text)
    except ValueError:
        raise ValueError(f"mode must be 'standard' or 'improved', got {mode_text!r}") from None

    explicit = [k for k in ("alpha", "beta", "gamma_", "delta") if k in section]
    groups = int(bool(explicit)) + int("delta_opt" in section) + int("theta" in section)
    if groups != 1:
        raise ValueError(
            "[method] must carry exactly one of: alpha/beta/gamma_/delta, delta_opt, theta")
    if explicit:
        if len(explicit) != 4:
            raise ValueError(f"all four of alpha/beta/gamma_/delta are required, got {explicit}")
        params = SplineParams(
            alpha=Fraction(section["alpha"]),
            beta=Fraction(section["beta"]),
            gamma=Fraction(section["gamma_"]),
            delta=Fraction(section["delta"]),
        )
    elif "delta_opt" in section:
        params = optimal_family(Fraction(section["delta_opt"]))
    else:
        params = from_theta(float(section["theta"]))
    return mode, validate(params)


def _parse_problem(section: configparser.SectionProxy) -> IvpProblem:
    a = float(_require(section, "a"))
    b = float(_require(section, "b"))
    f = parse(_require(section, "f"))
    g = parse(_require(section, "g"))
    u = tuple(float(_require(section, f"u{i}")) for i in range(7))
    return IvpProblem(a=a, b=b, f=f, g=g, u=u)


def _parse_cascade(section: configparser.SectionProxy) -> CascadeModel:
    n_scales = int(_require(section, "N"))
    gamma = float(_require(section, "gamma"))
    a = float(_require(section, "a"))
    b = float(_require(section, "b"))
    forces = tuple(parse(_require(section, f"L{k}")) for k in range(1, n_scales + 1))
    velocities = tuple(float(_require(section, f"v{k}")) for k in range(1, n_scales + 1))
    return CascadeModel(n_scales=n_scales, gamma=gamma, forces=forces,
                        init_velocities=velocities, interval=(a, b))


def load_config(path: Path, subcommand: str) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys like N and L1 are case-sensitive
    if not path.is_file():
        raise ValueError(f"config file not found: {path}")
    cp.read(path)

    problem = None
    model = None
    exact = None
    if subcommand == "cascade":
        if not cp.has_section("cascade"):
            raise ValueError("cascade subcommand needs a [cascade] section")
        model = _parse_cascade(cp["cascade"])
        if "exact" in cp["cascade"]:
            exact = parse(cp["cascade"]["exact"])
    else:
        if not cp.has_section("problem"):
            raise ValueError(f"{subcommand} subcommand needs a [problem] section")
        problem = _parse_problem(cp["problem"])
        if "exact" in cp["problem"]:
            exact = parse(cp["problem"]["exact"])

    if not cp.has_section("method"):
        raise ValueError("missing [method] section")
    mode, params = _parse_method(cp["method"])

    n = None
    n_list = None
    if subcommand == "converge":
        text = _require(cp["method"], "n_list")
        n_list = tuple(int(tok) for tok in text.replace(",", " ").split())
        if not n_list:
            raise ValueError("n_list is empty")
    else:
        n = int(_require(cp["method"], "n"))

    if not cp.has_section("output"):
        raise ValueError("missing [output] section")
    csv_path = Path(_require(cp["output"], "csv_path"))

    return RunConfig(subcommand=subcommand, problem=problem, model=model,
                     exact=exact, mode=mode, params=params, n=n, n_list=n_list,
                     csv_path=csv_path)


def _write_solution_csv(path: Path, grid, exact: Optional[ForceExpr]) -> None:
    lines = ["t,y_numeric,y_exact,abs_error"]
    for t, y in zip(grid.t, grid.y):
        if exact is not None:
            ref = exact.evaluate(float(t))
            lines.append(f"{_fmt(t)},{_fmt(y)},{_fmt(ref)},{_fmt(abs(y - ref))}")
        else:
            lines.append(f"{_fmt(t)},{_fmt(y)},,")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def _run_solve(cfg: RunConfig) -> int:
    grid = lu_solve(build(cfg.problem, cfg.params, cfg.mode, cfg.n))
    _write_solution_csv(cfg.csv_path, grid, cfg.exact)
    print(f"wrote {cfg.csv_path} (n={cfg.n}, mode={cfg.mode.value}, "
          f"residual_inf={grid.residual_inf:.3e})")
    if cfg.exact is not None:
        print(f"max_abs_error = {_fmt(max_abs_error(grid, cfg.exact))}")
    return 0


def _run_cascade(cfg: RunConfig) -> int:
    problem = reduce(cfg.model)
    g_path = cfg.csv_path.with_suffix(".g.txt")
    grid = lu_solve(build(problem, cfg.params, cfg.mode, cfg.n))
    _write_solution_csv(cfg.csv_path, grid, cfg.exact)
    g_path.write_text(str(problem.g) + "\n")
    print(f"composed g(t) = {problem.g}")
    print(f"wrote {cfg.csv_path} and {g_path}")
    return 0


def _run_converge(cfg: RunConfig) -> int:
    report = convergence_study(cfg.problem, cfg.params, cfg.mode, cfg.n_list,
                               reference=cfg.exact)
    lines = ["n,max_abs_error,observed_order"]
    for i, (n, err) in enumerate(report.entries):
        order = report.orders[i - 1] if i > 0 else None
        order_text = _fmt(order) if order is not None else ""
        lines.append(f"{n},{_fmt(err)},{order_text}")
    cfg.csv_path.parent.mkdir(parents=True, exist_ok=True)
    cfg.csv_path.write_text("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return 0


def _run_coeffs(args: argparse.Namespace) -> int:
    chosen = [name for name in ("delta", "theta", "params") if getattr(args, name) is not None]
    if len(chosen) != 1:
        raise ValueError("coeffs needs exactly one of --delta, --theta, --params")
    if args.delta is not None:
        params = optimal_family(Fraction(args.delta))
    elif args.theta is not None:
        params = from_theta(float(args.theta))
    else:
        parts = args.params.split(",")
        if len(parts) != 4:
            raise ValueError(f"--params needs four comma-separated values, got {args.params!r}")
        params = SplineParams(*(Fraction(p.strip()) for p in parts))
    coeffs = truncation_coeffs(params)
    for name in ("alpha", "beta", "gamma", "delta"):
        print(f"{name} = {getattr(params, name)}")
    total = params.total
    print(f"sum = {total}" + ("" if abs(total - 60) <= 1e-9 else "   (violates sum-60 constraint)"))
    for name in ("c7", "c8", "c9", "c10", "c11", "c12"):
        print(f"{name} = {getattr(coeffs, name)}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="heptaspline",
        description="Non-polynomial spline solver for seventh-order IVPs and cascade models")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (("solve", "solve one problem and write a knot CSV"),
                            ("cascade", "reduce a cascade model, then solve"),
                            ("converge", "run an error-vs-n study")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path)
    pc = sub.add_parser("coeffs", help="print spline weights and truncation coefficients")
    pc.add_argument("--delta", help="optimal-family parameter (rational, e.g. 30 or 51/2)")
    pc.add_argument("--theta", help="trigonometric parameterization")
    pc.add_argument("--params", help="four comma-separated weights, e.g. 1/2,19/2,49/2,51/2")

    args = ap.parse_args(argv)
    try:
        if args.subcommand == "coeffs":
            return _run_coeffs(args)
        cfg = load_config(args.config, args.subcommand)
        if args.subcommand == "solve":
            return _run_solve(cfg)
        if args.subcommand == "cascade":
            return _run_cascade(cfg)
        return _run_converge(cfg)
    except LinearSolveError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
