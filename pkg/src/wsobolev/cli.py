"""Command-line front end.

Subcommands: equilibrium, grid, norm, associate, construct, verify, report.
Exit codes: 0 success, 1 suite failure or runtime evaluation error, 2 bad
configuration or usage.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ALL_SUITES, RunConfig
from .constructions import CorpusSpec, hat_corpus, oscillator
from .equilibrium import EquilibriumSolution, build_eta_grid
from .errors import ConfigError, WSobolevError
from .functions import indicator
from .functionals import (block_norm, remark_unit_norm, sobolev_norm, strong_norm,
                          weak_norm)
from .reporting import render_report, write_csv
from .suites import run_suite

NORM_CSV_FIELDS = ["label", "norm_kind", "value", "est_error",
                   "component_G_frak", "component_G_cal", "t_min", "t_max"]


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wsobolev",
        description="Equilibrium windows and associate norms of two-weight "
                    "Sobolev spaces on (0, inf)")
    ap.add_argument("--config", type=Path, default=None,
                    help="run configuration file (defaults apply when omitted)")
    ap.add_argument("--output", type=Path, default=None,
                    help="override the configured output directory")
    sub = ap.add_subparsers(dest="command", required=True)

    eq = sub.add_parser("equilibrium", help="solve windows on a t grid")
    eq.add_argument("--t", type=str, default=None,
                    help="comma-separated t values")
    eq.add_argument("--t-grid", type=str, default=None, metavar="LO:HI:N",
                    help="log-spaced t grid")
    eq.add_argument("--jobs", type=int, default=1,
                    help="parallel window solves (results stay ordered)")

    gr = sub.add_parser("grid", help="emit the covering sequence eta_k")
    gr.add_argument("-N", type=int, default=None, help="override grid half width")

    sub.add_parser("norm", help="Sobolev norms of the corpus")

    assoc = sub.add_parser("associate", help="associate norms of the corpus")
    assoc.add_argument("--kinds", type=str, default="strong,weak,block",
                       help="comma list from strong,weak,block,remark "
                            "(remark requires unit weights)")

    sub.add_parser("construct", help="build the sign-flipping oscillator")

    ver = sub.add_parser("verify", help="run verification suites")
    ver.add_argument("--suite", type=str, default=None,
                     help="suite name or 'all' (default: config selection)")

    sub.add_parser("report", help="aggregate CSVs into a summary and figures")
    return ap


def _norm_row(label: str, kind: str, report) -> dict:
    comps = list(report.components.values())
    return {
        "label": label, "norm_kind": kind,
        "value": report.value, "est_error": report.est_error,
        "component_G_frak": comps[0] if comps else "",
        "component_G_cal": comps[1] if len(comps) > 1 else "",
        "t_min": report.truncation_used[0], "t_max": report.truncation_used[1],
    }


def _cmd_equilibrium(args, cfg: RunConfig, outdir: Path) -> int:
    sol = EquilibriumSolution(cfg.pair(), quad=cfg.quadrature(),
                              require_s6=False)
    if args.t is not None:
        ts = [float(s) for s in args.t.split(",") if s.strip()]
    elif args.t_grid is not None:
        lo, hi, n = args.t_grid.split(":")
        ts = list(np.geomspace(float(lo), float(hi), int(n)))
    else:
        ts = list(np.geomspace(0.25, 4.0, 17))

    def solve_one(t):
        a, b = sol.window(t, exact=True)
        ai = sol.a_inv(t, exact=True)
        r2, r3 = sol.residuals(t)
        return {"t": t, "a": a, "b": b, "a_inv": ai,
                "residual_eq2": r2, "residual_eq3": r3}

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(solve_one, ts))
    else:
        rows = [solve_one(t) for t in ts]
    path = write_csv(outdir / "equilibrium.csv",
                     ["t", "a", "b", "a_inv", "residual_eq2", "residual_eq3"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _cmd_grid(args, cfg: RunConfig, outdir: Path) -> int:
    sol = EquilibriumSolution(cfg.pair(), quad=cfg.quadrature(), require_s6=False)
    n = args.N if args.N is not None else cfg.half_width
    grid = build_eta_grid(sol, n, allow_truncation=True)
    rows = [{"k": k, "eta": v} for k, v in zip(grid.indices, grid.values)]
    path = write_csv(outdir / "grid.csv", ["k", "eta"], rows)
    print(f"wrote {path} (k in [{grid.kmin}, {grid.kmax}])")
    return 0


def _cmd_norm(args, cfg: RunConfig, outdir: Path) -> int:
    pair = cfg.pair()
    quad = cfg.quadrature()
    rows = []
    for f in hat_corpus(CorpusSpec(seed=cfg.seed, n_hats=cfg.hats, n_bumps=cfg.bumps)):
        rows.append(_norm_row(f.label, "sobolev", sobolev_norm(f, pair, quad)))
    path = write_csv(outdir / "norms.csv", NORM_CSV_FIELDS, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _cmd_associate(args, cfg: RunConfig, outdir: Path) -> int:
    pair = cfg.pair()
    quad = cfg.quadrature()
    sol = EquilibriumSolution(pair, quad=quad, require_s6=False)
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    grid = build_eta_grid(sol, cfg.half_width, allow_truncation=True) \
        if "block" in kinds else None
    rows = []
    for g in hat_corpus(CorpusSpec(seed=cfg.seed, n_hats=cfg.hats, n_bumps=cfg.bumps)):
        for kind in kinds:
            if kind == "strong":
                rows.append(_norm_row(g.label, "strong", strong_norm(g, sol, quad)))
            elif kind == "weak":
                rows.append(_norm_row(g.label, "weak", weak_norm(g, sol, quad)))
            elif kind == "block":
                rows.append(_norm_row(g.label, "block", block_norm(g, grid, quad)))
            elif kind == "remark":
                rows.append(_norm_row(g.label, "remark",
                                      remark_unit_norm(g, cfg.p, quad, pair=pair)))
            else:
                raise ConfigError(f"unknown associate norm kind {kind!r}")
    path = write_csv(outdir / "associate.csv", NORM_CSV_FIELDS, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _cmd_construct(args, cfg: RunConfig, outdir: Path) -> int:
    pair = cfg.pair()
    quad = cfg.quadrature()
    sol = EquilibriumSolution(pair, quad=quad, require_s6=False)
    c, d = cfg.construct_c, cfg.construct_d
    level = indicator(c, d, 1.0, label="one")
    g, plan = oscillator(level, c, d, cfg.construct_epsilon, sol,
                         cfg.construct_mode, quad)
    plan_rows = [{"i": i, "alpha": plan.alphas[i],
                  "beta": plan.betas[i] if i < len(plan.betas) else ""}
                 for i in range(len(plan.alphas))]
    p1 = write_csv(outdir / "construct_plan.csv", ["i", "alpha", "beta"], plan_rows)
    wn = weak_norm(g, sol, quad)
    norm_rows = [{"label": g.label, "n": plan.n, "epsilon": plan.epsilon,
                  "mode": plan.density_mode, "weak_norm": wn.value,
                  "norm_over_eps": wn.value / plan.epsilon,
                  "mass_residual": plan.max_mass_residual}]
    p2 = write_csv(outdir / "construct_norms.csv",
                   ["label", "n", "epsilon", "mode", "weak_norm", "norm_over_eps",
                    "mass_residual"], norm_rows)
    print(f"wrote {p1} and {p2} (n = {plan.n})")
    return 0


def _cmd_verify(args, cfg: RunConfig, outdir: Path) -> int:
    if args.suite is None:
        names = cfg.suite_names()
    elif args.suite == "all":
        names = ALL_SUITES
    else:
        names = tuple(s.strip() for s in args.suite.split(",") if s.strip())
    for name in names:
        if name not in ALL_SUITES:
            raise ConfigError(f"unknown suite {name!r}; known: {', '.join(ALL_SUITES)}")
    pair = cfg.pair()
    sol = EquilibriumSolution(pair, quad=cfg.quadrature(), require_s6=False)
    summary = []
    const_rows = []
    all_ok = True
    for name in names:
        result = run_suite(name, cfg, sol)
        all_ok &= result.passed
        stem = f"verify_{name.replace('-', '_')}"
        if result.rows:
            write_csv(outdir / f"{stem}.csv", list(result.rows[0].keys()), result.rows)
        for cname, cval in result.constants.items():
            const_rows.append({"suite": name, "name": cname, "value": cval})
        summary.append({"suite": name, "passed": result.passed,
                        "rows": len(result.rows), "notes": result.notes})
        print(f"[{'PASS' if result.passed else 'FAIL'}] {name}: "
              + ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in result.constants.items()))
    write_csv(outdir / "verify_summary.csv", ["suite", "passed", "rows", "notes"], summary)
    if const_rows:
        write_csv(outdir / "constants.csv", ["suite", "name", "value"], const_rows)
    return 0 if all_ok else 1


def _cmd_report(args, cfg: RunConfig, outdir: Path) -> int:
    produced = render_report(outdir)
    for fig in produced["figures"]:
        print(f"rendered {fig}")
    if produced["summary"]:
        print(f"wrote {produced['summary']}")
    if not produced["figures"] and not produced["summary"]:
        print(f"no CSV inputs found in {outdir}")
    return 0


_COMMANDS = {
    "equilibrium": _cmd_equilibrium,
    "grid": _cmd_grid,
    "norm": _cmd_norm,
    "associate": _cmd_associate,
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "report": _cmd_report,
}


def execute(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        outdir = Path(args.output) if args.output else Path(cfg.directory)
        outdir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](args, cfg, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (WSobolevError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(execute())


if __name__ == "__main__":
    main()
