"""Command-line entry point.

Subcommands: ``simulate <config>``, ``reproduce <preset>`` and
``oracle <rho-inf|g-inf>``.  Failures exit nonzero with a machine-readable
JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .experiment import (
    ConfigError,
    PRESET_NAMES,
    load_config,
    preset_config,
    run_experiment,
)
from .grids import OpinionGrid
from .stationary import (
    StationaryDegreeLaw,
    StationaryOpinionProfile,
    g_inf,
    rho_inf_poisson,
    rho_inf_powerlaw,
)


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--solver", default=None,
                   choices=["mc", "fp", "network-only", "moments"])
    p.add_argument("--quadrature", default=None, choices=["midpoint", "milne"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netopinion")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an experiment from a config file")
    sim.add_argument("config")
    _common_flags(sim)

    rep = sub.add_parser("reproduce", help="run a named study preset")
    rep.add_argument("preset", choices=list(PRESET_NAMES))
    rep.add_argument("--rates", default=None,
                     help="rate override like V=1e3 (constant) or U=1e4 (density-dependent)")
    _common_flags(rep)

    orc = sub.add_parser("oracle", help="print a closed-form stationary law as CSV")
    orc_sub = orc.add_subparsers(dest="law", required=True)
    r = orc_sub.add_parser("rho-inf")
    r.add_argument("--gamma", type=float, default=30.0)
    r.add_argument("--alpha", type=float, default=0.1)
    r.add_argument("--c-max", type=int, default=250)
    r.add_argument("--limit", choices=["none", "poisson", "powerlaw"], default="none")
    g = orc_sub.add_parser("g-inf")
    g.add_argument("--variant", choices=["case1", "case2"], default="case1")
    g.add_argument("--kappa", type=float, default=1.0)
    g.add_argument("--mbar", type=float, default=0.0)
    g.add_argument("--sigma2", type=float, default=0.05)
    g.add_argument("--n", type=int, default=80)
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.seed is not None:
        out["seed"] = args.seed
    if args.out_dir is not None:
        out["out_dir"] = args.out_dir
    if args.solver is not None:
        out["solver"] = args.solver
    if args.quadrature is not None:
        out["quadrature"] = args.quadrature
    return out


def _parse_rates(spec: str) -> dict:
    kind, _, value = spec.partition("=")
    v = float(value)
    if kind.upper() == "V":
        return {"rate_mode": "constant", "v_r": v, "v_a": v}
    if kind.upper() == "U":
        return {"rate_mode": "remark1", "u_r": v, "u_a": v}
    raise ConfigError(f"rates override {spec!r}; expected V=<x> or U=<x>")


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    for key, value in _overrides(args).items():
        cfg = type(cfg)(**{**cfg.__dict__, key: value})
    run_experiment(cfg.validate())
    print(f"wrote artifacts to {cfg.out_dir}")
    return 0


def _cmd_reproduce(args) -> int:
    overrides = _overrides(args)
    if args.rates is not None:
        overrides.update(_parse_rates(args.rates))
    if args.preset == "fig1":
        base_out = overrides.pop("out_dir", "runs/fig1")
        for alpha in (1e-1, 1e-2, 1e-3):
            cfg = preset_config("fig1", alpha=alpha,
                                out_dir=f"{base_out}/alpha{alpha:g}", **overrides)
            run_experiment(cfg)
            print(f"alpha={alpha:g}: wrote {cfg.out_dir}")
        return 0
    cfg = preset_config(args.preset, **overrides)
    run_experiment(cfg)
    print(f"wrote artifacts to {cfg.out_dir}")
    return 0


def _cmd_oracle(args) -> int:
    if args.law == "rho-inf":
        c = np.arange(args.c_max + 1)
        if args.limit == "poisson":
            rho = rho_inf_poisson(c, args.gamma)
        elif args.limit == "powerlaw":
            c = c[1:]
            rho = rho_inf_powerlaw(c, args.gamma, args.alpha)
        else:
            rho = StationaryDegreeLaw(args.gamma, args.alpha, args.c_max).pmf()
        print("c,rho")
        for cc, val in zip(c, rho):
            print(f"{cc},{val:.17g}")
        return 0
    profile = StationaryOpinionProfile(kappa=args.kappa, mbar=args.mbar,
                                       sigma2=args.sigma2, variant=args.variant)
    grid = OpinionGrid(args.n)
    g = g_inf(profile, grid)
    print("w,g")
    for w, val in zip(grid.nodes, g):
        print(f"{w:.17g},{val:.17g}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "reproduce": _cmd_reproduce,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except Exception as exc:  # report machine-readable, exit nonzero
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
