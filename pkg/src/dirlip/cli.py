"""Command-line entry point ``dirlip``.

Exit codes: 0 when the requested check passes, 1 when it fails, 2 on a
usage or input error.  Every report is written as JSON with sorted keys;
CSV tables use LF line endings.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

from .disc import ArcSet, BoundaryPointSet, carleson_integral
from .errors import DirlipError
from .factor import DiscFunction, inner_outer_split
from .harness import (
    REGISTRY,
    SweepConfig,
    default_localization,
    rescale_to_unit,
    run_all,
    sector_arc,
    sweep_theorem2,
)
from .norms import aalpha_norm
from .testfns import FAMILY

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Argument parser whose errors exit with status 2 without printing usage twice."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_usage(f"{self.prog}: error: {message}"))


def _usage(message: str) -> int:
    print(message, file=sys.stderr)
    return EXIT_USAGE


def default_config() -> dict:
    text = resources.files("dirlip").joinpath("default_config.json").read_text()
    return json.loads(text)


def load_config(path: str | None) -> SweepConfig:
    data = default_config()
    if path is not None:
        data.update(json.loads(Path(path).read_text()))
    return SweepConfig.from_dict(data)


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _write_csv(text: str, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _function(name: str, n: int, lam: float | None = None):
    if name not in FAMILY:
        raise DirlipError(f"unknown function {name!r}; choose from {sorted(FAMILY)}")
    build, zeros = FAMILY[name]
    f = build(n) if lam is None else build(n, lam=lam)
    return f, zeros


def _load_function(args) -> DiscFunction:
    if args.input:
        return DiscFunction.from_json(Path(args.input).read_text())
    return _function(args.function, args.n)[0]


# ---------------------------------------------------------------------------
# subcommands


def cmd_factor(args) -> int:
    f = DiscFunction.from_json(Path(args.input).read_text())
    split = inner_outer_split(f)
    _emit({"defect": split.defect, "inner": split.inner.to_dict(), "outer": split.outer.to_dict()},
          args.out)
    return EXIT_PASS


def cmd_norms(args) -> int:
    f = _load_function(args)
    _emit(aalpha_norm(f, args.alpha).to_dict(), args.out)
    return EXIT_PASS


def _family_lambda(cfg: SweepConfig) -> float | None:
    # the fast-decay function needs its own (much lower) clamp floor
    return None if cfg.function == "fast_decay" else cfg.lam


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.grid_n:
        cfg = SweepConfig.from_dict({**cfg.to_dict(), "grid_n": args.grid_n})
    f, zeros = _function(cfg.function, cfg.grid_n, _family_lambda(cfg))
    f = rescale_to_unit(f, cfg.alpha)
    gamma = sector_arc(zeros, cfg.arc_index)
    Gamma = default_localization(zeros, cfg.arc_index)
    names = list(REGISTRY) if args.check == "ALL" else [args.check]
    reports = run_all(f, gamma, cfg, Gamma, zeros, names)
    if args.check == "ALL":
        _emit({k: r.to_dict() for k, r in reports.items()}, args.out)
    else:
        _emit(reports[args.check].to_dict(), args.out)
    return EXIT_PASS if all(r.passed for r in reports.values()) else EXIT_FAIL


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    f, zeros = _function(cfg.function, cfg.grid_n, _family_lambda(cfg))
    f = rescale_to_unit(f, cfg.alpha)
    rep = sweep_theorem2(f, cfg, zeros)
    _emit(rep.to_dict(), args.out)
    if args.csv:
        _write_csv(rep.to_csv(), args.csv)
    return EXIT_PASS if rep.verdict else EXIT_FAIL


def cmd_approximate(args) -> int:
    from .approx import theorem1_pipeline

    cfg = load_config(args.config)
    f, zeros = _function(cfg.function, cfg.grid_n, _family_lambda(cfg))
    N = args.N if args.N is not None else int(math.ceil(cfg.M / cfg.alpha))
    norm = aalpha_norm(f, cfg.alpha).aalpha
    eps = args.eps_fraction * norm
    run = theorem1_pipeline(f, alpha=cfg.alpha, M=cfg.M, eps=eps, N=N,
                            schedule=range(1, args.steps + 1), zeros=zeros)
    _emit(run.to_dict(), args.out)
    if args.csv:
        _write_csv(run.to_csv(), args.csv)
    return EXIT_PASS if run.terminal_error < eps else EXIT_FAIL


def cmd_carleson(args) -> int:
    if args.arcs:
        E = ArcSet.from_json(Path(args.arcs).read_text())
    elif args.input:
        E = BoundaryPointSet.from_json(Path(args.input).read_text())
    else:
        pts = [float(p) for p in args.points.split(",") if p.strip()]
        E = BoundaryPointSet(tuple(pts))
    res = carleson_integral(E, refinement=args.refinement)
    _emit({"value": res.value, "diverged": res.diverged, "zero_fraction": res.zero_fraction},
          args.out)
    return EXIT_FAIL if res.diverged else EXIT_PASS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dirlip", description="Outer functions, boundary zero sets and norm checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("factor", help="inner-outer split of a function given as JSON")
    s.add_argument("--input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("norms", help="sup, Lipschitz, Dirichlet and combined norms")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--function", choices=sorted(FAMILY))
    s.add_argument("--n", type=int, default=4096)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--out")
    s.set_defaults(func=cmd_norms)

    s = sub.add_parser("approximate", help="run the approximation pipeline")
    s.add_argument("--config")
    s.add_argument("--N", type=int)
    s.add_argument("--steps", type=int, default=8)
    s.add_argument("--eps-fraction", type=float, default=0.1)
    s.add_argument("--csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_approximate)

    s = sub.add_parser("verify", help="run one named inequality check (or ALL)")
    s.add_argument("--check", required=True, choices=sorted(REGISTRY) + ["ALL"])
    s.add_argument("--config")
    s.add_argument("--grid-n", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep-theorem2", help="random localization sweep")
    s.add_argument("--config")
    s.add_argument("--csv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("carleson", help="Carleson integral of a point set or arc union")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="comma-separated angles")
    src.add_argument("--input", help="point-set JSON")
    src.add_argument("--arcs", help="arc-set JSON (fattened set)")
    s.add_argument("--refinement", type=int, default=2 ** 12)
    s.add_argument("--out")
    s.set_defaults(func=cmd_carleson)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_PASS
    try:
        return args.func(args)
    except (DirlipError, KeyError, OSError, ValueError) as exc:
        return _usage(f"dirlip: error: {exc}")


if __name__ == "__main__":
    sys.exit(main())
