"""Command-line entry point.

Exit codes: 0 success, 1 execution error (bad config, missing file, numerical
error), 2 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from .acceptance import run_all
from .config import load_config, parse_config
from .errors import ConfigInvalid, MindetError
from .pipeline import moment_table_gap, reverify, run_experiment, write_artifacts

log = logging.getLogger("mindet")

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise ConfigInvalid("flags", message)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _summarize(res) -> int:
    rep = res.report
    print(f"{rep.experiment}: {rep.verdict}")
    if not rep.confirmed:
        print(f"  failing gate value: {rep.failed_value!r}")
    for c in rep.condition_checks:
        print(f"  {'ok  ' if c.passed else 'FAIL'} {c.name} = {c.value:.6g}")
    print(f"  artifacts: {res.config.output_dir}")
    return res.exit_code


def _execute(cfg) -> int:
    res = run_experiment(cfg)
    write_artifacts(res)
    return _summarize(res)


def cmd_run(args) -> int:
    return _execute(load_config(args.config, args.out))


def cmd_generate_stieltjes(args) -> int:
    w = args.half_width
    raw = {
        "name": "stieltjes",
        "kind": "stieltjes",
        "grid": {"x_min": -4.0 * w, "x_max": 4.0 * w, "n_points": args.n_points},
        "generator": {"kind": args.kind, "half_width": w},
        "family": {"lambda": args.lam, "phi": args.phi, "epsilons": args.epsilons},
        "n_max": args.n_max,
    }
    return _execute(parse_config(raw, args.out))


def cmd_generate_operator(args) -> int:
    reach = args.gap + 2.0 * args.half_width
    op = {"kind": args.operator}
    if args.operator == "gauged":
        op.update(c=args.c, n=args.n)
    raw = {
        "name": f"operator_{args.operator}",
        "kind": "operator",
        "grid": {"x_min": -reach, "x_max": reach, "n_points": args.n_points},
        "pair": {"half_width": args.half_width, "gap": args.gap},
        "family": {"betas": args.betas, "operator": op},
        "n_max": args.n_max,
    }
    return _execute(parse_config(raw, args.out))


def cmd_verify(args) -> int:
    original, fresh = reverify(args.input)
    gap = moment_table_gap(original, fresh)
    print(f"{fresh.experiment}: {fresh.verdict}")
    print(f"  original verdict: {original.verdict}")
    print(f"  moment table max relative difference: {gap:.3e}")
    if fresh.verdict != original.verdict or gap > 1e-12:
        log.error("re-verification does not reproduce the original report")
        return EXIT_ERROR
    return EXIT_OK if fresh.confirmed else EXIT_FAILED


def cmd_selftest(args) -> int:
    results = run_all()
    for r in results:
        print(r.line())
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    return EXIT_OK if n_pass == len(results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mindet", description="Build and verify M-indeterminate density families.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run an experiment config (file path or bundled name)")
    r.add_argument("config")
    r.add_argument("--out", help="override output_dir")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("generate-stieltjes", help="Stieltjes family from a bump generator")
    s.add_argument("--half-width", type=float, default=1.0)
    s.add_argument("--lambda", dest="lam", type=float, default=2.5)
    s.add_argument("--phi", type=float, default=0.0)
    s.add_argument("--epsilons", type=_floats, default=[-1.0, -0.5, 0.0, 0.5, 1.0])
    s.add_argument("--kind", choices=["standard_bump", "cosine_power_bump"], default="standard_bump")
    s.add_argument("--n-max", type=int, default=8)
    s.add_argument("--n-points", type=int, default=4096)
    s.add_argument("--out", default="out/stieltjes")
    s.set_defaults(func=cmd_generate_stieltjes)

    o = sub.add_parser("generate-operator", help="operator family from a disjoint bump pair")
    o.add_argument("--operator", choices=["translation", "gauged"], default="translation")
    o.add_argument("--c", type=float, default=0.3)
    o.add_argument("--n", type=int, default=2)
    o.add_argument("--gap", type=float, default=3.0, help="centre-to-centre distance")
    o.add_argument("--half-width", type=float, default=0.5)
    o.add_argument("--betas", type=_floats, default=[0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi])
    o.add_argument("--n-max", type=int, default=8)
    o.add_argument("--n-points", type=int, default=4096)
    o.add_argument("--out", default="out/operator")
    o.set_defaults(func=cmd_generate_operator)

    v = sub.add_parser("verify", help="re-verify artifacts from a previous run")
    v.add_argument("--in", dest="input", required=True)
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("selftest", help="run the acceptance suite")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.DEBUG)
        return args.func(args)
    except ConfigInvalid as exc:
        log.error("ConfigInvalid: %s", exc)
    except FileNotFoundError as exc:
        log.error("IoError: %s", exc)
    except OSError as exc:
        log.error("IoError: %s", exc)
    except MindetError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
    except (ValueError, ArithmeticError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
