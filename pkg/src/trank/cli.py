"""Command-line front end: ``trank <command> ...``.

Exit codes: 0 success or certified, 1 usage error, 2 search exhausted or
unresolved, 3 genericity failure, 4 uncovered regime.  JSON output is
compact and built in a fixed key order, so identical invocations give
identical bytes.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .completion import complete_with_certificate, reorient
from .errors import GenericityFailed, SearchExhausted, TrankError, Uncovered
from .estimation import als_fit, monte_carlo, worker_count
from .genericity import in_T_frak
from .jacobian import SPoint, dimension_check, jacobian, verify_closed_forms
from .rank_tables import hurwitz_decompose, typical_ranks
from .tensor import DEFAULT_EPS, load_tensor

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNRESOLVED = 2
EXIT_GENERICITY = 3
EXIT_UNCOVERED = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, seeded: bool = True) -> None:
    if seeded:
        p.add_argument("--seed", type=int, default=0, help="root seed for all randomness")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.set_defaults(format="json")
    p.add_argument("--out", help="write the report to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trank", description="Typical ranks of real 3-tensors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rho", help="Hurwitz-Radon number of n")
    p.add_argument("n", type=int)
    _common(p, seeded=False)

    p = sub.add_parser("table", help="typical ranks of m x n x p tensors")
    p.add_argument("dims", type=int, nargs=3, metavar="D")
    _common(p, seeded=False)

    p = sub.add_parser("certify-genericity", help="check cd1-cd5 for a tensor file")
    p.add_argument("tensor")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--trials", type=int, default=3, help="irreducibility restrictions")
    _common(p)

    p = sub.add_parser("complete", help="certified slice completion of a tensor file")
    p.add_argument("tensor")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--trials", type=int, default=3, help="irreducibility restrictions")
    p.add_argument("--levels", type=int, default=11)
    p.add_argument("--directions", type=int, default=16)
    _common(p)

    p = sub.add_parser("jacobian", help="exact Jacobian of the m = 3 parametrization")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, default=1)
    _common(p)

    p = sub.add_parser("montecarlo", help="numerical-rank histogram of Gaussian tensors")
    p.add_argument("dims", type=int, nargs=3, metavar="D")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--r-max", type=int)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iters", type=int, default=500)
    _common(p)

    p = sub.add_parser("fit", help="CP fit of a tensor file at a given rank")
    p.add_argument("tensor")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iters", type=int, default=500)
    _common(p)
    return parser


def _csv(rows: list[dict]) -> str:
    keys = list(rows[0]) if rows else []
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join(" ".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v)
                              for v in (r[k] for k in keys)))
    return "\n".join(lines) + "\n"


def _jacobian_point(args):
    n, seed, k, closed = args
    s = SPoint.random(n, np.random.default_rng([seed, k]))
    rep = jacobian(s)
    rep.closed_forms = closed
    return rep.to_dict()


def _run(args) -> tuple[int, object, str | None]:
    """Returns (exit code, JSON payload, optional CSV text)."""
    cmd = args.command
    if cmd == "rho":
        d = hurwitz_decompose(args.n).to_dict()
        return EXIT_OK, d, _csv([d])
    if cmd == "table":
        try:
            r = typical_ranks(*args.dims)
        except Uncovered as e:
            return EXIT_UNCOVERED, {"dims": list(args.dims), "error": "Uncovered", "message": str(e)}, None
        d = r.to_dict()
        return EXIT_OK, d, _csv([{"dims": d["dims"], "ranks": d["ranks"], "exactness": d["exactness"],
                                  "regime": d["regime"]}])
    if cmd == "certify-genericity":
        X, perm, dims = reorient(load_tensor(args.tensor))
        rep = in_T_frak(X, eps=args.eps, trials=args.trials, seed=args.seed)
        d = rep.to_dict()
        d.update(seed=args.seed, permutation=list(perm), sorted_dims=list(dims))
        return (EXIT_OK if rep.overall else EXIT_GENERICITY), d, None
    if cmd == "complete":
        T = load_tensor(args.tensor)
        try:
            rep = complete_with_certificate(T, seed=args.seed, levels=args.levels,
                                            directions=args.directions, trials=args.trials,
                                            eps=args.eps)
        except GenericityFailed as e:
            return EXIT_GENERICITY, {"error": "GenericityFailed", "condition": e.condition,
                                     "report": e.report.to_dict() if e.report else None,
                                     "seed": args.seed}, None
        except SearchExhausted as e:
            return EXIT_UNRESOLVED, {"error": "SearchExhausted", "message": str(e),
                                     "tries": e.tries, "seed": args.seed}, None
        return EXIT_OK, rep.to_dict(), None
    if cmd == "jacobian":
        dimension_check(args.n)
        closed = verify_closed_forms(args.n) if args.n <= 4 else None
        jobs = [(args.n, args.seed, k, closed) for k in range(args.points)]
        workers = worker_count()
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(_jacobian_point, jobs))
        else:
            reports = [_jacobian_point(j) for j in jobs]
        for r in reports:
            r["seed"] = args.seed
        code = EXIT_OK if all(r["nonsingular"] for r in reports) else EXIT_UNRESOLVED
        rows = [{"point": k, "n": r["n"], "determinant": r["determinant"],
                 "nonsingular": r["nonsingular"]} for k, r in enumerate(reports)]
        return code, reports, _csv(rows)
    if cmd == "montecarlo":
        h = monte_carlo(*args.dims, trials=args.trials, seed=args.seed, eps=args.eps,
                        r_max=args.r_max, restarts=args.restarts, max_iters=args.max_iters)
        return EXIT_OK, h.to_dict(), h.to_csv()
    if cmd == "fit":
        T = load_tensor(args.tensor)
        rep = als_fit(T, args.rank, restarts=args.restarts, max_iters=args.max_iters,
                      tol=args.tol, seed=args.seed)
        d = rep.to_dict()
        return (EXIT_OK if rep.converged else EXIT_UNRESOLVED), d, None
    raise UsageError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, payload, csv_text = _run(args)
    except UsageError as e:
        print(f"trank: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (TrankError, ValueError, OSError) as e:
        print(f"trank: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "csv":
        if csv_text is None:
            print(f"trank: error: {args.command} has no CSV output", file=sys.stderr)
            return EXIT_USAGE
        text = csv_text
    else:
        text = json.dumps(payload, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
