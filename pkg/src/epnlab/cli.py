"""Command-line entry point: ``epnlab <subcommand> ...``.

Exit status is 0 on success, 1 on domain errors (no EP found, metric
undefined outside the real-spectrum domain, broken Jordan chain, failed
self-check, I/O trouble) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from epnlab.errors import EpnlabError

COUPLING_HELP = ("comma-separated couplings A,B,C,... ordered from the outermost "
                 "site pair inward (A couples sites 1 and N)")


# ---------------------------------------------------------------------------
# output


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt_value(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def render(records, fmt: str) -> str:
    """Records (a dict or a list of dicts) as csv, json or text."""
    if fmt == "json":
        return json.dumps(_jsonable(records), sort_keys=True, indent=2) + "\n"
    rows = records if isinstance(records, list) else [records]
    if fmt == "csv":
        buf = io.StringIO()
        if rows:
            keys = list(rows[0].keys())
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(keys)
            for r in rows:
                w.writerow([_fmt_value(r.get(k, "")) for k in keys])
        return buf.getvalue()
    if fmt == "text":
        lines = []
        for k, r in enumerate(rows):
            if k:
                lines.append("")
            width = max((len(str(key)) for key in r), default=0)
            lines.extend(f"{str(key).ljust(width)}  {_fmt_value(v)}" for key, v in r.items())
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(records, fmt: str = "json", path: str | None = None) -> None:
    text = render(records, fmt)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_couplings(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed coupling list {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"malformed coupling list {text!r}")
    return vals


def parse_ranges(text: str) -> list[tuple[float, float]]:
    out = []
    try:
        for part in text.split(","):
            lo, hi = part.split(":")
            out.append((float(lo), float(hi)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed range {text!r}; expected lo:hi[,lo:hi]")
    for lo, hi in out:
        if not lo < hi:
            raise argparse.ArgumentTypeError(f"empty range {lo}:{hi}")
    return out


def parse_fixed(text: str) -> dict[int, float]:
    from epnlab.model import COUPLING_NAMES

    out = {}
    try:
        for part in text.split(","):
            name, val = part.split("=")
            name = name.strip().upper()
            if len(name) != 1 or name not in COUPLING_NAMES:
                raise ValueError
            out[COUPLING_NAMES.index(name)] = float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed slice {text!r}; expected e.g. C=0.26")
    return out


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {v}")
    return v


def dimension(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 2:
        raise argparse.ArgumentTypeError(f"dimension must be >= 2, got {n}")
    return n


def _common(p, formats=("json", "csv", "text"), default="json"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epnlab",
        description="Exceptional points of PT-symmetric tridiagonal lattice Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ep-find", help="locate EPN couplings by exact elimination")
    p.add_argument("--n", type=dimension, required=True)
    p.add_argument("--policy", choices=("monotone", "all"), default="monotone")
    p.add_argument("--tol", type=positive_float, default=1e-9,
                   help="residual bound for certified solutions (default 1e-9)")
    _common(p)

    p = sub.add_parser("spectrum", help="eigenvalues and their classification")
    p.add_argument("--n", type=dimension, required=True)
    p.add_argument("--couplings", type=parse_couplings, required=True, help=COUPLING_HELP)
    p.add_argument("--method", choices=("dense", "aberth"), default="dense")
    p.add_argument("--tol", type=positive_float, default=None,
                   help="sets both --tol-imag and --tol-gap")
    p.add_argument("--tol-imag", type=positive_float, default=None, help="default 1e-8")
    p.add_argument("--tol-gap", type=positive_float, default=None, help="default 1e-8")
    _common(p, default="csv")

    p = sub.add_parser("metric", help="physical metric Theta")
    p.add_argument("--n", type=dimension, default=None)
    p.add_argument("--couplings", type=parse_couplings, default=None, help=COUPLING_HELP)
    p.add_argument("--t", type=float, default=None,
                   help="N = 3 time parameter, A = sqrt(2 - 2 t^2)")
    p.add_argument("--family", choices=("n2", "n3"), default=None,
                   help="closed-form family instead of the eigenvector construction")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--tol", type=positive_float, default=None,
                   help="reality/gap tolerance of the spectrum check (default 1e-8)")
    _common(p, default="csv")

    p = sub.add_parser("jordan", help="Jordan chain at E = 0 and EP order")
    p.add_argument("--n", type=dimension, required=True)
    p.add_argument("--couplings", type=parse_couplings, default=None,
                   help=COUPLING_HELP + "; default: the monotone EP couplings")
    p.add_argument("--tol", type=positive_float, default=1e-8,
                   help="relative numerical-rank threshold (default 1e-8)")
    _common(p, default="text")

    p = sub.add_parser("domain-scan", help="classify a coupling grid")
    p.add_argument("--n", type=dimension, required=True)
    p.add_argument("--range", dest="ranges", type=parse_ranges, required=True,
                   help="lo:hi per free coupling, e.g. -2:2,-2:2")
    p.add_argument("--res", type=int, default=200, help="points per axis (>= 2)")
    p.add_argument("--fix", type=parse_fixed, default=None,
                   help="fixed couplings for a slice, e.g. C=0.26")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--boundary", default=None, help="gnuplot boundary file (2-D grids)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (capped by EPNLAB_THREADS)")
    p.add_argument("--tol", type=positive_float, default=None,
                   help="sets both --tol-imag and --tol-gap")
    p.add_argument("--tol-imag", type=positive_float, default=None, help="default 1e-8")
    p.add_argument("--tol-gap", type=positive_float, default=None, help="default 1e-8")

    p = sub.add_parser("verify", help="run the built-in golden checks")
    p.add_argument("--all", action="store_true", help="run every check")
    p.add_argument("--check", action="append", default=None,
                   help="run only the named check (repeatable)")
    p.add_argument("--tol", type=positive_float, default=1.0,
                   help="multiplier applied to every check tolerance (default 1)")
    return parser


def _tols(args):
    from epnlab.spectral import TOL_GAP, TOL_IMAG

    base_i = args.tol if args.tol is not None else TOL_IMAG
    base_g = args.tol if args.tol is not None else TOL_GAP
    return (args.tol_imag if args.tol_imag is not None else base_i,
            args.tol_gap if args.tol_gap is not None else base_g)


def _check_count(parser, n, values):
    if len(values) != n // 2:
        parser.error(f"n={n} needs {n // 2} couplings, got {len(values)}")


def _matrix_text(m) -> str:
    rows = []
    for row in np.asarray(m):
        rows.append("  ".join(f"{z.real:+.12g}{z.imag:+.12g}j" for z in row))
    return "\n".join(rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_ep_find(args, parser) -> int:
    from epnlab.ep_finder import find_ep

    sols = find_ep(args.n, args.policy, tol=args.tol)
    recs = [s.as_record() for s in sols]
    emit(recs[0] if len(recs) == 1 else recs, args.format, args.out)
    return 0


def cmd_spectrum(args, parser) -> int:
    from epnlab.model import hamiltonian_from_values
    from epnlab.spectral import eigenvalues

    _check_count(parser, args.n, args.couplings)
    ti, tg = _tols(args)
    spec = eigenvalues(hamiltonian_from_values(args.n, args.couplings),
                       method=args.method, tol_imag=ti, tol_gap=tg)
    if args.format == "csv":
        emit(spec.as_records(), "csv", args.out)
    else:
        emit({"n": args.n, "couplings": list(args.couplings),
              "eigenvalues": ([complex(e) for e in spec.eigenvalues] if args.format == "text"
                              else [[float(e.real), float(e.imag)] for e in spec.eigenvalues]),
              "classification": spec.classification, "min_gap": spec.min_gap},
             args.format, args.out)
    return 0


def _metric_records(theta, eigs):
    recs = []
    n = theta.shape[0]
    for i in range(n):
        for j in range(n):
            recs.append({"kind": "theta", "row": i, "col": j,
                         "re": float(theta[i, j].real), "im": float(theta[i, j].imag)})
    for k, e in enumerate(eigs):
        e = complex(e)
        recs.append({"kind": "eig", "row": k, "col": k, "re": e.real, "im": e.imag})
    return recs


def cmd_metric(args, parser) -> int:
    from epnlab import metric as mt
    from epnlab.model import hamiltonian_from_values
    from epnlab.spectral import TOL_GAP, TOL_IMAG

    if args.family is not None:
        if args.a is None:
            parser.error("--family needs --a")
        m = (mt.metric_family_n2(args.a, args.xi) if args.family == "n2"
             else mt.metric_family_n3(args.a, args.xi, args.eta))
        theta, eigs, info = m.theta, m.eigenvalues, {
            "positive_definite": m.positive_definite,
            "quasi_hermiticity_residual": m.quasi_hermiticity_residual}
    elif args.t is not None:
        if args.n not in (None, 3):
            parser.error("--t is defined for n = 3 only")
        s = mt.sample_metric_n3(args.t)
        theta, eigs, info = s.theta, s.eigenvalues, {
            "positive_definite": s.positive_definite, "hermitian": s.hermitian}
    else:
        if args.n is None or args.couplings is None:
            parser.error("metric needs --family, --t, or --n with --couplings")
        _check_count(parser, args.n, args.couplings)
        tol = args.tol
        m = mt.metric_from_left_eigenvectors(
            hamiltonian_from_values(args.n, args.couplings),
            tol_imag=tol or TOL_IMAG, tol_gap=tol or TOL_GAP)
        theta, eigs, info = m.theta, m.eigenvalues, {
            "positive_definite": m.positive_definite,
            "quasi_hermiticity_residual": m.quasi_hermiticity_residual}
    if args.format == "csv":
        emit(_metric_records(theta, eigs), "csv", args.out)
    else:
        eigs = np.asarray(eigs)
        if np.iscomplexobj(eigs) and np.any(eigs.imag != 0):
            ev = [[float(e.real), float(e.imag)] for e in eigs]
        else:
            ev = [float(e.real) for e in eigs]
        rec = {"theta": [[[float(z.real), float(z.imag)] for z in row] for row in theta],
               "eigenvalues": ev}
        rec.update(info)
        if args.format == "text":
            rec["theta"] = "\n" + _matrix_text(theta)
            scale = max(1.0, float(np.abs(eigs).max()))
            rec["eigenvalues"] = (list(eigs.real) if np.all(np.abs(eigs.imag) <= 1e-12 * scale)
                                  else [complex(e) for e in eigs])
        emit(rec, args.format, args.out)
    return 0


def cmd_jordan(args, parser) -> int:
    from epnlab.ep_finder import find_ep
    from epnlab.jordan import ep_order, jordan_chain
    from epnlab.model import hamiltonian_from_values

    if args.couplings is None:
        values = find_ep(args.n)[0].couplings.values
    else:
        _check_count(parser, args.n, args.couplings)
        values = args.couplings
    h = hamiltonian_from_values(args.n, values)
    order = ep_order(h, args.tol)
    tm = jordan_chain(h, rank_rtol=args.tol)
    rec = {"n": args.n, "couplings": list(values), "ep_order": order,
           "similarity_residual": tm.similarity_residual,
           "condition_number": tm.condition_number}
    if args.format == "text":
        rec["Q"] = "\n" + _matrix_text(tm.q)
    else:
        rec["Q"] = [[[float(z.real), float(z.imag)] for z in row] for row in tm.q]
    if args.format == "csv":
        rows = [{"row": i, "col": j, "re": float(tm.q[i, j].real), "im": float(tm.q[i, j].imag)}
                for i in range(args.n) for j in range(args.n)]
        emit(rows, "csv", args.out)
        sys.stderr.write(f"ep_order={order} residual={tm.similarity_residual:.3e} "
                         f"cond={tm.condition_number:.3e}\n")
    else:
        emit(rec, args.format, args.out)
    return 0


def cmd_domain_scan(args, parser) -> int:
    from epnlab import domain as dm

    ti, tg = _tols(args)
    if args.res < 2:
        parser.error("--res must be at least 2")
    try:
        grid = dm.make_grid(args.n, args.ranges, args.res, args.fix)
    except ValueError as exc:
        parser.error(str(exc))
    keep = args.boundary is not None
    samples = dm.scan_grid(args.n, args.ranges, args.res, fixed=args.fix, tol_imag=ti,
                           tol_gap=tg, threads=args.threads, out=args.out, keep=keep)
    if args.boundary is not None:
        if len(grid.free) != 2:
            parser.error("--boundary needs a 2-D grid")
        if args.n == 4 and not args.fix:
            a, b = np.meshgrid(grid.axes[0], grid.axes[1], indexing="ij")
            margin = dm.n4_margin(a, b)
        else:
            margin = dm.margin_grid(samples, grid.shape, ti, tg)
        dm.write_boundary(dm.boundary_curves(grid, margin), args.boundary)
    return 0


def cmd_verify(args, parser) -> int:
    from epnlab.golden import CHECKS, run_checks

    if not args.all and not args.check:
        parser.error("verify needs --all or --check NAME")
    names = None if args.all else args.check
    for name in names or []:
        if name not in CHECKS:
            parser.error(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    results = run_checks(names, args.tol)
    for name, ok, detail in results:
        sys.stdout.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return 0 if all(ok for _, ok, _ in results) else 1


COMMANDS = {
    "ep-find": cmd_ep_find,
    "spectrum": cmd_spectrum,
    "metric": cmd_metric,
    "jordan": cmd_jordan,
    "domain-scan": cmd_domain_scan,
    "verify": cmd_verify,
}


def dispatch(args, parser) -> int:
    try:
        return COMMANDS[args.command](args, parser)
    except EpnlabError as exc:
        sys.stderr.write(f"epnlab {args.command}: {type(exc).__name__}: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"epnlab {args.command}: {exc}\n")
        return 1


def _glue_negative_values(argv: list[str]) -> list[str]:
    """``--range -2:2`` -> ``--range=-2:2`` so argparse does not read a flag."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("--range", "--couplings", "--fix") and i + 1 < len(argv) \
                and argv[i + 1].startswith("-") and len(argv[i + 1]) > 1 \
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_glue_negative_values(argv))
    return dispatch(args, parser)


if __name__ == "__main__":
    sys.exit(main())
