"""Command line interface: ``lyucalc table|verify-embedding|ext-dims|check``.

Problem files are ``key=value`` lines::

    # two skew lines
    label=skew lines
    p=2
    vars=x0,x1,x2,x3
    gens=x0*x2, x0*x3, x1*x2, x1*x3

``gens`` may appear several times; an empty ``gens=`` is the zero ideal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import (InhomogeneousError, LyucalcError, NotInImage, ParseError,
                     PipelineAssertion, TwistMismatch)
from .polyring import Poly, RingSpec, is_prime

TABLE_SCHEMA = "lyucalc.table/1"
EXT_SCHEMA = "lyucalc.ext_dims/1"

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_INHOMOGENEOUS, EXIT_INTERNAL = 0, 1, 2, 3, 4


@dataclass
class IdealSpec:
    p: int
    vars: list
    gens: list                      # polynomial strings as written
    label: str = None
    polys: list = field(default=None, repr=False)

    @property
    def ring(self) -> RingSpec:
        return RingSpec(self.p, self.vars)

    def echo(self):
        out = {"p": self.p, "vars": list(self.vars), "gens": list(self.gens)}
        if self.label is not None:
            out["label"] = self.label
        return out


def parse_problem(text: str) -> IdealSpec:
    values = {}
    gens_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected key=value", lineno, col)
        key, _, value = line.partition("=")
        k = key.strip()
        vcol = len(key) + 2  # column of the first character after '='
        if k == "gens":
            gens_lines.append((lineno, vcol, value))
        elif k in ("p", "vars", "label"):
            if k in values:
                raise ParseError(f"duplicate key {k!r}", lineno, 1)
            values[k] = (lineno, vcol, value)
        else:
            raise ParseError(f"unknown key {k!r}", lineno, len(key) - len(key.lstrip()) + 1)
    if "p" not in values:
        raise ParseError("missing p=")
    if "vars" not in values:
        raise ParseError("missing vars=")
    lineno, vcol, value = values["p"]
    try:
        p = int(value.strip())
    except ValueError:
        raise ParseError(f"p must be an integer, got {value.strip()!r}", lineno, vcol) from None
    if not is_prime(p) or p >= 2**31:
        raise ParseError(f"p={p} is not a prime below 2^31", lineno, vcol)
    lineno, vcol, value = values["vars"]
    names = [v.strip() for v in value.split(",")]
    offset = vcol
    for v, piece in zip(names, value.split(",")):
        if not v.isidentifier():
            lead = len(piece) - len(piece.lstrip())
            raise ParseError(f"bad variable name {v!r}", lineno, offset + lead)
        offset += len(piece) + 1
    if len(set(names)) != len(names):
        raise ParseError("variable names repeat", lineno, vcol)
    ring = RingSpec(p, names)
    gens, polys = [], []
    for lineno, vcol, value in gens_lines:
        offset = vcol
        for piece in value.split(","):
            stripped = piece.strip()
            if stripped:
                lead = len(piece) - len(piece.lstrip())
                try:
                    f = ring.parse(stripped, line=lineno)
                except ParseError as exc:
                    col = (exc.column or 1) + offset + lead - 1
                    raise ParseError(str(exc).split(": ", 1)[-1], lineno, col) from None
                if not f.is_homogeneous():
                    raise InhomogeneousError(
                        f"line {lineno}, column {offset + lead}: generator {stripped!r} is not homogeneous")
                gens.append(stripped)
                polys.append(f)
            offset += len(piece) + 1
    label = values["label"][2].strip() if "label" in values else None
    return IdealSpec(p, names, gens, label, polys)


def load_problem(path) -> IdealSpec:
    return parse_problem(Path(path).read_text())


def _write_bundle(args, spec_text, exc) -> Path:
    root = Path(args.bundle_dir) if getattr(args, "bundle_dir", None) else None
    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
    d = Path(tempfile.mkdtemp(prefix="lyucalc-repro-", dir=root))
    (d / "input.txt").write_text(spec_text)
    (d / "traceback.txt").write_text("".join(traceback.format_exception(exc)))
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    (d / "flags.json").write_text(json.dumps(flags, indent=2, sort_keys=True, default=str))
    (d / "version.txt").write_text(__version__ + "\n")
    return d


def _cache(args):
    if getattr(args, "cache_dir", None):
        from .homology import ResolutionCache
        return ResolutionCache(args.cache_dir)
    return None


def build_table_report(spec: IdealSpec, table, cell=None, cache=None) -> dict:
    entries = [[i, j, v] for i, j, v in table.nonzero()]
    if cell is not None:
        i, j = cell
        entries = [[i, j, table[i, j]]]
    seconds = [[i, j, round(t, 6)] for (i, j), t in sorted(table.meta["seconds"].items(),
                                                          key=lambda kv: (kv[0][1], kv[0][0]))]
    return {
        "schema": TABLE_SCHEMA,
        "input": spec.echo(),
        "dimA": table.dimA,
        "entries": entries,
        "cells_computed": [[i, j] for (i, j, _) in seconds],
        "minimize": table.meta["minimize"],
        "ideal_hash": table.meta["ideal_hash"],
        "seconds": seconds,
        "tool_version": __version__,
        "cache_hits": cache.hits if cache is not None else 0,
    }


def strip_timing(report: dict) -> dict:
    """Copy of a report without the fields that vary between runs."""
    out = dict(report)
    out.pop("seconds", None)
    out.pop("cache_hits", None)
    return out


def _emit(obj, fmt, out):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "j", "lambda"])
        for row in obj["entries"]:
            w.writerow(row)
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_table(args, spec: IdealSpec, out):
    from .lyutable import lyubeznik_table
    cache = _cache(args)
    cell = tuple(args.cell) if args.cell else None
    table = lyubeznik_table(spec.ring, spec.polys, minimize=not args.no_minimize, cache=cache,
                            cell=cell, threads=args.threads)
    _emit(build_table_report(spec, table, cell, cache), args.format, out)
    return EXIT_OK


def cmd_verify_embedding(args, spec: IdealSpec, out):
    from .lyutable import lyubeznik_table
    from .polyring import format_poly
    from .veronese import veronese_ideal
    minimize = not args.no_minimize
    ring = spec.ring
    t1 = lyubeznik_table(ring, spec.polys, minimize=minimize, threads=args.threads)
    target, J = veronese_ideal(ring, spec.polys, args.veronese)
    t2 = lyubeznik_table(target, J, minimize=minimize, threads=args.threads)
    same = t1 == t2
    out.write(f"original ({', '.join(ring.var_names)}), dim A = {t1.dimA}\n{t1.as_text()}\n")
    out.write(f"entries: {[list(e) for e in t1.nonzero()]}\n")
    out.write(f"{args.veronese}-uple image in k[{', '.join(target.var_names)}]:\n")
    for f in J:
        out.write(f"  {f}\n")
    out.write(f"re-embedded, dim A = {t2.dimA}\n{t2.as_text()}\n")
    out.write(f"entries: {[list(e) for e in t2.nonzero()]}\n")
    out.write("tables equal\n" if same else "TABLES DIFFER\n")
    return EXIT_OK if same else EXIT_MISMATCH


def _degree_window(text):
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None


def cmd_ext_dims(args, spec: IdealSpec, out):
    from .extcalc import double_ext_data
    data = double_ext_data(spec.ring, spec.polys, not args.no_minimize)
    a, b = args.degrees
    dims = [[d, data.piece(args.i, args.j, d).dim] for d in range(a, b + 1)]
    report = {"schema": EXT_SCHEMA, "input": spec.echo(), "i": args.i, "j": args.j, "dims": dims}
    if args.format == "text":
        for d, n in dims:
            out.write(f"{d}\t{n}\n")
    else:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_check(args, spec: IdealSpec, out):
    """Randomized p-linearity and degree-scaling checks on every cell."""
    from .frobact import check_p_linearity, degree_scaling_ok
    from .lyutable import krull_dimension, table_cells
    rng = random.Random(args.seed)
    ring = spec.ring
    dimA = krull_dimension(ring, spec.polys)
    failures = 0
    lines = []
    for i, j in table_cells(dimA):
        f = check_p_linearity(ring, spec.polys, i, j, 0, args.trials, rng, not args.no_minimize)
        scale = all(degree_scaling_ok(ring, spec.polys, i, j, d, not args.no_minimize) for d in (-1, 0, 1))
        failures += f + (0 if scale else 1)
        lines.append({"cell": [i, j], "p_linearity_failures": f, "degree_scaling": scale})
    out.write(json.dumps({"seed": args.seed, "trials": args.trials, "cells": lines}, indent=2) + "\n")
    return EXIT_OK if failures == 0 else EXIT_MISMATCH


def make_parser():
    ap = argparse.ArgumentParser(prog="lyucalc", description="Lyubeznik numbers of projective cones over F_p")
    ap.add_argument("--version", action="version", version=f"lyucalc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="problem file (key=value lines)")
        sp.add_argument("--no-minimize", action="store_true", help="skip resolution minimization")
        sp.add_argument("--bundle-dir", help="where to write reproduction bundles on internal errors")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: $LYUCALC_THREADS or 1)")

    t = sub.add_parser("table", help="compute the Lyubeznik table")
    common(t)
    t.add_argument("--cell", nargs=2, type=int, metavar=("I", "J"))
    t.add_argument("--cache-dir", help="persist resolutions here")
    t.add_argument("--format", choices=["json", "csv"], default="json")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify-embedding", help="compare tables before and after a Veronese re-embedding")
    common(v)
    v.add_argument("--veronese", type=int, required=True, metavar="D")
    v.set_defaults(func=cmd_verify_embedding)

    e = sub.add_parser("ext-dims", help="dimensions of E^{i,j}(R/I) over a degree window")
    common(e)
    e.add_argument("--i", type=int, required=True)
    e.add_argument("--j", type=int, required=True)
    e.add_argument("--degrees", type=_degree_window, default=(0, 0),
                   help="window a..b (write --degrees=-1..1 for negative starts)")
    e.add_argument("--format", choices=["json", "text"], default="json")
    e.set_defaults(func=cmd_ext_dims)

    c = sub.add_parser("check", help="randomized p-linearity checks of the Frobenius action")
    common(c)
    c.add_argument("--seed", type=int, default=20240601)
    c.add_argument("--trials", type=int, default=20)
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = make_parser().parse_args(argv)
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        err.write(f"error: cannot read {args.file}: {exc}\n")
        return EXIT_PARSE
    try:
        spec = parse_problem(text)
    except ParseError as exc:
        err.write(f"parse error in {args.file}: {exc}\n")
        return EXIT_PARSE
    except InhomogeneousError as exc:
        err.write(f"inhomogeneous generator in {args.file}: {exc}\n")
        return EXIT_INHOMOGENEOUS
    try:
        return args.func(args, spec, out)
    except (TwistMismatch, NotInImage, PipelineAssertion) as exc:
        bundle = _write_bundle(args, text, exc)
        err.write(f"internal error ({type(exc).__name__}): {exc}\nreproduction bundle: {bundle}\n")
        return EXIT_INTERNAL
    except InhomogeneousError as exc:
        err.write(f"inhomogeneous input: {exc}\n")
        return EXIT_INHOMOGENEOUS


if __name__ == "__main__":
    sys.exit(main())
