"""Command line front end.

Exit codes: 0 success, 2 bad configuration or I/O, 3 sampling failure,
4 point set not in generic position.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .exactla import is_prime
from .genanalysis import (
    SCAN_HEADER, DegenerateInputError, NotGenericError, brute_force_nu,
    default_box, family_cells, general_generator_degrees,
    k2_cells, nu, scan, upper_bound, v_bound, verify_thm55,
)
from .multidegree import as_degree, as_shape, box_degrees, compute_degree_sets
from .points import (
    DEFAULT_COORD_BOUND, DEFAULT_RETRIES, SamplingError, hilbert, is_generic_position,
    load_points, point_set_to_json, random_generic_point_set, random_point_set,
)

EXIT_OK, EXIT_CONFIG, EXIT_SAMPLING, EXIT_GENERIC = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def parse_field(text: str, coord_bound: int) -> int | None:
    if text == "rational":
        return None
    if not text.startswith("fp:"):
        raise ConfigError(f"field must be 'rational' or 'fp:P', got {text!r}")
    try:
        p = int(text[3:])
    except ValueError:
        raise ConfigError(f"bad prime in {text!r}") from None
    if not is_prime(p):
        raise ConfigError(f"{p} is not prime")
    if p <= 2 * coord_bound:
        raise ConfigError(f"need p > 2*coord_bound = {2 * coord_bound}, got {p}")
    return p


def parse_range(text: str) -> list[int]:
    """'a:b' (inclusive), 'a-b' or 'a,b,c'."""
    for sep in (":", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            try:
                return list(range(int(lo), int(hi) + 1))
            except ValueError:
                raise ConfigError(f"bad range {text!r}") from None
    return list(parse_ints(text))


def _degree(j) -> str:
    return "(" + ",".join(map(str, j)) + ")"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- point sets --------------------------------------------------------------------

def _seed(args) -> int:
    env = os.environ.get("GENPOS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"GENPOS_SEED must be an integer, got {env!r}") from None
    return args.seed


def _shape(args):
    if args.shape is None:
        raise ConfigError("--shape is required")
    try:
        return as_shape(parse_ints(args.shape))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _points(args, certify=True):
    p = parse_field(args.field, args.coord_bound)
    if args.points:
        try:
            return load_points(args.points, p)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.points}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    shape = _shape(args)
    if args.s is None or args.s < 1:
        raise ConfigError("--s must be a positive integer")
    sample = random_generic_point_set if certify and not args.arbitrary else random_point_set
    return sample(args.s, shape, args.coord_bound, _seed(args), p, args.retries)


def _box(args, k):
    if args.box is None:
        return None
    try:
        return as_degree(parse_ints(args.box), k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- commands --------------------------------------------------------------------

def cmd_gen(args) -> str:
    X = _points(args)
    data = point_set_to_json(X)
    data["seed"] = X.seed
    if args.output == "text":
        lines = [f"# s={X.s} shape={_degree(X.shape)} seed={X.seed}"]
        for P in data["points"]:
            lines.append(" x ".join("[" + ":".join(c) + "]" for c in P))
        return "\n".join(lines) + "\n"
    return _dump_json(data)


def hilbert_table(X, box) -> dict:
    return {j: hilbert(X, j) for j in box_degrees(box)}


def render_hilbert_text(table, box) -> str:
    if len(box) == 2:
        # rows run over the first degree, columns over the second
        width = max(len(str(v)) for v in table.values())
        lines = []
        for a in range(box[0] + 1):
            lines.append(" ".join(str(table[(a, b)]).rjust(width) for b in range(box[1] + 1)))
        return "\n".join(lines) + "\n"
    return "".join(f"{_degree(j)} {v}\n" for j, v in table.items())


def cmd_hilbert(args) -> str:
    X = _points(args)
    box = _box(args, X.k)
    if box is None:
        raise ConfigError("hilbert needs --box")
    table = hilbert_table(X, box)
    if args.output == "text":
        return render_hilbert_text(table, box)
    rows = [{"degree": list(j), "hilbert": v} for j, v in table.items()]
    if args.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "hilbert"])
        for j, v in table.items():
            w.writerow([",".join(map(str, j)), v])
        return buf.getvalue()
    return _dump_json({"shape": list(X.shape), "s": X.s, "box": list(box), "values": rows})


def cmd_gens(args) -> str:
    X = _points(args)
    bound = general_generator_degrees(X)
    box = _box(args, X.k) or default_box(X)
    found = brute_force_nu(X, box)
    out = {
        "s": X.s, "shape": list(X.shape),
        "t": list(bound.box),
        "E": [list(j) for j in sorted(bound.E)],
        "generators": [{"degree": list(j), "count": c} for j, c in sorted(found.per_degree.items())],
        "nu": found.total,
    }
    if X.s >= 2 and X.s > max(X.shape) and is_generic_position(X):
        out["T"] = [list(j) for j in sorted(compute_degree_sets(X.s, X.shape).T)]
    if args.output == "text":
        lines = [f"t = {_degree(bound.box)}",
                 "E = " + " ".join(_degree(j) for j in sorted(bound.E))]
        if "T" in out:
            lines.append("T = " + " ".join(_degree(j) for j in out["T"]))
        lines += [f"{_degree(j)} {c}" for j, c in sorted(found.per_degree.items())]
        lines.append(f"nu {found.total}")
        return "\n".join(lines) + "\n"
    return _dump_json(out)


def cmd_nu(args) -> str:
    if args.brute:
        X = _points(args)
        box = _box(args, X.k)
        res = brute_force_nu(X, box)
        try:
            v = v_bound(X.s, X.shape)
        except DegenerateInputError:
            v = None
        if args.output == "text":
            lines = [f"nu {res.total}", f"v {v if v is not None else '-'}",
                     f"box {_degree(res.box)}"]
            lines += [f"{_degree(j)} new={c}" for j, c in sorted(res.per_degree.items())]
            return "\n".join(lines) + "\n"
        return _dump_json({
            "s": X.s, "shape": list(X.shape), "method": res.method, "box": list(res.box),
            "per_degree": [{"degree": list(j), "new_generators": c}
                           for j, c in sorted(res.per_degree.items())],
            "nu": res.total, "v": v,
        })
    if args.points is None:
        # refuse degenerate requests before sampling anything
        if args.s is None:
            raise ConfigError("--s is required")
        v_bound(args.s, _shape(args))
    X = _points(args)
    rep = nu(X)
    if args.output == "text":
        lines = [f"nu {rep.nu}", f"v {rep.v}", f"upper {rep.upper}", f"gap {rep.gap}"]
        for j in sorted(rep.per_degree):
            c = rep.per_degree[j]
            w = "" if c.w_dim is None else f" w_dim={c.w_dim}"
            lines.append(f"{_degree(j)} slice_dim={c.slice_dim}{w} new={c.new_generators}")
        return "\n".join(lines) + "\n"
    return _dump_json(rep.to_json())


def cmd_vbound(args) -> str:
    shape = _shape(args)
    if args.s is None:
        raise ConfigError("--s is required")
    v = v_bound(args.s, shape)
    up = upper_bound(args.s, shape)
    ds = compute_degree_sets(args.s, shape)
    if args.output == "text":
        return (f"v {v}\nupper {up}\n"
                f"D {' '.join(_degree(j) for j in sorted(ds.D))}\n"
                f"DD {' '.join(_degree(j) for j in sorted(ds.DD))}\n")
    return _dump_json({
        "s": args.s, "shape": list(shape), "v": v, "upper": up,
        "D": [list(j) for j in sorted(ds.D)],
        "DD": [{"degree": list(j), "L": list(ds.L[j])} for j in sorted(ds.DD)],
    })


def scan_cells(args):
    cells = []
    if args.k2:
        n, s = parse_ints(args.k2)
        cells += k2_cells(n, s)
    if args.family:
        cells += family_cells(parse_range(args.family))
    if args.shapes:
        if not args.s_range:
            raise ConfigError("--shapes needs --s-range")
        srange = parse_range(args.s_range)
        for text in args.shapes:
            try:
                shape = as_shape(parse_ints(text))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            # only non-degenerate cells: s > max n_h
            cells += [(s, shape) for s in srange if s >= 2 and s > max(shape)]
    if not cells:
        raise ConfigError("scan needs --k2, --family or --shapes with --s-range")
    return cells


def cmd_scan(args) -> str:
    cells = scan_cells(args)
    p = parse_field(args.field, args.coord_bound)
    rows = scan(cells, args.seeds_per_cell, _seed(args), args.coord_bound, args.retries, p,
                args.jobs)
    if args.output == "json":
        return _dump_json([r.to_json() for r in rows])
    if args.output == "text":
        return "".join(" ".join(r.csv_fields()) + "\n" for r in rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()


def cmd_verify(args) -> str:
    rep = verify_thm55(_seed(args), args.coord_bound, args.retries)
    if args.output == "text":
        return (f"seed {rep.seed}\na {rep.a}\nb {rep.b}\nw_dim_111 {rep.w_dim_111}\n"
                f"relations {rep.relations}\nnu {rep.nu}\nv {rep.v}\ngap {rep.gap}\n"
                f"ok {rep.ok}\n")
    return _dump_json(rep.to_json())


COMMANDS = {
    "gen": cmd_gen, "hilbert": cmd_hilbert, "gens": cmd_gens, "nu": cmd_nu,
    "vbound": cmd_vbound, "scan": cmd_scan, "verify-thm55": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--shape", help="projective dimensions, e.g. 1,2,2")
    common.add_argument("--s", type=int, help="number of points")
    common.add_argument("--seed", type=int, default=0, help="GENPOS_SEED overrides it")
    common.add_argument("--coord-bound", type=int, default=DEFAULT_COORD_BOUND)
    common.add_argument("--retries", type=int, default=DEFAULT_RETRIES,
                        help="retry cap for sampling")
    common.add_argument("--field", default="rational", help="rational or fp:P")
    common.add_argument("--box", help="largest degree, e.g. 3,3")
    common.add_argument("--points", help="point set JSON file instead of sampling")
    common.add_argument("--arbitrary", action="store_true",
                        help="sample without certifying generic position")
    common.add_argument("--output", choices=["json", "csv", "text"], default=None)
    common.add_argument("--out", help="write here instead of stdout")

    ap = argparse.ArgumentParser(prog="genpos", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "nu":
            sp.add_argument("--brute", action="store_true",
                            help="count generators directly, no genericity needed")
        if name == "scan":
            sp.add_argument("--k2", help="MAXN,MAXS: every k=2 cell up to these")
            sp.add_argument("--family", help="n range for the cells (1+2n; 1,n,n)")
            sp.add_argument("--shapes", nargs="+", help="shapes to sweep over --s-range")
            sp.add_argument("--s-range", help="a:b inclusive, or a list a,b,c")
            sp.add_argument("--seeds-per-cell", type=int, default=1)
            sp.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.output is None:
        args.output = "csv" if args.command == "scan" else "json"
    try:
        if args.coord_bound < 0:
            raise ConfigError("--coord-bound must be >= 0")
        text = COMMANDS[args.command](args)
    except (ConfigError, DegenerateInputError) as exc:
        print(f"genpos: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SamplingError as exc:
        print(f"genpos: sampling failed: {exc}", file=sys.stderr)
        return EXIT_SAMPLING
    except NotGenericError as exc:
        print(f"genpos: {exc}", file=sys.stderr)
        return EXIT_GENERIC
    except ValueError as exc:
        print(f"genpos: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"genpos: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(text)
    return EXIT_OK
