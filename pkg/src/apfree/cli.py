"""Command-line front end.

Results go to stdout (JSON by default, CSV for tables with ``--format csv``);
diagnostics go to stderr as JSON.  Exit codes: 0 ok, 1 bad arguments,
2 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from apfree import dyadic, enumeration, grids, vdw, words
from apfree import density as dens
from apfree.errors import BudgetExceeded


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _word(text):
    try:
        return words.parse_word(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _emit(obj):
    if isinstance(obj, str):
        sys.stdout.write(obj if obj.endswith("\n") else obj + "\n")
    else:
        sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _csv(header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _frac(f):
    return f"{f.numerator}/{f.denominator}"


# -- word -------------------------------------------------------------------

def cmd_word_longest_ap(a):
    L, prog = words.longest_ap(a.w)
    out = {"word": str(a.w), "L": L, "witness": None}
    if prog is not None:
        out["witness"] = {"start": prog.start, "gap": prog.gap, "terms": prog.terms}
    if a.k is not None:
        out["k"] = a.k
        out["k_ap_free"] = L < a.k
    return out


def cmd_word_subsequence(a):
    if a.shift is None:
        shift = words.find_subsequence_shift(a.y, a.x)
        return {"y": str(a.y), "x": str(a.x), "shift": shift, "subsequence": shift is not None}
    return {"y": str(a.y), "x": str(a.x), "shift": a.shift,
            "subsequence": words.is_subsequence(a.y, a.x, a.shift)}


def cmd_word_shift(a):
    try:
        return str(words.shift_word(a.w, a.t))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- count ------------------------------------------------------------------

def cmd_count(a):
    if a.entropy:
        if a.n is None:
            raise UsageError("--entropy needs --n")
        rows = []
        for eps in enumeration.eps_grid():
            m = (eps * a.n).numerator // (eps * a.n).denominator
            low = enumeration.count_low_weight(a.n, m)
            bound = enumeration.entropy_bound(a.n, eps)
            rows.append([a.n, f"{float(eps):.2f}", m, str(low), f"{bound:.6e}", low <= bound])
        header = ["N", "eps", "m", "count_low_weight", "entropy_bound", "holds"]
        if a.format == "csv":
            return _csv(header, [r[:-1] + [str(r[-1]).lower()] for r in rows])
        return "".join(json.dumps(dict(zip(header, r)), sort_keys=True) + "\n" for r in rows)
    if a.n_list is not None:
        try:
            table = enumeration.box_dim_estimate(a.k, a.n_list, a.node_budget, a.threads)
        except BudgetExceeded as exc:
            if exc.partial is not None:
                _emit(exc.partial.to_csv() if a.format == "csv" else exc.partial.to_jsonl())
            raise
        return table.to_csv() if a.format == "csv" else table.to_jsonl()
    if a.n is None:
        raise UsageError("count needs --n, --n-list or --entropy")
    c = enumeration.count_k_ap_free(a.n, a.k, a.node_budget, a.threads)
    row = enumeration.CountRow(a.n, c)
    out = {"N": a.n, "k": a.k, "count": str(c), "log2_count_over_N": f"{row.log2_count_over_N:.12f}"}
    if a.max_ones:
        m, w = enumeration.max_ones_k_ap_free(a.n, a.k, a.node_budget, a.threads)
        out["max_ones"] = m
        out["max_ones_witness"] = str(w)
        out["count_low_weight_at_max"] = str(enumeration.count_low_weight(a.n, m))
    return out


# -- sum / product ------------------------------------------------------------

def _pair(a):
    x = a.x if a.x is not None else a.x_pos
    y = a.y if a.y is not None else a.y_pos
    if x is None or y is None:
        raise UsageError("need two words (positionally or via --x/--y)")
    if x.length != y.length:
        raise UsageError(f"length mismatch: {x.length} vs {y.length}")
    return x, y


def cmd_sum_add(a):
    x, y = _pair(a)
    return str(dyadic.add_mod1(x, y))


def cmd_sum_decompose(a):
    x, y = _pair(a)
    d = dyadic.sr_decompose(x, y)
    classes = dyadic.classify_sum_ones(d)
    return {
        "x": str(d.x), "y": str(d.y), "s": str(d.s), "r": str(d.r), "sum": str(d.sum),
        "invariant_failures": d.invariant_failures(),
        "carry_local": dyadic.check_carry_locality(d),
        "sum_one_types": {str(i): t for i, t in classes.items()},
    }


def cmd_sum_empirical_w(a):
    cert = dyadic.empirical_W(a.i, a.j, a.n, a.pair_budget, a.threads)
    out = cert.to_dict()
    if a.with_vdw:
        out["vdw_bound"] = vdw.vdw_certificate((a.i, a.j, a.i), a.cap, a.node_budget, a.threads)["n"]
    return out


def cmd_product_multiply(a):
    x, y = _pair(a)
    return str(dyadic.multiply(x, y))


def cmd_product_search(a):
    return dyadic.product_ap_search(a.k, a.n, a.pair_budget, a.threads).to_dict()


# -- grid -------------------------------------------------------------------

def _grid(spec, n, a):
    """``F:k``, ``mask:PATTERN``, ``cells:i,j,...``, ``full`` or a grid JSON path."""
    kind, _, arg = spec.partition(":")
    if kind == "F":
        if n is None:
            raise UsageError("F:k grids need --n")
        return grids.grid_of_F(int(arg), n, a.depth_budget)
    if kind == "mask":
        return grids.grid_of_mask(arg)
    if kind == "cells":
        if n is None:
            raise UsageError("cells: grids need --n")
        return grids.DyadicGrid.from_cells(n, _int_list(arg))
    if kind == "full":
        if n is None:
            raise UsageError("full grids need --n")
        return grids.DyadicGrid.full(n)
    if os.path.exists(spec):
        with open(spec) as fh:
            return grids.DyadicGrid.from_json(fh.read())
    raise UsageError(f"unknown grid spec {spec!r}")


def _grid_out(g, a):
    if a.format == "csv":
        return _csv(["start", "stop"], g.ranges())
    return g.to_json()


def cmd_grid_of_f(a):
    return _grid_out(grids.grid_of_F(a.k, a.n, a.depth_budget), a)


def cmd_grid_of_mask(a):
    return _grid_out(grids.grid_of_mask(a.pattern), a)


def cmd_grid_sumset(a):
    return _grid_out(grids.sumset_mod1(_grid(a.a, a.n, a), _grid(a.b, a.n, a)), a)


def cmd_grid_iterate(a):
    rows = []
    for t, g in grids.iterate_grids(_grid(a.a, a.n, a), a.terms):
        rows.append([t, repr(float(g.coverage)), grids.longest_full_run(g)[0]])
    if a.format == "csv":
        return _csv(["t", "coverage", "longest_run"], rows)
    return [{"t": t, "coverage": c, "longest_run": r} for t, c, r in rows]


def cmd_grid_scaled_sum(a):
    A, B = _grid(a.a, a.n, a), _grid(a.b, a.n, a)
    if a.x is not None:
        return _grid_out(grids.scaled_sum(A, a.x, B), a)
    if a.scan is None:
        raise UsageError("scaled-sum needs --x or --scan LEN")
    xs = list(enumeration.enumerate_k_ap_free(a.scan, a.scan_k))
    rows = [[str(x), repr(float(c)), r] for x, c, r in grids.scaled_sum_scan(A, B, xs)]
    if a.format == "csv":
        return _csv(["e", "coverage", "longest_run"], rows)
    return [{"e": e, "coverage": c, "longest_run": r} for e, c, r in rows]


def cmd_grid_product(a):
    A, B = _grid(a.a, a.n, a), _grid(a.b, a.n, a)
    return _grid_out(grids.product_grid(A, B), a)


def cmd_grid_runs(a):
    g = _grid(a.a, a.n, a)
    length, start = grids.longest_full_run(g)
    return {"depth": g.depth, "count": g.count, "length_cells": length, "start": start}


def cmd_grid_e_plus_ee(a):
    return grids.e_plus_ee_probe(a.k, a.n)


# -- vdw --------------------------------------------------------------------

def cmd_vdw_number(a):
    return vdw.vdw_certificate(a.lengths, a.cap, a.node_budget, a.threads)


def cmd_vdw_coloring(a):
    col = vdw.find_valid_coloring(a.lengths, a.n, a.node_budget, a.threads)
    return {"lengths": a.lengths, "n": a.n, "coloring": None if col is None else str(col)}


def cmd_vdw_union_check(a):
    sets = [set(_int_list(part)) for part in a.sets.split(";")]
    try:
        holds, wit = vdw.union_ap_bound_check(sets, a.lengths, a.L)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return {"holds": holds, "L": a.L,
            "witness": None if wit is None else {"start": wit.start, "gap": wit.gap, "terms": wit.terms}}


# -- density ----------------------------------------------------------------

def _intseq(a):
    if a.builtin:
        kind, _, arg = a.builtin.partition(":")
        parts = arg.split(":") if arg else []
        try:
            if kind == "burst":
                return dens.burst_sequence(int(parts[0]))
            if kind == "periodic":
                return dens.periodic(parts[0], int(parts[1]))
        except (IndexError, ValueError):
            pass
        raise UsageError(f"unknown builtin {a.builtin!r} (burst:H or periodic:PATTERN:H)")
    if a.file is None:
        raise UsageError("need --file (use - for stdin) or --builtin")
    text = sys.stdin.read() if a.file == "-" else open(a.file).read()
    try:
        return dens.parse_intseq(text, a.horizon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_density_report(a):
    A = _intseq(a)
    ts = a.tail_start if a.tail_start is not None else dens.default_tail_start(A.horizon)
    return dens.density_report(A, ts).to_dict()


def cmd_density_reduce_banach(a):
    try:
        res = dens.banach_to_upper_transform(_intseq(a), a.rho, a.M, a.tail_start)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return res.to_dict()


def cmd_density_reduce_upper(a):
    try:
        res = dens.upper_to_lower_transform(_intseq(a), a.rho, a.tail_start)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return res.to_dict()


# -- parser -----------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (env APFREE_THREADS; output never depends on it)")
    common.add_argument("--node-budget", type=int, default=None,
                        help="search node cap (env APFREE_NODE_BUDGET, default 1e9)")
    common.add_argument("--depth-budget", type=int, default=None,
                        help="largest grid depth (env APFREE_DEPTH_BUDGET, default 24)")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    p = _Parser(prog="apfree", description="Experiments on binary words avoiding long arithmetic progressions.")
    sub = p.add_subparsers(dest="group", required=True)

    def leaf(parent, name, fn, help_):
        q = parent.add_parser(name, parents=[common], help=help_, description=help_)
        q.set_defaults(fn=fn)
        return q

    def group(name, help_):
        g = sub.add_parser(name, help=help_, description=help_)
        return g.add_subparsers(dest="action", required=True)

    def pair_args(q):
        q.add_argument("x_pos", nargs="?", type=_word, metavar="X")
        q.add_argument("y_pos", nargs="?", type=_word, metavar="Y")
        q.add_argument("--x", type=_word)
        q.add_argument("--y", type=_word)

    w = group("word", "single-word operations")
    q = leaf(w, "longest-ap", cmd_word_longest_ap, "longest AP of one-positions")
    q.add_argument("--w", type=_word, required=True)
    q.add_argument("--k", type=int)
    q = leaf(w, "subsequence", cmd_word_subsequence, "binary subsequence test")
    q.add_argument("--y", type=_word, required=True)
    q.add_argument("--x", type=_word, required=True)
    q.add_argument("--shift", type=int, help="omit to search the smallest shift")
    q = leaf(w, "shift", cmd_word_shift, "drop leading digits (x2^t mod 1)")
    q.add_argument("--w", type=_word, required=True)
    q.add_argument("--t", type=int, required=True)

    q = sub.add_parser("count", parents=[common], help="count k-AP-free words, extremal weights, entropy tables",
                       description="count k-AP-free words, extremal weights, entropy tables")
    q.set_defaults(fn=cmd_count)
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--n", type=int)
    q.add_argument("--n-list", type=_int_list)
    q.add_argument("--max-ones", action="store_true")
    q.add_argument("--entropy", action="store_true", help="low-weight count vs entropy bound over eps=0.05..0.5")

    s = group("sum", "addition mod 1 and the s/r carry decomposition")
    q = leaf(s, "add", cmd_sum_add, "x + y mod 1")
    pair_args(q)
    q = leaf(s, "decompose", cmd_sum_decompose, "s/r decomposition with invariant checks")
    pair_args(q)
    q = leaf(s, "empirical-w", cmd_sum_empirical_w, "empirical W(i,j) certificate at depth n")
    q.add_argument("--i", type=int, required=True)
    q.add_argument("--j", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--pair-budget", type=int, default=None)
    q.add_argument("--with-vdw", action="store_true", help="also report vdw_number((i,j,i))")
    q.add_argument("--cap", type=int, default=vdw.DEFAULT_CAP)

    pr = group("product", "exact products and the product AP search")
    q = leaf(pr, "multiply", cmd_product_multiply, "exact product, 2N digits")
    pair_args(q)
    q = leaf(pr, "search", cmd_product_search, "longest AP in products of k-AP-free words")
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--pair-budget", type=int, default=None)

    g = group("grid", "dyadic cell sets")
    q = leaf(g, "of-f", cmd_grid_of_f, "depth-n cells meeting F_k")
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--n", type=int, required=True)
    q = leaf(g, "of-mask", cmd_grid_of_mask, "prefix cells of a digit-freedom mask")
    q.add_argument("--pattern", required=True)
    grid_help = "grid spec: F:k, mask:PATTERN, cells:i,j,..., full, or a grid JSON file"
    q = leaf(g, "sumset", cmd_grid_sumset, "A + B mod 1 (outer)")
    q.add_argument("--a", required=True, help=grid_help)
    q.add_argument("--b", required=True, help=grid_help)
    q.add_argument("--n", type=int)
    q = leaf(g, "iterate", cmd_grid_iterate, "coverage of tA for t = 1..terms")
    q.add_argument("--a", required=True, help=grid_help)
    q.add_argument("--n", type=int)
    q.add_argument("--terms", type=int, required=True)
    q = leaf(g, "scaled-sum", cmd_grid_scaled_sum, "A + xB over [0, 2) (outer)")
    q.add_argument("--a", required=True, help=grid_help)
    q.add_argument("--b", required=True, help=grid_help)
    q.add_argument("--n", type=int)
    q.add_argument("--x", type=_word)
    q.add_argument("--scan", type=int, metavar="LEN", help="scan x over all k-AP-free words of this length")
    q.add_argument("--scan-k", type=int, default=3)
    q = leaf(g, "product-grid", cmd_grid_product, "{ab} at depth 2n (outer)")
    q.add_argument("--a", required=True, help=grid_help)
    q.add_argument("--b", required=True, help=grid_help)
    q.add_argument("--n", type=int)
    q = leaf(g, "runs", cmd_grid_runs, "longest run of member cells")
    q.add_argument("--a", required=True, help=grid_help)
    q.add_argument("--n", type=int)
    q = leaf(g, "e-plus-ee", cmd_grid_e_plus_ee, "coverage probe of F_k + F_k F_k mod 1")
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--n", type=int, required=True)

    v = group("vdw", "mixed van der Waerden numbers")
    q = leaf(v, "number", cmd_vdw_number, "vdw number with certificate at n-1")
    q.add_argument("--lengths", type=_int_list, required=True)
    q.add_argument("--cap", type=int, default=vdw.DEFAULT_CAP)
    q = leaf(v, "coloring", cmd_vdw_coloring, "least valid coloring of [1, n]")
    q.add_argument("--lengths", type=_int_list, required=True)
    q.add_argument("--n", type=int, required=True)
    q = leaf(v, "union-check", cmd_vdw_union_check, "scan a union of AP-free sets for an L-term AP")
    q.add_argument("--sets", required=True, help="sets separated by ';', elements by ','")
    q.add_argument("--lengths", type=_int_list, required=True)
    q.add_argument("--L", type=int, required=True)

    d = group("density", "density estimates and reductions")

    def seq_args(q):
        q.add_argument("--file", help="integers or b-file rows; - for stdin")
        q.add_argument("--builtin", help="burst:H or periodic:PATTERN:H")
        q.add_argument("--horizon", type=int)
        q.add_argument("--tail-start", type=int)

    q = leaf(d, "report", cmd_density_report, "upper/lower/Banach estimates")
    seq_args(q)
    q = leaf(d, "reduce-banach", cmd_density_reduce_banach, "Banach -> upper density transform")
    seq_args(q)
    q.add_argument("--rho", type=_fraction, required=True)
    q.add_argument("--M", type=_fraction, required=True)
    q = leaf(d, "reduce-upper", cmd_density_reduce_upper, "upper -> lower density transform")
    seq_args(q)
    q.add_argument("--rho", type=_fraction, required=True)
    return p


def _error(kind, message, **extra):
    sys.stderr.write(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True, default=str) + "\n")


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.node_budget is None:
            args.node_budget = _env_int("APFREE_NODE_BUDGET", enumeration.DEFAULT_NODE_BUDGET)
        if args.depth_budget is None:
            args.depth_budget = _env_int("APFREE_DEPTH_BUDGET", grids.DEFAULT_DEPTH_BUDGET)
        if args.threads is None:
            args.threads = _env_int("APFREE_THREADS", 1)
        if hasattr(args, "pair_budget") and args.pair_budget is None:
            args.pair_budget = args.node_budget
        result = args.fn(args)
    except UsageError as exc:
        _error("bad_arguments", str(exc))
        return 1
    except BudgetExceeded as exc:
        partial = exc.partial if isinstance(exc.partial, (dict, type(None))) else None
        _error("budget_exceeded", str(exc), nodes=exc.nodes, partial=partial)
        return 2
    except ValueError as exc:
        _error("bad_arguments", str(exc))
        return 1
    _emit(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
