"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 domain error (non-canonical key,
missing node, slot conflict, ...), 4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Callable, Sequence, TextIO

from .bench import WorkloadSpec, run_workload, PLACEMENTS
from .core import (
    ROOT_KEY,
    NodeKey,
    child_key,
    decode_key,
    encode_path,
    format_path,
    next_sibling_key,
    parse_key,
    parse_path,
)
from .errors import MalformedInputError, RatnestError
from .oracle import trop_eval
from .store import TreeStore, emit_sql_predicate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

TABLE_PATHS = ["2", "2.1", "2.2", "2.3", "2.4", "2.4.1", "2.4.2", "2.4.3"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401
        raise _UsageError(f"{self.prog}: {message}")


def _key_arg(text: str) -> NodeKey:
    if text == "root":
        return ROOT_KEY
    return parse_key(text)


def _int_arg(text: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise MalformedInputError(f"not a decimal integer: {text!r}") from None


def _record_line(rec, fmt: str) -> str:
    if fmt == "tsv":
        return rec.to_line().rstrip("\n")
    path, _ = decode_key(rec.key.nv, rec.key.dv)
    indent = "  " * (len(path) - 1)
    return f"{indent}{format_path(path)}  {rec.key}  {rec.payload}".rstrip()


def cmd_encode(args, out: TextIO) -> None:
    out.write(f"{encode_path(parse_path(args.path))}\n")


def cmd_decode(args, out: TextIO) -> None:
    path, chain = decode_key(_int_arg(args.nv), _int_arg(args.dv))
    out.write(f"{format_path(path)}\n")
    for k in chain:
        out.write(f"{k.nv}/{k.dv}\n")


def cmd_child(args, out: TextIO) -> None:
    out.write(f"{child_key(_key_arg(args.key), _int_arg(args.c))}\n")


def cmd_sibling(args, out: TextIO) -> None:
    out.write(f"{next_sibling_key(_key_arg(args.key))}\n")


def _trop_row(level: int, paths: list[list[int]]) -> str:
    vals = [trop_eval(p) for p in paths]
    if all(a < b for a, b in zip(vals, vals[1:])):
        sym, verdict = " < ", "increasing"
    elif all(a > b for a, b in zip(vals, vals[1:])):
        sym, verdict = " > ", "decreasing"
    else:
        sym, verdict = " ? ", "unordered"
    shown = sym.join(f"{v.numerator}/{v.denominator}" for v in vals)
    return f"level {level}: {shown}  {verdict}\n"


def cmd_demo(args, out: TextIO) -> None:
    if args.name == "figures":
        for text in TABLE_PATHS:
            k = encode_path(parse_path(text))
            out.write(f"{text}  {k.nv} {k.dv} {k.snv} {k.sdv}\n")
        return
    # tropashko
    out.write(_trop_row(3, [[2, 4, 3], [2, 4, 4], [2, 4, 5]]))
    out.write(_trop_row(4, [[2, 4, 3, 3], [2, 4, 3, 4], [2, 4, 3, 5]]))
    a, b = trop_eval([2, 4, 3, 1]), trop_eval([2, 4, 4])
    rel = "==" if a == b else "!="
    out.write(f"collision: 2.4.3.1 -> {a}  {rel}  2.4.4 -> {b}\n")
    v = trop_eval([2, 4, 3])
    flag = "ok" if v == Fraction(29, 18) else "misprint"
    out.write(f"flag: 2+1/(4+1/3) = {v}, not 29/18 ({flag})\n")


def cmd_insert(args, out: TextIO) -> None:
    store = TreeStore.load(args.store) if _exists(args.store) else TreeStore()
    rec = store.insert_child(_key_arg(args.parent), args.payload)
    TreeStore.append(args.store, rec)
    out.write(f"{rec.key}\n")


def cmd_move(args, out: TextIO) -> None:
    store = TreeStore.load(args.store)
    count = store.move_subtree(
        _key_arg(args.p0), _int_arg(args.n), _key_arg(args.p1), _int_arg(args.m), shift=args.shift
    )
    store.save(args.store)
    out.write(f"{count}\n")


def cmd_list(args, out: TextIO) -> None:
    store = TreeStore.load(args.store) if _exists(args.store) else TreeStore()
    for rec in store:
        out.write(_record_line(rec, args.format) + "\n")


def cmd_subtree(args, out: TextIO) -> None:
    store = TreeStore.load(args.store)
    for rec in store.subtree(_key_arg(args.key)):
        out.write(_record_line(rec, args.format) + "\n")


def cmd_sqlpred(args, out: TextIO) -> None:
    pred = emit_sql_predicate(
        args.kind, _key_arg(args.key), args.nv_col, args.dv_col, args.snv_col, args.sdv_col
    )
    out.write(pred + "\n")


def cmd_bench(args, out: TextIO) -> None:
    spec = WorkloadSpec(args.nodes, args.inserts, args.moves, args.seed, args.placement)
    report = run_workload(spec)
    text = report.to_tsv() if args.format == "tsv" else report.to_text()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def _exists(path: str) -> bool:
    return os.path.exists(path)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ratnest", description="Rational nested-set keys for tree hierarchies.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("encode", cmd_encode, "print the key of a dotted path such as 2.4.3")
    sp.add_argument("path")

    sp = add("decode", cmd_decode, "print the path and ancestor chain of nv/dv")
    sp.add_argument("nv")
    sp.add_argument("dv")

    sp = add("child", cmd_child, "print the key of child C of KEY")
    sp.add_argument("key", help="nv/dv:snv/sdv or 'root'")
    sp.add_argument("c")

    sp = add("sibling", cmd_sibling, "print the key of the next sibling of KEY")
    sp.add_argument("key")

    sp = add("demo", cmd_demo, "print reproduction tables")
    sp.add_argument("name", choices=["figures", "tropashko"])

    sp = add("insert", cmd_insert, "append a child under PARENT in the store")
    sp.add_argument("--store", required=True)
    sp.add_argument("parent", help="parent key or 'root'")
    sp.add_argument("payload", nargs="?", default="")

    sp = add("move", cmd_move, "move child N of P0 to slot M of P1")
    sp.add_argument("--store", required=True)
    sp.add_argument("--shift", action="store_true", help="shift existing children at >= M right")
    for name in ("p0", "n", "p1", "m"):
        sp.add_argument(name)

    for name, fn, help in (
        ("list", cmd_list, "list every record in key order"),
        ("subtree", cmd_subtree, "list the descendants of KEY"),
    ):
        sp = add(name, fn, help)
        sp.add_argument("--store", required=True)
        sp.add_argument("--format", choices=["text", "tsv"], default="text")
        if name == "subtree":
            sp.add_argument("key")

    sp = add("sqlpred", cmd_sqlpred, "emit an integer-only SQL filter")
    sp.add_argument("kind", choices=["ancestors", "descendants"])
    sp.add_argument("key")
    sp.add_argument("--nv-col", default="nv")
    sp.add_argument("--dv-col", default="dv")
    sp.add_argument("--snv-col", default="snv")
    sp.add_argument("--sdv-col", default="sdv")

    sp = add("bench", cmd_bench, "compare rows touched under LV/RV and rational keys")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--nodes", type=int, default=100)
    sp.add_argument("--inserts", type=int, default=1000)
    sp.add_argument("--moves", type=int, default=0)
    sp.add_argument("--placement", choices=PLACEMENTS, default="uniform")
    sp.add_argument("--format", choices=["text", "tsv"], default="tsv")
    sp.add_argument("--output")
    return p


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except _UsageError as e:
        err.write(f"{e}\n")
        return EXIT_USAGE
    except MalformedInputError as e:
        err.write(f"ratnest: usage error: {e}\n")
        return EXIT_USAGE
    except RatnestError as e:
        err.write(f"ratnest: {type(e).__name__}: {e}\n")
        return EXIT_DOMAIN
    except OSError as e:
        err.write(f"ratnest: I/O error: {e}\n")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
