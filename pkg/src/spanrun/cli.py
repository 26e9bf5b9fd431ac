"""Command-line interface: ``spanrun compile|check|run|oracle|bench``.

Exit codes: 0 success, 1 input/usage error, 2 automaton not sequential.
"""

import argparse
import json
import sys

from . import regex as rx
from .automata import ExtendedVsetAutomaton, check_sequential, describe_step, trim
from .bench import run_bench
from .core import BudgetExceededError, SpanrunError, mapping_to_json, mapping_to_tsv
from .oracle import brute_force_mappings
from .pipeline import NotSequentialError, prepare
from .samples import EMAIL_PATTERN
from .vafile import dump_automaton, parse_automaton

EXIT_OK, EXIT_ERROR, EXIT_NOT_SEQUENTIAL = 0, 1, 2


class UsageError(SpanrunError):
    pass


def _add_source(p, required=True):
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--pattern", help="regex formula with captures, e.g. 'x{a+}'")
    src.add_argument("--va", metavar="FILE", help="automaton in the va/eva text format")


def _load(args):
    if args.pattern is not None:
        return rx.compile_pattern(args.pattern)
    try:
        with open(args.va, encoding="ascii") as fh:
            return parse_automaton(fh.read())
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {args.va}: {exc}") from None


def _read_document(path):
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _writer(fmt, names, out):
    if fmt == "tsv":
        return lambda m: out.write(mapping_to_tsv(m, names) + "\n")
    return lambda m: out.write(mapping_to_json(m, names) + "\n")


def cmd_compile(args, out, err):
    a = trim(_load(args))
    text = dump_automaton(a)
    if args.output:
        with open(args.output, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        out.write(text)
    other = len(a.ev_transitions) if isinstance(a, ExtendedVsetAutomaton) else len(a.marker_transitions)
    err.write(f"states={a.state_count} letter_transitions={len(a.letter_transitions)} "
              f"marker_transitions={other}\n")
    return EXIT_OK


def cmd_check(args, out, err):
    a = _load(args)
    t = trim(a)
    result = check_sequential(a)
    out.write(f"states={a.state_count} trimmed_states={t.state_count}\n")
    if result:
        out.write("sequential\n")
        return EXIT_OK
    out.write(f"not sequential (variable {a.variables[result.variable]})\n")
    for step in result.witness:
        out.write("  " + describe_step(step, a.variables) + "\n")
    return EXIT_NOT_SEQUENTIAL


def cmd_run(args, out, err):
    a = _load(args)
    doc = _read_document(args.input)
    prep = prepare(a, doc, mode=args.mode, sequentialize=args.sequentialize)
    write = _writer(args.format, prep.automaton.variables, out)
    stream = prep.enumerate()
    for count, m in enumerate(stream, 1):
        write(m)
        if args.limit is not None and count >= args.limit:
            break
    if args.stats:
        stats = stream.stats()
        stats["preprocessing_steps"] = prep.preprocessing_steps
        stats["mode"] = prep.mode
        out.write(json.dumps({"stats": stats}, separators=(",", ":")) + "\n")
    return EXIT_OK


def cmd_oracle(args, out, err):
    a = _load(args)
    doc = _read_document(args.input)
    write = _writer(args.format, a.variables, out)
    for m in sorted(brute_force_mappings(a, doc)):
        write(m)
    return EXIT_OK


def cmd_bench(args, out, err):
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    if not sizes:
        raise UsageError("--sizes is empty")
    try:
        records = run_bench(args.pattern, sizes, args.generator, args.seed, args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.write(json.dumps({"records": [r._asdict() for r in records]}, indent=2) + "\n")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="spanrun", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a pattern (or re-emit an automaton) as a trimmed va file")
    _add_source(p)
    p.add_argument("-o", "--output", help="write here instead of standard output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("check", help="test sequentiality")
    _add_source(p, required=False)
    p.add_argument("file", nargs="?", help="automaton file (same as --va)")
    p.set_defaults(func=cmd_check)

    for name, func, help_text in (("run", cmd_run, "enumerate all mappings"),
                                  ("oracle", cmd_oracle, "brute-force reference evaluation")):
        p = sub.add_parser(name, help=help_text)
        _add_source(p)
        p.add_argument("input", nargs="?", default="-", help="document file, '-' for standard input")
        p.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")
        p.set_defaults(func=func)
        if name == "run":
            p.add_argument("--limit", type=int, help="stop after this many mappings")
            p.add_argument("--stats", action="store_true", help="append a JSON stats record")
            p.add_argument("--mode", choices=("auto", "extended", "general"), default="auto")
            p.add_argument("--sequentialize", action="store_true",
                           help="convert a non-sequential VA instead of failing")

    p = sub.add_parser("bench", help="measure preprocessing and delay across document sizes")
    p.add_argument("--pattern", default=EMAIL_PATTERN)
    p.add_argument("--sizes", default="10000,100000,1000000")
    p.add_argument("--generator", default="email")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("auto", "extended", "general"), default="auto")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    if args.command == "check" and args.pattern is None and args.va is None:
        if args.file is None:
            err.write("spanrun check: give an automaton file, --va or --pattern\n")
            return EXIT_ERROR
        args.va = args.file
    try:
        return args.func(args, out, err)
    except NotSequentialError as exc:
        err.write("spanrun: automaton is not sequential; rerun with --sequentialize "
                  f"(witness run has {len(exc.result.witness or ())} steps)\n")
        return EXIT_NOT_SEQUENTIAL
    except BudgetExceededError as exc:
        err.write(f"spanrun: {exc}\n")
        return EXIT_ERROR
    except (SpanrunError, ValueError) as exc:
        err.write(f"spanrun: {exc}\n")
        return EXIT_ERROR
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
