"""Command-line front end.

    miniscp specialize --pattern aab [--program FILE] [--out FILE]
                       [--dot FILE] [--report]
    miniscp run --program FILE --entry NAME --input WORD [--steps]
    miniscp failure --pattern ababa
    miniscp verify [--pattern aab | --corpus default] [--seed N]
    miniscp tree --pattern aab --dot FILE

Exit codes: 0 success, 1 semantic failure (failed check, evaluation error),
2 usage error.  SCP_FUEL overrides the evaluator's default fuel.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

from .configs import ConfigError, config_text, renaming_text
from .driving import DriveError
from .harness import (
    Corpus, default_corpus, record_line, summary_lines, verify_corpus,
)
from .interpreter import (
    DEFAULT_FUEL, EvalError, Outcome, eval_call, naive_matcher,
)
from .residual import ResidualError, residual_lines
from .kmp import table_rows
from .residual import render_residual, residualize
from .scp import ProcessGraph, ScpError, graph_lines, specialize_pattern
from .syntax import (
    Call, ParseError, Program, ValidationError, parse_program, render_expr,
    word,
)


class UsageError(Exception):
    pass


def export_dot(graph: ProcessGraph) -> str:
    """Graphviz rendering: solid narrowing-labeled tree edges, dashed
    renaming-labeled fold edges, root with doubled border."""
    def esc(s: str) -> str:
        return s.replace("\\", "\\\\").replace('"', '\\"')

    lines = ["digraph process {", "  node [shape=box, fontname=monospace];"]
    for i, n in enumerate(graph.nodes):
        label = esc(f"{i}: {n.kind}") + "\\n" + esc(config_text(n.config))
        extra = ", peripheries=2" if i == graph.root else ""
        lines.append(f'  n{i} [label="{label}"{extra}];')
    for i, n in enumerate(graph.nodes):
        for c in n.children:
            b = graph.nodes[c].branch
            lab = esc(f"rule {b.narrowing.rule_index}: {b.narrowing!r}")
            lines.append(f'  n{i} -> n{c} [label="{lab}"];')
    for i, n in enumerate(graph.nodes):
        if n.fold is not None:
            t, sigma = n.fold
            lab = esc(renaming_text(sigma))
            lines.append(
                f'  n{i} -> n{t} [style=dashed, label="{lab}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fuel(args) -> int:
    if getattr(args, "fuel", None) is not None:
        return args.fuel
    env = os.environ.get("SCP_FUEL")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SCP_FUEL={env!r} is not an integer")
    return DEFAULT_FUEL


def _load_program(path: Optional[str]) -> Program:
    if path is None or path == "builtin":
        return naive_matcher()
    with open(path, "r", encoding="utf-8") as fh:
        return parse_program(fh.read())


def _word_arg(text: str) -> str:
    if not text:
        raise argparse.ArgumentTypeError("pattern words must be nonempty")
    return text


def _cmd_specialize(args, out, err) -> int:
    program = _load_program(args.program)
    graph, report = specialize_pattern(args.pattern, program,
                                       node_budget=args.node_budget)
    rp = residualize(graph)
    text = render_residual(rp)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(graph))
    if args.report:
        out.write(f"pattern: {args.pattern}\n")
        out.write(f"pivots: {len(report.pivots)}\n")
        for k, cfg in enumerate(report.pivots):
            out.write(f"  pivot {k}: {config_text(cfg)}\n")
        out.write(f"nodes: {report.node_count}\n")
        out.write(f"folds: {report.fold_count}\n")
        out.write(
            f"generalizations_attempted: {report.generalizations_attempted}\n")
        for line in residual_lines(rp):
            out.write(line + "\n")
    return 0


def _cmd_run(args, out, err) -> int:
    program = _load_program(args.program)
    call = Call(args.entry, tuple(word(w) for w in args.input))
    outcome: Outcome = eval_call(program, call, fuel=_fuel(args))
    out.write(f"{render_expr(outcome.value)}\n")
    if args.steps:
        out.write(f"steps={outcome.steps}\n")
    return 0


def _cmd_failure(args, out, err) -> int:
    rows = table_rows(args.pattern)
    width = max(len(p) for _, p, _, _ in rows) + 2
    out.write(f"pattern: {args.pattern}\n")
    for k, prefix, f, jtext in rows:
        shown = f"'{prefix}'" if prefix else "ε"
        out.write(f"  len {k:>2}  {shown:<{width}} f={f}  {jtext}\n")
    out.write("values: " + ",".join(str(f) for _, _, f, _ in rows) + "\n")
    return 0


def _cmd_verify(args, out, err) -> int:
    seed = args.seed if args.seed is not None else 7
    if args.pattern:
        corpus = Corpus((args.pattern,), seed=seed)
    else:
        corpus = default_corpus(seed=seed)
    reports = verify_corpus(corpus)
    for r in reports:
        out.write(record_line(r) + "\n")
    for line in summary_lines(reports):
        out.write(line + "\n")
    return 0 if all(r.ok for r in reports) else 1


def _cmd_tree(args, out, err) -> int:
    graph, _ = specialize_pattern(args.pattern, node_budget=args.node_budget)
    dot = export_dot(graph)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot)
    else:
        out.write(dot)
    if args.lines:
        for line in graph_lines(graph):
            out.write(line + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miniscp",
        description="Specialize the naive substring matcher to a pattern, "
                    "run programs, and verify the generated code.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("specialize",
                        help="build the process graph and residual program")
    sp.add_argument("--pattern", required=True, type=_word_arg)
    sp.add_argument("--program", default=None,
                    help="program file ('builtin' or omitted: the naive "
                         "matcher)")
    sp.add_argument("--out", default=None, help="write the residual here")
    sp.add_argument("--dot", default=None, help="write the process graph DOT")
    sp.add_argument("--report", action="store_true")
    sp.add_argument("--node-budget", type=int, default=10_000)
    sp.set_defaults(fn=_cmd_specialize)

    rn = sub.add_parser("run", help="evaluate a call on ground words")
    rn.add_argument("--program", required=True)
    rn.add_argument("--entry", required=True)
    rn.add_argument("--input", action="append", required=True,
                    help="one word per argument (repeatable)")
    rn.add_argument("--steps", action="store_true")
    rn.add_argument("--fuel", type=int, default=None)
    rn.set_defaults(fn=_cmd_run)

    fl = sub.add_parser("failure", help="print the failure table")
    fl.add_argument("--pattern", required=True, type=_word_arg)
    fl.set_defaults(fn=_cmd_failure)

    vf = sub.add_parser("verify", help="run the verification harness")
    group = vf.add_mutually_exclusive_group()
    group.add_argument("--pattern", default=None, type=_word_arg)
    group.add_argument("--corpus", choices=["default"], default=None)
    vf.add_argument("--seed", type=int, default=None)
    vf.set_defaults(fn=_cmd_verify)

    tr = sub.add_parser("tree", help="export the process graph only")
    tr.add_argument("--pattern", required=True, type=_word_arg)
    tr.add_argument("--dot", default=None)
    tr.add_argument("--lines", action="store_true",
                    help="also print the line-oriented dump")
    tr.add_argument("--node-budget", type=int, default=10_000)
    tr.set_defaults(fn=_cmd_tree)
    return parser


def main(argv: Optional[list[str]] = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args, out, err)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return 2
    except (ParseError, ValidationError, EvalError, ScpError, DriveError,
            ConfigError, ResidualError, ValueError, FileNotFoundError) as e:
        err.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
