"""Operational semantics: top-down, first-match rewriting with step counting.

A step is one rule application, including rewrites a specializer would call
transient, so naive and specialized programs are costed on the same scale.
Right-hand sides must be passive or a single top-level call with passive
arguments (tail form); anything else is rejected here with a clear error.

Two engines are provided: a reference stepper over the syntax tree
(`eval_reference`, `trace_call`) and a compiled engine (`eval_call`) that
translates a program to a Python loop once and caches it.  Ground words run
as plain Python strings in the compiled engine; both engines agree on value
and step count.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

from .syntax import (
    Call, Cons, Expr, FALSE, FalseVal, ListVar, Nil, Program, Rule, Sym,
    SymVar, TRUE, TrueVal, is_ground, is_passive, parse_program, render_expr,
    unword, word,
)

DEFAULT_FUEL = 1_000_000


class EvalError(Exception):
    pass


class StuckTermError(EvalError):
    """No rule of the called function matches the (ground) arguments."""


class FuelExhaustedError(EvalError):
    def __init__(self, steps: int):
        super().__init__(f"fuel exhausted after {steps} rule applications")
        self.steps = steps


class NonTailError(EvalError):
    """A right-hand side nests a call under a constructor or another call."""


class ArityError(EvalError):
    pass


class EmptyPatternError(ValueError):
    """The naive matcher is only defined for nonempty patterns."""


# The built-in naive substring matcher.  S(p, y) scans y for the first
# occurrence of p's first letter; L compares a prefix of the remaining string
# against the pattern and falls back to S(q, z) on mismatch, where (q, z) is
# the saved restart point.
NAIVE_MATCHER_SOURCE = """\
S {  -- scan the string for the pattern's first letter
  s.a:p, s.a:y = L(s.a:p, s.a:y, s.a:p, y);
  s.a:p, s.b:y = S(s.a:p, y);
  p, Nil = F;
}
L {  -- compare pattern and string prefixes; (q, z) is the restart point
  s.a:p, s.a:y, q, z = L(p, y, q, z);
  s.a:p, s.b:y, q, z = S(q, z);
  s.a:p, Nil, q, z = S(q, z);
  Nil, y, q, z = T;
}
"""


@lru_cache(maxsize=1)
def naive_matcher() -> Program:
    return parse_program(NAIVE_MATCHER_SOURCE)


@dataclass(frozen=True, slots=True)
class Outcome:
    """Final passive value (T or F for every program in this package) and the
    number of rule applications it took."""
    value: Expr
    steps: int


def check_tail_form(program: Program) -> None:
    for name, rules in program.functions:
        for rule in rules:
            rhs = rule.rhs
            if isinstance(rhs, Call):
                if any(not is_passive(a) for a in rhs.args):
                    raise NonTailError(
                        f"function {name}: nested call in arguments of "
                        f"{render_expr(rhs)}")
            elif not is_passive(rhs):
                raise NonTailError(
                    f"function {name}: call under a constructor in "
                    f"{render_expr(rhs)}")


# --- reference engine -------------------------------------------------------

def match_lhs(rule: Rule, args: tuple[Expr, ...]) -> Optional[dict]:
    """Match ground arguments against a rule's patterns.

    Returns the variable binding, honouring repeated variables as equality
    constraints, or None when the rule does not apply.
    """
    if len(rule.lhs) != len(args):
        raise ArityError(f"expected {len(rule.lhs)} arguments, got {len(args)}")
    binding: dict = {}

    def go(pat: Expr, val: Expr) -> bool:
        if isinstance(pat, (SymVar, ListVar)):
            if pat in binding:
                return binding[pat] == val
            binding[pat] = val
            return True
        if isinstance(pat, Sym):
            return pat == val
        if isinstance(pat, Nil):
            return isinstance(val, Nil)
        if isinstance(pat, Cons):
            return (isinstance(val, Cons) and go(pat.head, val.head)
                    and go(pat.tail, val.tail))
        raise EvalError(f"bad pattern {pat!r}")

    for pat, val in zip(rule.lhs, args):
        if not go(pat, val):
            return None
    return binding


def _instantiate(expr: Expr, binding: dict) -> Expr:
    if isinstance(expr, (SymVar, ListVar)):
        return binding[expr]
    if isinstance(expr, Cons):
        head = expr.head
        if isinstance(head, SymVar):
            head = binding[head]
        return Cons(head, _instantiate(expr.tail, binding))
    if isinstance(expr, Call):
        return Call(expr.fn,
                    tuple(_instantiate(a, binding) for a in expr.args))
    return expr


def rewrite_once(program: Program, call: Call) -> Expr:
    """Apply the first matching rule of the called function."""
    for rule in program.rules(call.fn):
        binding = match_lhs(rule, call.args)
        if binding is not None:
            return _instantiate(rule.rhs, binding)
    raise StuckTermError(f"no rule of {call.fn} matches "
                         f"({', '.join(render_expr(a) for a in call.args)})")


def trace_call(program: Program, call: Call,
               fuel: int = DEFAULT_FUEL) -> Iterator[Expr]:
    """Yield the expression after each rule application until passive."""
    _require_ground_call(call)
    check_tail_form(program)
    expr: Expr = call
    steps = 0
    while isinstance(expr, Call):
        steps += 1
        if steps > fuel:
            raise FuelExhaustedError(steps)
        expr = rewrite_once(program, expr)
        yield expr


def eval_reference(program: Program, call: Call,
                   fuel: int = DEFAULT_FUEL) -> Outcome:
    """Reference evaluator walking the syntax tree step by step."""
    expr: Expr = call
    steps = 0
    for expr in trace_call(program, call, fuel):
        steps += 1
    return Outcome(expr, steps)


def _require_ground_call(call: Call) -> None:
    if not isinstance(call, Call):
        raise EvalError("entry expression must be a function call")
    for a in call.args:
        if not is_ground(a):
            raise EvalError(f"argument {render_expr(a)} is not ground")


# --- compiled engine --------------------------------------------------------
#
# Ground values are encoded as Python objects: a word as a str, a bare symbol
# as its 1-character str, T/F as booleans.  Each function body becomes one
# dispatch arm of a generated while-loop; a rule application is a tuple
# rebuild plus a `continue`, so one step costs a few bytecodes.

def _pattern_code(pat: Expr, src: str) -> tuple[list[str], dict]:
    """Conditions and variable accessors for one pattern against `src`."""
    conds: list[str] = []
    binds: dict = {}
    if isinstance(pat, (Sym, SymVar)):  # bare symbol position
        if isinstance(pat, Sym):
            conds.append(f"{src} == {pat.ch!r}")
        else:
            conds.append(f"len({src}) == 1")
            binds[pat] = src
        return conds, binds
    depth = 0
    while isinstance(pat, Cons):
        if isinstance(pat.head, Sym):
            conds.append(f"{src}[{depth}:{depth + 1}] == {pat.head.ch!r}")
        else:
            conds.append(f"len({src}) > {depth}")
            binds[pat.head] = f"{src}[{depth}]"
        pat = pat.tail
        depth += 1
    if isinstance(pat, Nil):
        conds.append(f"len({src}) == {depth}")
    elif isinstance(pat, ListVar):
        if depth > 0:
            conds.append(f"len({src}) >= {depth}")
        binds[pat] = src if depth == 0 else f"{src}[{depth}:]"
    else:
        raise EvalError(f"bad pattern {pat!r}")
    return conds, binds


def _value_code(expr: Expr, binds: dict, lhs_reuse: dict) -> str:
    """Python expression computing a passive rhs fragment as str."""
    if expr in lhs_reuse:
        return lhs_reuse[expr]
    if isinstance(expr, (Sym,)):
        return repr(expr.ch)
    if isinstance(expr, (SymVar, ListVar)):
        return binds[expr]
    if isinstance(expr, Nil):
        return "''"
    w = unword(expr)
    if w is not None:
        return repr(w)
    if isinstance(expr, Cons):
        head = _value_code(expr.head, binds, lhs_reuse)
        tail = _value_code(expr.tail, binds, lhs_reuse)
        return f"({head} + {tail})"
    raise EvalError(f"cannot compile rhs fragment {expr!r}")


def _compile_source(program: Program) -> tuple[str, dict[str, int]]:
    check_tail_form(program)
    ids = {name: i for i, (name, _) in enumerate(program.functions)}
    lines = [
        "def _run(_fn, _args, _fuel):",
        "    _steps = 0",
        "    while True:",
    ]
    emit = lines.append
    for name, rules in program.functions:
        fid = ids[name]
        arity = len(rules[0].lhs)
        kw = "if" if fid == 0 else "elif"
        emit(f"        {kw} _fn == {fid}:  # {name}/{arity}")
        emit("            _steps += 1")
        emit("            if _steps > _fuel:")
        emit("                raise FuelExhaustedError(_steps)")
        unpack = ", ".join(f"a{i}" for i in range(arity))
        emit(f"            {unpack}{',' if arity == 1 else ''} = _args")
        for rule in rules:
            conds: list[str] = []
            binds: dict = {}
            first_site: dict = {}
            for i, pat in enumerate(rule.lhs):
                pconds, pbinds = _pattern_code(pat, f"a{i}")
                conds.extend(pconds)
                for v, acc in pbinds.items():
                    if v in binds:
                        conds.append(f"{binds[v]} == {acc}")
                    else:
                        binds[v] = acc
                if pat not in first_site:
                    first_site[pat] = f"a{i}"
            cond = " and ".join(conds) if conds else "True"
            emit(f"            if {cond}:")
            rhs = rule.rhs
            if isinstance(rhs, TrueVal):
                emit("                return (True, _steps)")
            elif isinstance(rhs, FalseVal):
                emit("                return (False, _steps)")
            elif isinstance(rhs, Call):
                args = ", ".join(
                    _value_code(a, binds, first_site) for a in rhs.args)
                trail = "," if len(rhs.args) == 1 else ""
                emit(f"                _args = ({args}{trail})")
                if ids[rhs.fn] != fid:
                    emit(f"                _fn = {ids[rhs.fn]}")
                emit("                continue")
            else:
                emit(f"                return ({_value_code(rhs, binds, first_site)}, _steps)")
        emit(f"            raise StuckTermError("
             f"'no rule of {name} matches ' + repr(_args))")
    emit("        else:")
    emit("            raise StuckTermError('unknown function id %r' % (_fn,))")
    return "\n".join(lines) + "\n", ids


class CompiledProgram:
    """A program translated to a single Python dispatch loop."""

    def __init__(self, program: Program):
        src, ids = _compile_source(program)
        namespace = {
            "FuelExhaustedError": FuelExhaustedError,
            "StuckTermError": StuckTermError,
        }
        exec(compile(src, "<rewriter>", "exec"), namespace)
        self.program = program
        self.source = src
        self._ids = ids
        self._run = namespace["_run"]

    def run(self, entry: str, args: tuple[Union[str, bool], ...],
            fuel: int = DEFAULT_FUEL) -> tuple[Union[str, bool], int]:
        if entry not in self._ids:
            raise ArityError(f"undefined entry function {entry}")
        arity = self.program.arity(entry)
        if len(args) != arity:
            raise ArityError(
                f"{entry} takes {arity} arguments, got {len(args)}")
        return self._run(self._ids[entry], tuple(args), fuel)


@lru_cache(maxsize=256)
def _compiled(program: Program) -> CompiledProgram:
    return CompiledProgram(program)


def _encode_arg(expr: Expr) -> Union[str, bool]:
    if isinstance(expr, Sym):
        return expr.ch
    if isinstance(expr, TrueVal):
        return True
    if isinstance(expr, FalseVal):
        return False
    w = unword(expr)
    if w is None:
        raise EvalError(f"argument {render_expr(expr)} is not a ground word")
    return w


def _decode_value(v: Union[str, bool]) -> Expr:
    if v is True:
        return TRUE
    if v is False:
        return FALSE
    return word(v)


def eval_call(program: Program, call: Call,
              fuel: Optional[int] = None) -> Outcome:
    """Evaluate a ground call to a passive value, counting rule applications.

    Deterministic; raises StuckTermError, FuelExhaustedError, or NonTailError.
    """
    _require_ground_call(call)
    value, steps = _compiled(program).run(
        call.fn, tuple(_encode_arg(a) for a in call.args),
        DEFAULT_FUEL if fuel is None else fuel)
    return Outcome(_decode_value(value), steps)


# --- the naive matcher as a search function ---------------------------------

def naive_outcome(pattern: str, string: str,
                  fuel: Optional[int] = None) -> Outcome:
    if not pattern:
        raise EmptyPatternError("pattern must be nonempty")
    prog = naive_matcher()
    value, steps = _compiled(prog).run(
        "S", (pattern, string), DEFAULT_FUEL if fuel is None else fuel)
    return Outcome(_decode_value(value), steps)


def naive_search(pattern: str, string: str,
                 fuel: Optional[int] = None) -> bool:
    """True iff pattern occurs in string, by running the naive matcher."""
    return naive_outcome(pattern, string, fuel).value == TRUE
