"""Abstract syntax, parser, and printer for a first-order string-rewriting
language.

Programs are sets of functions, each a list of rewrite rules tried top-down,
first match wins.  Values are words (right-nested chains of single-character
symbols ending in Nil), the logical constants T and F, and -- in argument
positions only -- bare symbols.  Expressions may additionally contain rule
variables (`s.a`, `y`) and specializer parameters (`#s.a`, `#y`).

The concrete grammar:

    program  := funcdef+
    funcdef  := NAME "{" rule+ "}"
    rule     := pattern ("," pattern)* "=" rhs ";"
    pattern  := "Nil" | patatom ":" pattern | LISTVAR | patatom
    patatom  := "'" CHAR "'" | SYMVAR
    rhs      := "T" | "F" | pexpr | NAME "(" arg ("," arg)* ")"
    arg      := pexpr | atom
    pexpr    := "Nil" | atom ":" pexpr | LISTVAR | LISTPARAM
    atom     := "'" CHAR "'" | SYMVAR | SYMPARAM

    NAME = [A-Za-z][A-Za-z0-9_]*;  SYMVAR = "s." NAME;  SYMPARAM = "#s." NAME
    LISTVAR = NAME starting lowercase (and not of the "s." form)
    LISTPARAM = "#" NAME

`"abc"` is accepted wherever a pexpr is and abbreviates 'a':'b':'c':Nil.
`--` starts a comment running to end of line.  Bare atoms are only legal as
whole patterns and whole call arguments (single-symbol positions).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Union


class ParseError(Exception):
    """Syntax error with source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class ValidationError(Exception):
    """Well-formed syntax violating a program-level rule."""


METACHARS = frozenset("'\":,{}()#.")


def _check_symbol_char(ch: str) -> str:
    if len(ch) != 1 or not ch.isprintable() or ch in METACHARS:
        raise ValidationError(f"invalid symbol character {ch!r}")
    return ch


# --- expression nodes -------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Sym:
    """Symbol literal 'c': one printable non-metacharacter."""
    ch: str

    def __post_init__(self):
        _check_symbol_char(self.ch)

    def __repr__(self):
        return f"'{self.ch}'"


@dataclass(frozen=True, slots=True)
class SymVar:
    """Rule variable ranging over symbols, written s.name."""
    name: str

    def __repr__(self):
        return f"s.{self.name}"


@dataclass(frozen=True, slots=True)
class SymParam:
    """Specializer parameter ranging over symbols, written #s.name."""
    name: str

    def __repr__(self):
        return f"#s.{self.name}"


@dataclass(frozen=True, slots=True)
class Nil:
    def __repr__(self):
        return "Nil"


@dataclass(frozen=True, slots=True)
class TrueVal:
    def __repr__(self):
        return "T"


@dataclass(frozen=True, slots=True)
class FalseVal:
    def __repr__(self):
        return "F"


NIL = Nil()
TRUE = TrueVal()
FALSE = FalseVal()


@dataclass(frozen=True, slots=True)
class Cons:
    head: "Atom"
    tail: "Expr"

    def __repr__(self):
        return render_expr(self)


@dataclass(frozen=True, slots=True)
class ListVar:
    """Rule variable ranging over lists, written bare lowercase."""
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class ListParam:
    """Specializer parameter ranging over lists, written #name."""
    name: str

    def __repr__(self):
        return f"#{self.name}"


@dataclass(frozen=True, slots=True)
class Call:
    fn: str
    args: tuple["Expr", ...]

    def __repr__(self):
        return render_expr(self)


Atom = Union[Sym, SymVar, SymParam]
Param = Union[SymParam, ListParam]
Var = Union[SymVar, ListVar]
Expr = Union[Sym, SymVar, SymParam, Nil, TrueVal, FalseVal, Cons, ListVar,
             ListParam, Call]


@dataclass(frozen=True, slots=True)
class Rule:
    lhs: tuple[Expr, ...]
    rhs: Expr

    def __repr__(self):
        return render_rule(self)


@dataclass(frozen=True)
class Program:
    """Functions in source order; each maps to its rules in source order."""
    functions: tuple[tuple[str, tuple[Rule, ...]], ...]

    @cached_property
    def table(self) -> dict[str, tuple[Rule, ...]]:
        return dict(self.functions)

    def rules(self, name: str) -> tuple[Rule, ...]:
        try:
            return self.table[name]
        except KeyError:
            raise ValidationError(f"undefined function {name}") from None

    def arity(self, name: str) -> int:
        return len(self.rules(name)[0].lhs)

    def __repr__(self):
        return f"<Program {'/'.join(n for n, _ in self.functions)}>"


# --- word helpers -----------------------------------------------------------

def word(text: str) -> Expr:
    """Build the word value for a plain string, e.g. "ab" -> 'a':'b':Nil."""
    out: Expr = NIL
    for ch in reversed(text):
        out = Cons(Sym(ch), out)
    return out


def unword(expr: Expr) -> Optional[str]:
    """Inverse of word(); None if expr is not a pure ground word."""
    chars = []
    while isinstance(expr, Cons):
        if not isinstance(expr.head, Sym):
            return None
        chars.append(expr.head.ch)
        expr = expr.tail
    if not isinstance(expr, Nil):
        return None
    return "".join(chars)


def is_passive(expr: Expr) -> bool:
    """True when expr contains no function call."""
    if isinstance(expr, Call):
        return False
    if isinstance(expr, Cons):
        return is_passive(expr.tail)
    return True


def subterms(expr: Expr) -> Iterator[Expr]:
    stack = [expr]
    while stack:
        e = stack.pop()
        yield e
        if isinstance(e, Cons):
            yield e.head
            stack.append(e.tail)
        elif isinstance(e, Call):
            stack.extend(reversed(e.args))


def params_of(expr: Expr) -> list[Param]:
    """Distinct parameters in first-occurrence (left-to-right, depth-first)
    order."""
    seen: list[Param] = []
    for t in subterms(expr):
        if isinstance(t, (SymParam, ListParam)) and t not in seen:
            seen.append(t)
    return seen


def vars_of(expr: Expr) -> list[Var]:
    seen: list[Var] = []
    for t in subterms(expr):
        if isinstance(t, (SymVar, ListVar)) and t not in seen:
            seen.append(t)
    return seen


def is_ground(expr: Expr) -> bool:
    return not any(
        isinstance(t, (SymVar, ListVar, SymParam, ListParam, Call))
        for t in subterms(expr))


def substitute(expr: Expr, mapping: dict) -> Expr:
    """Replace variable/parameter leaves by their images.

    Keys are leaf nodes (SymVar, ListVar, SymParam, ListParam).  Images of
    symbol-sort keys must be atoms; images of list-sort keys must be list
    expressions.  Iterative along list spines so deep words are safe.
    """
    if isinstance(expr, (SymVar, ListVar, SymParam, ListParam)):
        return mapping.get(expr, expr)
    if isinstance(expr, Cons):
        heads = []
        node = expr
        while isinstance(node, Cons):
            h = node.head
            if isinstance(h, (SymVar, SymParam)):
                h = mapping.get(h, h)
            heads.append(h)
            node = node.tail
        out = substitute(node, mapping)
        for h in reversed(heads):
            out = Cons(h, out)
        return out
    if isinstance(expr, Call):
        return Call(expr.fn, tuple(substitute(a, mapping) for a in expr.args))
    return expr


# --- tokenizer --------------------------------------------------------------

_PUNCT = "{}(),:;="


@dataclass(slots=True)
class _Token:
    kind: str  # NAME SYMVAR SYMPARAM LISTPARAM CHAR STRING punct EOF
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Token]:
    toks: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(src)

    def err(msg):
        raise ParseError(msg, line, col)

    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c == "'":
            if i + 2 >= n or src[i + 2] != "'":
                err("unterminated symbol literal")
            ch = src[i + 1]
            toks.append(_Token("CHAR", ch, start_line, start_col))
            i += 3
            col += 3
            continue
        if c == '"':
            j = src.find('"', i + 1)
            if j < 0:
                err("unterminated word literal")
            toks.append(_Token("STRING", src[i + 1:j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if c == "#":
            i += 1
            col += 1
            sym = False
            if src.startswith("s.", i):
                sym = True
                i += 2
                col += 2
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            if j == i or not src[i].isalpha():
                err("expected parameter name after '#'")
            name = src[i:j]
            toks.append(_Token("SYMPARAM" if sym else "LISTPARAM", name,
                               start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            name = src[i:j]
            if name == "s" and j < n and src[j] == ".":
                k = j + 1
                m = k
                while m < n and (src[m].isalnum() or src[m] == "_"):
                    m += 1
                if m == k or not src[k].isalpha():
                    err("expected variable name after 's.'")
                toks.append(_Token("SYMVAR", src[k:m], start_line, start_col))
                col += m - i
                i = m
                continue
            toks.append(_Token("NAME", name, start_line, start_col))
            col += j - i
            i = j
            continue
        if c in _PUNCT:
            toks.append(_Token(c, c, start_line, start_col))
            i += 1
            col += 1
            continue
        err(f"unexpected character {c!r}")
    toks.append(_Token("EOF", "", line, col))
    return toks


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.pos = 0

    @property
    def cur(self) -> _Token:
        return self.toks[self.pos]

    def advance(self) -> _Token:
        t = self.cur
        self.pos += 1
        return t

    def expect(self, kind: str) -> _Token:
        if self.cur.kind != kind:
            self.err(f"expected {kind!r}, found {self.cur.text!r}")
        return self.advance()

    def err(self, msg):
        raise ParseError(msg, self.cur.line, self.cur.col)

    # program := funcdef+
    def program(self) -> Program:
        funcs = []
        names = set()
        while self.cur.kind != "EOF":
            name, rules = self.funcdef()
            if name in names:
                self.err(f"duplicate function {name}")
            names.add(name)
            funcs.append((name, tuple(rules)))
        if not funcs:
            self.err("empty program")
        return Program(tuple(funcs))

    def funcdef(self):
        name = self.expect("NAME").text
        self.expect("{")
        rules = [self.rule()]
        while self.cur.kind != "}":
            rules.append(self.rule())
        self.expect("}")
        return name, rules

    def rule(self) -> Rule:
        pats = [self.pattern()]
        while self.cur.kind == ",":
            self.advance()
            pats.append(self.pattern())
        self.expect("=")
        rhs = self.rhs()
        self.expect(";")
        return Rule(tuple(pats), rhs)

    def _patatom(self) -> Optional[Atom]:
        if self.cur.kind == "CHAR":
            return Sym(self.advance().text)
        if self.cur.kind == "SYMVAR":
            return SymVar(self.advance().text)
        return None

    def pattern(self) -> Expr:
        t = self.cur
        if t.kind == "NAME":
            if t.text == "Nil":
                self.advance()
                return NIL
            if not t.text[0].islower():
                self.err(f"list variable must start lowercase: {t.text!r}")
            self.advance()
            return ListVar(t.text)
        atom = self._patatom()
        if atom is None:
            self.err(f"expected pattern, found {t.text!r}")
        if self.cur.kind == ":":
            self.advance()
            return Cons(atom, self.pattern())
        return atom  # bare symbol position

    def rhs(self) -> Expr:
        t = self.cur
        is_call = t.kind == "NAME" and self.toks[self.pos + 1].kind == "("
        if t.kind == "NAME" and t.text == "T" and not is_call:
            self.advance()
            return TRUE
        if t.kind == "NAME" and t.text == "F" and not is_call:
            self.advance()
            return FALSE
        if is_call:
            fn = self.advance().text
            self.advance()
            args = [self.call_arg()]
            while self.cur.kind == ",":
                self.advance()
                args.append(self.call_arg())
            self.expect(")")
            return Call(fn, tuple(args))
        return self.pexpr()

    def _atom(self) -> Optional[Atom]:
        if self.cur.kind == "SYMPARAM":
            return SymParam(self.advance().text)
        return self._patatom()

    def call_arg(self) -> Expr:
        atom = self._atom()
        if atom is not None:
            if self.cur.kind == ":":
                self.advance()
                return Cons(atom, self.pexpr())
            return atom  # bare symbol argument
        return self.pexpr()

    def pexpr(self) -> Expr:
        t = self.cur
        if t.kind == "STRING":
            self.advance()
            return word(t.text)
        if t.kind == "NAME":
            if t.text == "Nil":
                self.advance()
                return NIL
            if not t.text[0].islower():
                self.err(f"list variable must start lowercase: {t.text!r}")
            self.advance()
            return ListVar(t.text)
        if t.kind == "LISTPARAM":
            self.advance()
            return ListParam(t.text)
        atom = self._atom()
        if atom is None:
            self.err(f"expected expression, found {t.text!r}")
        self.expect(":")
        return Cons(atom, self.pexpr())

    def expression(self) -> Expr:
        t = self.cur
        is_call = t.kind == "NAME" and self.toks[self.pos + 1].kind == "("
        if t.kind == "NAME" and t.text in ("T", "F") and not is_call:
            return self.rhs()
        if is_call:
            return self.rhs()
        return self.call_arg()


def _validate(program: Program) -> Program:
    for name, rules in program.functions:
        arity = len(rules[0].lhs)
        for rule in rules:
            if len(rule.lhs) != arity:
                raise ValidationError(
                    f"function {name}: rule arity {len(rule.lhs)} != {arity}")
            bound = set()
            for p in rule.lhs:
                for v in vars_of(p):
                    bound.add(v)
            for t in subterms(rule.rhs):
                if isinstance(t, (SymVar, ListVar)) and t not in bound:
                    raise ValidationError(
                        f"function {name}: rhs variable {t!r} unbound in lhs")
                if isinstance(t, (SymParam, ListParam)):
                    raise ValidationError(
                        f"function {name}: parameter {t!r} not allowed in a rule")
            for t in subterms(rule.rhs):
                if isinstance(t, Call):
                    callee = program.table.get(t.fn)
                    if callee is None:
                        raise ValidationError(
                            f"function {name}: call to undefined function {t.fn}")
                    if len(t.args) != len(callee[0].lhs):
                        raise ValidationError(
                            f"function {name}: call {t.fn}/{len(t.args)} does "
                            f"not match definition {t.fn}/{len(callee[0].lhs)}")
    return program


def parse_program(text: str) -> Program:
    """Parse and validate a program; raises ParseError or ValidationError."""
    p = _Parser(text)
    return _validate(p.program())


def parse_expression(text: str) -> Expr:
    """Parse a single expression (pexpr, call, T/F, or bare atom)."""
    p = _Parser(text)
    e = p.expression()
    if p.cur.kind != "EOF":
        p.err(f"trailing input {p.cur.text!r}")
    return e


# --- printer ----------------------------------------------------------------

def render_expr(expr: Expr) -> str:
    """Canonical text; ground words are abbreviated with double quotes."""
    w = unword(expr)
    if w is not None and w != "":
        return f'"{w}"'
    if isinstance(expr, Cons):
        return f"{render_expr(expr.head)}:{render_expr(expr.tail)}"
    if isinstance(expr, Call):
        return f"{expr.fn}({', '.join(render_expr(a) for a in expr.args)})"
    return repr(expr)


def render_pattern(expr: Expr) -> str:
    if isinstance(expr, Cons):
        return f"{render_pattern(expr.head)}:{render_pattern(expr.tail)}"
    return repr(expr)


def render_rule(rule: Rule) -> str:
    lhs = ", ".join(render_pattern(p) for p in rule.lhs)
    return f"{lhs} = {render_expr(rule.rhs)};"


def render(program: Program, comments: Optional[dict[str, str]] = None) -> str:
    """Canonical program text; re-parses to an equal Program.

    `comments` optionally maps a function name to a line placed above its
    definition (emitted as a `--` comment, invisible to the parser).
    """
    chunks = []
    for name, rules in program.functions:
        if comments and name in comments:
            chunks.append(f"-- {comments[name]}")
        body = "\n".join(f"  {render_rule(r)}" for r in rules)
        chunks.append(f"{name} {{\n{body}\n}}")
    return "\n".join(chunks) + "\n"
