"""Parameterized configurations and the negative information attached to them.

A configuration pairs a parameterized expression with a restriction: a
conjunction of disequalities over symbol parameters and symbol literals.
Satisfiability and entailment are decided against an open (unbounded)
alphabet, which makes both exact: a conjunction of disequalities is
unsatisfiable only by syntactic self-contradiction, and entailment reduces
to set containment after normalization.

Disequalities naming parameters that no longer occur in the expression are
pruned (they are existentially satisfiable and constrain nothing), which
keeps the configurations arising from any one program finite modulo
renaming.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .syntax import (
    Call, Cons, Expr, ListParam, Param, Sym, SymParam, is_passive,
    params_of, render_expr, substitute, unword,
)

Term = Union[Sym, SymParam]
Renaming = dict  # Param -> Param, injective and kind-preserving


class ConfigError(Exception):
    pass


def _term_key(t: Term):
    return (0, t.ch) if isinstance(t, Sym) else (1, t.name)


def _norm_pair(t1: Term, t2: Term) -> tuple[Term, Term]:
    return (t1, t2) if _term_key(t1) <= _term_key(t2) else (t2, t1)


@dataclass(frozen=True, slots=True)
class Restriction:
    """Conjunction of disequalities t1 != t2, order-normalized and
    duplicate-free; `unsat` marks the canonical contradiction."""
    diseqs: frozenset = frozenset()
    unsat: bool = False

    def __repr__(self):
        if self.unsat:
            return "<unsat>"
        return ", ".join(f"{a!r}≠{b!r}" for a, b in self.sorted_pairs())

    def sorted_pairs(self) -> list[tuple[Term, Term]]:
        return sorted(self.diseqs, key=lambda p: (_term_key(p[0]),
                                                  _term_key(p[1])))

    def params(self) -> set[SymParam]:
        out = set()
        for a, b in self.diseqs:
            for t in (a, b):
                if isinstance(t, SymParam):
                    out.add(t)
        return out


EMPTY = Restriction()
UNSAT = Restriction(frozenset(), True)


def restriction(pairs) -> Restriction:
    """Normalize a collection of (term, term) pairs into a Restriction.

    Pairs of two distinct literals are vacuously true and dropped; a pair of
    identical terms collapses the whole conjunction to the unsatisfiable
    marker.  Normalization is idempotent.
    """
    out = set()
    for t1, t2 in pairs:
        if t1 == t2:
            return UNSAT
        if isinstance(t1, Sym) and isinstance(t2, Sym):
            continue
        out.add(_norm_pair(t1, t2))
    return Restriction(frozenset(out)) if out else EMPTY


def satisfiable(r: Restriction) -> bool:
    """Over an open alphabet a normalized conjunction of disequalities is
    satisfiable unless it is the contradiction marker."""
    return not r.unsat


def apply_to_restriction(r: Restriction, subst: dict) -> Restriction:
    """Map symbol parameters through a substitution and renormalize."""
    if r.unsat:
        return UNSAT
    pairs = []
    for t1, t2 in r.diseqs:
        a = subst.get(t1, t1) if isinstance(t1, SymParam) else t1
        b = subst.get(t2, t2) if isinstance(t2, SymParam) else t2
        for t in (a, b):
            if not isinstance(t, (Sym, SymParam)):
                raise ConfigError(f"restriction term mapped to non-atom {t!r}")
        pairs.append((a, b))
    return restriction(pairs)


def prune(r: Restriction, live: set) -> Restriction:
    """Drop disequalities naming parameters outside `live`; such constraints
    are existentially satisfiable over an open alphabet."""
    if r.unsat:
        return UNSAT
    kept = [p for p in r.diseqs
            if all(not isinstance(t, SymParam) or t in live for t in p)]
    return Restriction(frozenset(kept))


def entails(r2: Restriction, r1: Restriction, renaming: Renaming) -> bool:
    """Does r2 imply r1 under the renaming of r1's parameters?

    Sound and complete for disequality conjunctions over an open alphabet:
    each renamed disequality must hold between two distinct literals or be
    present in r2 verbatim.
    """
    if r2.unsat:
        return True
    image = apply_to_restriction(r1, renaming)
    if image.unsat:
        return False
    return image.diseqs <= r2.diseqs


@dataclass(frozen=True, slots=True)
class Config:
    """A node label: parameterized expression plus restriction.

    The expression is passive or a single top-level call with passive
    arguments; the restriction only names parameters occurring in the
    expression (construct via `make_config`, which prunes).
    """
    expr: Expr
    restriction: Restriction = EMPTY

    def __repr__(self):
        return config_text(self)

    def is_active(self) -> bool:
        return isinstance(self.expr, Call)

    def params(self) -> list[Param]:
        return params_of(self.expr)


def make_config(expr: Expr, r: Restriction = EMPTY) -> Config:
    if isinstance(expr, Call):
        if any(not is_passive(a) for a in expr.args):
            raise ConfigError(f"nested call in {render_expr(expr)}")
    elif not is_passive(expr):
        raise ConfigError(f"call under constructor in {render_expr(expr)}")
    live = {p for p in params_of(expr) if isinstance(p, SymParam)}
    return Config(expr, prune(r, live))


def rename_expr(expr: Expr, renaming: Renaming) -> Expr:
    return substitute(expr, renaming)


def invert_renaming(renaming: Renaming) -> Renaming:
    return {v: k for k, v in renaming.items()}


def renaming_text(renaming: Renaming) -> str:
    items = sorted(renaming.items(), key=lambda kv: _param_key(kv[0]))
    return ", ".join(f"{k!r}↦{v!r}" for k, v in items)


def _param_key(p: Param):
    return (0, p.name) if isinstance(p, SymParam) else (1, p.name)


def covers(c1: Config, c2: Config) -> Optional[Renaming]:
    """Renaming sending c1's expression exactly onto c2's, if one exists and
    c2's restriction entails the renamed restriction of c1.

    Alignment is positional: the expressions must agree everywhere except at
    parameter positions, where a parameter may only map to a parameter of the
    same kind; repeated parameters must map consistently and injectively.
    """
    mapping: Renaming = {}

    def align(e1: Expr, e2: Expr) -> bool:
        if isinstance(e1, SymParam):
            if not isinstance(e2, SymParam):
                return False
            return _record(e1, e2)
        if isinstance(e1, ListParam):
            if not isinstance(e2, ListParam):
                return False
            return _record(e1, e2)
        if isinstance(e1, Cons):
            return (isinstance(e2, Cons) and align(e1.head, e2.head)
                    and align(e1.tail, e2.tail))
        if isinstance(e1, Call):
            return (isinstance(e2, Call) and e1.fn == e2.fn
                    and len(e1.args) == len(e2.args)
                    and all(align(a, b) for a, b in zip(e1.args, e2.args)))
        return e1 == e2

    def _record(p1, p2) -> bool:
        if p1 in mapping:
            return mapping[p1] == p2
        mapping[p1] = p2
        return True

    if not align(c1.expr, c2.expr):
        return None
    if len(set(mapping.values())) != len(mapping):
        return None  # not injective
    if not entails(c2.restriction, c1.restriction, mapping):
        return None
    return mapping


def alpha_equivalent(c1: Config, c2: Config) -> bool:
    """Equality modulo parameter renaming (covering in both directions)."""
    return covers(c1, c2) is not None and covers(c2, c1) is not None


# --- textual form for logs and DOT ------------------------------------------

def _chain_text(expr: Expr) -> str:
    """Like render_expr but abbreviating literal prefixes of open chains:
    'b':'c':'a':#y prints as "bca"++#y."""
    w = unword(expr)
    if w is not None:
        return f'"{w}"' if w else "Nil"
    prefix = []
    node = expr
    while isinstance(node, Cons) and isinstance(node.head, Sym):
        prefix.append(node.head.ch)
        node = node.tail
    if len(prefix) >= 2:
        return f'"{"".join(prefix)}"++{_chain_text(node)}'
    if isinstance(expr, Cons):
        return f"{expr.head!r}:{_chain_text(expr.tail)}"
    if isinstance(expr, Call):
        return f"{expr.fn}({', '.join(_chain_text(a) for a in expr.args)})"
    return repr(expr)


def config_text(c: Config) -> str:
    """`<expr ; diseq, ...>` form used in graph dumps and DOT labels."""
    body = _chain_text(c.expr)
    if c.restriction.unsat:
        return f"⟨{body} ; ⊥⟩"
    if not c.restriction.diseqs:
        return f"⟨{body}⟩"
    return f"⟨{body} ; {c.restriction!r}⟩"
