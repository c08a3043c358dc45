"""One-step unfolding of configurations: narrowing, negative information,
transient compression, and node classification.

Driving a configuration enumerates, in rule order, every satisfiable way a
rule of the called function can fire after minimally narrowing the
configuration's parameters (one constructor level, exactly as deep as the
patterns inspect).  Each branch records the narrowing substitution and the
disequalities under which all earlier rules fail on the same narrowed shape;
the branch set partitions the ground instances of the configuration.

Negative information is only representable as symbol disequalities.  Rule
layouts whose earlier-rule failure would need anything else (equality of two
unknown symbols, or a structurally deeper split) are rejected loudly; they
cannot arise for the shipped matcher or for the programs it generates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .configs import (
    Config, Restriction, apply_to_restriction, make_config, restriction,
    satisfiable,
)
from .syntax import (
    Call, Cons, Expr, ListParam, ListVar, Nil, Param, Program, Sym,
    SymParam, SymVar, params_of, render_expr, substitute,
)


class DriveError(Exception):
    pass


class StuckConfigError(DriveError):
    """No rule can fire under any narrowing: an encoding bug, not a leaf."""


class UnsupportedNarrowingError(DriveError):
    """The match would need a narrowing outside the supported forms."""


class NameGen:
    """Fresh-parameter supply owned by one driving session."""

    def __init__(self, reserved_sym=(), reserved_list=()):
        self._sym_used = set(reserved_sym)
        self._list_used = set(reserved_list)
        self._nsym = 0
        self._nlist = 0

    @classmethod
    def for_exprs(cls, *exprs: Expr) -> "NameGen":
        syms, lists = set(), set()
        for e in exprs:
            for p in params_of(e):
                (syms if isinstance(p, SymParam) else lists).add(p.name)
        return cls(syms, lists)

    def fresh_sym(self) -> SymParam:
        while True:
            self._nsym += 1
            name = f"c{self._nsym}"
            if name not in self._sym_used:
                self._sym_used.add(name)
                return SymParam(name)

    def fresh_list(self) -> ListParam:
        while True:
            self._nlist += 1
            name = f"y{self._nlist}"
            if name not in self._list_used:
                self._list_used.add(name)
                return ListParam(name)


@dataclass(frozen=True, slots=True)
class Narrowing:
    """Edge label: parameter substitution, new disequalities, and the index
    of the fired rule (the first one, for a compressed edge)."""
    subst: tuple  # ((Param, Expr), ...) in canonical parameter order
    added: Restriction
    rule_index: int

    @property
    def subst_dict(self) -> dict:
        return dict(self.subst)

    def __repr__(self):
        parts = [f"{p!r}↦{render_expr(e)}" for p, e in self.subst]
        if self.added.diseqs:
            parts.append(repr(self.added))
        return "; ".join(parts) if parts else "ε"


@dataclass(frozen=True, slots=True)
class Branch:
    """One driven (and possibly compressed) edge out of a configuration.

    `chain` holds the intermediate transient configurations folded into the
    edge, in order; `steps` counts rule applications (1 + len(chain))."""
    narrowing: Narrowing
    child: Config
    chain: tuple = ()
    rule_indices: tuple = ()
    steps: int = 1


class NodeKind(Enum):
    LEAF_PASSIVE = "leaf-passive"
    TRANSIENT = "transient"
    PIVOT = "pivot"


def _canon_subst(subst: dict) -> tuple:
    def key(p: Param):
        return (0, p.name) if isinstance(p, SymParam) else (1, p.name)
    return tuple(sorted(subst.items(), key=lambda kv: key(kv[0])))


def narrow_match(lhs: tuple[Expr, ...], args: tuple[Expr, ...],
                 names: NameGen) -> Optional[dict]:
    """Most general narrowing of the arguments' parameters under which every
    pattern matches, or None when no narrowing can make the rule fire.

    Returned substitution maps a ListParam to Nil or Cons(atom, fresh
    ListParam), and a SymParam to a Sym literal.
    """
    subst: dict = {}
    vbind: dict = {}
    repeated_lists: list[tuple[Expr, Expr]] = []

    def res_atom(a):
        while isinstance(a, SymParam) and a in subst:
            a = subst[a]
        return a

    def res_list(a):
        while isinstance(a, ListParam) and a in subst:
            a = subst[a]
        return a

    def match_atom(pat, a) -> bool:
        a = res_atom(a)
        if isinstance(pat, Sym):
            if isinstance(a, Sym):
                return pat.ch == a.ch
            if isinstance(a, SymParam):
                subst[a] = pat
                return True
            return False
        if isinstance(pat, SymVar):
            if pat in vbind:
                b = res_atom(vbind[pat])
                if isinstance(b, Sym) and isinstance(a, Sym):
                    return b.ch == a.ch
                if isinstance(b, Sym) and isinstance(a, SymParam):
                    subst[a] = b
                    return True
                if isinstance(b, SymParam) and isinstance(a, Sym):
                    subst[b] = a
                    return True
                if isinstance(b, SymParam) and isinstance(a, SymParam):
                    if b == a:
                        return True
                    raise UnsupportedNarrowingError(
                        f"equality between two symbol parameters "
                        f"{b!r} and {a!r}")
                return False
            vbind[pat] = a
            return True
        raise DriveError(f"bad pattern atom {pat!r}")

    def match_list(pat, a) -> bool:
        a = res_list(a)
        if isinstance(pat, ListVar):
            if pat in vbind:
                repeated_lists.append((vbind[pat], a))
                return True
            vbind[pat] = a
            return True
        if isinstance(pat, Nil):
            if isinstance(a, Nil):
                return True
            if isinstance(a, ListParam):
                subst[a] = Nil()
                return True
            return False
        if isinstance(pat, Cons):
            if isinstance(a, Cons):
                return match_atom(pat.head, a.head) and match_list(pat.tail,
                                                                   a.tail)
            if isinstance(a, ListParam):
                h = names.fresh_sym()
                t = names.fresh_list()
                subst[a] = Cons(h, t)
                return match_atom(pat.head, h) and match_list(pat.tail, t)
            return False
        if isinstance(pat, (Sym, SymVar)):  # bare symbol position
            if isinstance(a, (Sym, SymParam)):
                return match_atom(pat, a)
            return False
        raise DriveError(f"bad pattern {pat!r}")

    if len(lhs) != len(args):
        raise DriveError(f"arity mismatch: {len(lhs)} patterns, "
                         f"{len(args)} arguments")
    for pat, a in zip(lhs, args):
        if not match_list(pat, a):
            return None
    for e1, e2 in repeated_lists:
        if substitute(e1, subst) != substitute(e2, subst):
            raise UnsupportedNarrowingError(
                "repeated list variable binds unequal expressions")
    return subst


def _resolve_subst(subst: dict) -> dict:
    """Fold chains like {q: c1:y1, c1: 'a'} into {q: 'a':y1, c1: 'a'}.

    Narrowings are acyclic (fresh parameters only ever map forward), so the
    fixpoint exists and is shallow."""
    out = {}
    for p, img in subst.items():
        nxt = substitute(img, subst)
        while nxt != img:
            img, nxt = nxt, substitute(nxt, subst)
        out[p] = img
    return out


def _bind(lhs: tuple[Expr, ...], args: tuple[Expr, ...]) -> dict:
    """Structural match of patterns against already-narrowed arguments."""
    binding: dict = {}

    def go(pat, val) -> bool:
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
        raise DriveError(f"bad pattern {pat!r}")

    for pat, val in zip(lhs, args):
        if not go(pat, val):
            raise DriveError("narrowed arguments failed to match")
    return binding


def drive_step(program: Program, cfg: Config,
               names: Optional[NameGen] = None) -> list[Branch]:
    """Enumerate the satisfiable branches of one unfolding step, in rule
    order, with earlier-rule failure recorded as disequalities."""
    if not cfg.is_active():
        raise DriveError(f"cannot drive passive configuration {cfg!r}")
    if not satisfiable(cfg.restriction):
        raise DriveError("cannot drive a configuration with an "
                         "unsatisfiable restriction")
    if names is None:
        names = NameGen.for_exprs(cfg.expr)
    call = cfg.expr
    parent_params = set(params_of(call))
    rules = program.rules(call.fn)
    branches: list[Branch] = []
    for idx, rule in enumerate(rules):
        raw = narrow_match(rule.lhs, call.args, names)
        if raw is None:
            continue
        # published narrowing: fully resolved, restricted to parent params
        subst = {p: e for p, e in _resolve_subst(raw).items()
                 if p in parent_params}
        inherited = apply_to_restriction(cfg.restriction, subst)
        if inherited.unsat:
            continue  # narrowing contradicts inherited negative information
        narrowed_args = tuple(substitute(a, subst) for a in call.args)
        known = set(inherited.diseqs)
        added_pairs: list[tuple] = []
        shadowed = False
        scratch = NameGen.for_exprs(*narrowed_args)
        for j in range(idx):
            mj = narrow_match(rules[j].lhs, narrowed_args, scratch)
            if mj is None:
                continue
            eqs = []
            deep = False
            for p, img in mj.items():
                if isinstance(p, SymParam) and isinstance(img, Sym):
                    eqs.append((p, img))
                else:
                    deep = True
            if deep:
                raise UnsupportedNarrowingError(
                    f"rule {j} of {call.fn} fires on a structurally finer "
                    "region than a later rule; its failure is not a symbol "
                    "disequality")
            if not eqs:
                shadowed = True  # earlier rule fires on the whole region
                break
            impossible = any(
                restriction([(p, s)]).diseqs <= known for p, s in eqs)
            # a single pair normalizes to itself unless vacuous
            if impossible:
                continue
            if len(eqs) > 1:
                raise UnsupportedNarrowingError(
                    f"failure of rule {j} of {call.fn} needs a disjunction "
                    "of disequalities")
            added_pairs.append(eqs[0])
            known |= restriction([eqs[0]]).diseqs
        if shadowed:
            continue
        added = restriction(added_pairs)
        binding = _bind(rule.lhs, narrowed_args)
        child_expr = substitute(rule.rhs, binding)
        child = make_config(child_expr,
                            restriction(inherited.diseqs | added.diseqs))
        branches.append(Branch(
            Narrowing(_canon_subst(subst), added, idx), child,
            chain=(), rule_indices=(idx,), steps=1))
    if not branches:
        raise StuckConfigError(f"no rule of {call.fn} can fire on {cfg!r}")
    return branches


def narrowed_config(parent: Config, branch: Branch) -> Config:
    """The configuration reached by applying the branch narrowing to the
    parent before the rule fires (the uncompressed intermediate view)."""
    subst = branch.narrowing.subst_dict
    expr = substitute(parent.expr, subst)
    r = apply_to_restriction(parent.restriction, subst)
    return make_config(expr, restriction(r.diseqs | branch.narrowing.added.diseqs))


def _spine_depth(expr: Expr) -> int:
    exprs = expr.args if isinstance(expr, Call) else (expr,)
    deepest = 0
    for e in exprs:
        d = 0
        while isinstance(e, Cons):
            d += 1
            e = e.tail
        deepest = max(deepest, d)
    return deepest


def compress(program: Program, branch: Branch, names: Optional[NameGen] = None,
             max_steps: int = 1000, max_depth: int = 400) -> Branch:
    """Fold transient steps into the branch while its child drives to exactly
    one satisfiable branch; records the skipped configurations in order.

    Chains that loop (too many steps) or grow their configurations (too much
    constructor depth) are cut off with an error: such divergence can neither
    fold nor raise the whistle, since transients are not graph nodes."""
    if names is None:
        names = NameGen.for_exprs(branch.child.expr)
    subst = branch.narrowing.subst_dict
    added = branch.narrowing.added
    chain = list(branch.chain)
    rule_indices = list(branch.rule_indices)
    steps = branch.steps
    child = branch.child
    while child.is_active():
        nexts = drive_step(program, child, names)
        if len(nexts) != 1:
            break
        nxt = nexts[0]
        s2 = nxt.narrowing.subst_dict
        if s2:
            # parameters introduced by the edge so far live in the images;
            # s2 entries for them fold in, entries for untouched parent
            # parameters are appended
            edge_fresh = set()
            for e in subst.values():
                edge_fresh.update(params_of(e))
            subst = {p: substitute(e, s2) for p, e in subst.items()}
            for p, e in s2.items():
                if p not in subst and p not in edge_fresh:
                    subst[p] = e
            added = apply_to_restriction(added, s2)
            if added.unsat:
                raise DriveError(
                    "transient narrowing contradicts the edge's own "
                    "disequalities")
        added = restriction(added.diseqs | nxt.narrowing.added.diseqs)
        chain.append(child)
        rule_indices.extend(nxt.rule_indices)
        steps += nxt.steps
        if steps > max_steps:
            raise DriveError("transient chain exceeded the step budget")
        if _spine_depth(nxt.child.expr) > max_depth:
            raise DriveError("transient chain grows without bound")
        child = nxt.child
    return Branch(Narrowing(_canon_subst(subst), added,
                            branch.narrowing.rule_index),
                  child, tuple(chain), tuple(rule_indices), steps)


def classify(program: Program, cfg: Config) -> NodeKind:
    """leaf-passive, transient (one branch), or pivot (at least two)."""
    if not cfg.is_active():
        return NodeKind.LEAF_PASSIVE
    n = len(drive_step(program, cfg, NameGen.for_exprs(cfg.expr)))
    return NodeKind.TRANSIENT if n == 1 else NodeKind.PIVOT
