"""Process-graph construction: iterated driving with covering-based folding
and a homeomorphic-embedding whistle.

At each active node the builder first scans the ancestors with the same head
function, nearest first, for a configuration covering the node (fold edge on
success); failing that it checks whether any such ancestor embeds into the
node (whistle: the path stops with a diagnostic leaf and a counter tick, no
generalization operator is provided); otherwise the node is driven, transient
steps are compressed into the edges, and the children are visited depth-first
in branch order.

The embedding ignores restrictions, couples equal constructors and literals,
dives into subterms, and relates a parameter only to parameters of the same
kind, so it is preserved under renaming and never fires on a node whose shape
differs from the ancestor only at parameter positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .configs import (
    Config, Renaming, config_text, covers, make_config, renaming_text,
)
from .driving import Branch, NameGen, compress, drive_step
from .interpreter import EmptyPatternError, naive_matcher
from .syntax import (
    Call, Cons, Expr, ListParam, Nil, Program, Sym, SymParam, word,
)


class ScpError(Exception):
    pass


class NodeBudgetError(ScpError):
    pass


class FirstPathError(ScpError):
    """The lowest-rule-index path failed to end at a passive leaf."""


KIND_PASSIVE = "passive"
KIND_TRANSIENT = "transient"
KIND_PIVOT = "pivot"
KIND_FOLDED = "folded"
KIND_DIAGNOSTIC = "diagnostic"


@dataclass
class Node:
    config: Config
    kind: str = ""
    parent: Optional[int] = None
    branch: Optional[Branch] = None  # edge label from parent
    children: list = field(default_factory=list)
    fold: Optional[tuple[int, Renaming]] = None


@dataclass
class ProcessGraph:
    nodes: list[Node]
    root: int = 0

    def ancestors(self, i: int) -> Iterator[int]:
        """Strict ancestors on the root path, nearest first."""
        p = self.nodes[i].parent
        while p is not None:
            yield p
            p = self.nodes[p].parent

    @property
    def tree_edges(self) -> dict:
        return {i: [(self.nodes[c].branch.narrowing, c)
                    for c in n.children]
                for i, n in enumerate(self.nodes) if n.children}

    @property
    def fold_edges(self) -> dict:
        return {i: n.fold for i, n in enumerate(self.nodes)
                if n.fold is not None}

    def pivot_indices(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.kind == KIND_PIVOT]

    def chain_configs(self) -> Iterator[tuple[int, Config]]:
        """All compressed-away transient configurations, tagged with the
        child node whose incoming edge absorbed them."""
        for i, n in enumerate(self.nodes):
            if n.branch is not None:
                for c in n.branch.chain:
                    yield i, c


@dataclass
class ScpReport:
    generalizations_attempted: int
    pivots: list[Config]
    node_count: int
    fold_count: int
    whistle_pairs: list[tuple[int, int]] = field(default_factory=list)


def head_fn(cfg: Config) -> Optional[str]:
    return cfg.expr.fn if isinstance(cfg.expr, Call) else None


# --- homeomorphic embedding --------------------------------------------------

def _embed(s: Expr, t: Expr) -> bool:
    if isinstance(s, SymParam):
        return isinstance(t, SymParam)
    if isinstance(s, ListParam):
        return isinstance(t, ListParam)
    # coupling
    if isinstance(s, Sym) and isinstance(t, Sym) and s.ch == t.ch:
        return True
    if isinstance(s, Nil) and isinstance(t, Nil):
        return True
    if isinstance(s, Cons) and isinstance(t, Cons) \
            and _embed(s.head, t.head) and _embed(s.tail, t.tail):
        return True
    if not isinstance(s, (Sym, Nil, Cons)) and s == t:
        return True
    # diving
    if isinstance(t, Cons):
        return _embed(s, t.head) or _embed(s, t.tail)
    return False


def embeds(c1: Config, c2: Config) -> bool:
    """Does c1 homeomorphically embed in c2?

    Calls couple only with the same head function, argument-wise; a parameter
    embeds in any parameter of the same kind and in nothing else; a literal
    embeds in an equal literal; restrictions are ignored.
    """
    e1, e2 = c1.expr, c2.expr
    if isinstance(e1, Call) and isinstance(e2, Call):
        return (e1.fn == e2.fn and len(e1.args) == len(e2.args)
                and all(_embed(a, b) for a, b in zip(e1.args, e2.args)))
    if isinstance(e1, Call) or isinstance(e2, Call):
        return False
    return _embed(e1, e2)


# --- graph construction ------------------------------------------------------

def supercompile(program: Program, entry: Config,
                 node_budget: int = 10_000) -> tuple[ProcessGraph, ScpReport]:
    """Build the folded process graph of the program for the given entry.

    Terminates with every leaf passive, folded, or diagnostic; raises
    NodeBudgetError past `node_budget` nodes.
    """
    if not entry.is_active():
        raise ScpError("entry configuration must be active")
    names = NameGen.for_exprs(entry.expr)
    graph = ProcessGraph([Node(entry)])
    report = ScpReport(0, [], 0, 0)
    stack = [0]
    while stack:
        i = stack.pop()
        node = graph.nodes[i]
        cfg = node.config
        if not cfg.is_active():
            node.kind = KIND_PASSIVE
            continue
        fn = head_fn(cfg)
        folded = False
        for a in graph.ancestors(i):
            anc = graph.nodes[a].config
            if head_fn(anc) != fn:
                continue
            sigma = covers(anc, cfg)
            if sigma is not None:
                node.fold = (a, sigma)
                node.kind = KIND_FOLDED
                report.fold_count += 1
                folded = True
                break
        if folded:
            continue
        whistled = False
        for a in graph.ancestors(i):
            anc = graph.nodes[a].config
            if head_fn(anc) != fn:
                continue
            if embeds(anc, cfg):
                node.kind = KIND_DIAGNOSTIC
                report.generalizations_attempted += 1
                report.whistle_pairs.append((a, i))
                whistled = True
                break
        if whistled:
            continue
        branches = [compress(program, b, names)
                    for b in drive_step(program, cfg, names)]
        node.kind = KIND_PIVOT if len(branches) >= 2 else KIND_TRANSIENT
        if node.kind == KIND_PIVOT:
            report.pivots.append(cfg)
        child_ids = []
        for b in branches:
            if len(graph.nodes) >= node_budget:
                raise NodeBudgetError(
                    f"process graph exceeded {node_budget} nodes")
            graph.nodes.append(Node(b.child, parent=i, branch=b))
            child_ids.append(len(graph.nodes) - 1)
        node.children = child_ids
        stack.extend(reversed(child_ids))
    report.node_count = len(graph.nodes)
    return graph, report


def first_path(graph: ProcessGraph) -> list[int]:
    """Node indices along the lowest-rule-index path from the root to its
    passive leaf; raises FirstPathError if the path hits a fold or
    diagnostic."""
    path = [graph.root]
    while True:
        node = graph.nodes[path[-1]]
        if node.kind == KIND_PASSIVE:
            return path
        if node.kind in (KIND_FOLDED, KIND_DIAGNOSTIC) or not node.children:
            raise FirstPathError(
                f"first path blocked at node {path[-1]} ({node.kind})")
        path.append(node.children[0])


def first_path_pivots(graph: ProcessGraph) -> list[Config]:
    """Pivot configurations along the first path, in order."""
    return [graph.nodes[i].config for i in first_path(graph)
            if graph.nodes[i].kind == KIND_PIVOT]


# --- entries and exports -----------------------------------------------------

def matcher_entry(pattern: str) -> tuple[Program, Config]:
    """The naive matcher applied to a static pattern and a dynamic string."""
    if not pattern:
        raise EmptyPatternError("pattern must be nonempty")
    program = naive_matcher()
    entry = make_config(Call("S", (word(pattern), ListParam("y"))))
    return program, entry


def specialize_pattern(pattern: str, program: Optional[Program] = None,
                       node_budget: int = 10_000
                       ) -> tuple[ProcessGraph, ScpReport]:
    if program is None:
        program, entry = matcher_entry(pattern)
    else:
        if not pattern:
            raise EmptyPatternError("pattern must be nonempty")
        entry = make_config(Call("S", (word(pattern), ListParam("y"))))
    return supercompile(program, entry, node_budget)


def graph_lines(graph: ProcessGraph) -> list[str]:
    """Line-oriented dump: one node per line, then tree and fold edges."""
    out = []
    for i, n in enumerate(graph.nodes):
        mark = " root" if i == graph.root else ""
        out.append(f"node {i} {n.kind}{mark} {config_text(n.config)}")
    for i, n in enumerate(graph.nodes):
        for c in n.children:
            b = graph.nodes[c].branch
            out.append(f"edge {i} -> {c} rule {b.narrowing.rule_index} "
                       f"[{b.narrowing!r}] steps={b.steps}")
    for i, n in enumerate(graph.nodes):
        if n.fold is not None:
            t, sigma = n.fold
            out.append(f"fold {i} ..> {t} [{renaming_text(sigma)}]")
    return out
