"""The verification facets must reject broken inputs, not just accept good
ones.  Each test hands a check something subtly wrong and expects a failure.
"""

import random

import pytest

from miniscp.configs import make_config
from miniscp.harness import (
    CheckFailure, _automaton_facts, _first_path_facts, artifacts,
    replay_graph,
)
from miniscp.residual import (
    ResidualProgram, structural_report_program, transition,
)
from miniscp.scp import specialize_pattern
from miniscp.syntax import (
    Call, ListParam, Program, TRUE, parse_program, word,
)
from miniscp.harness import PatternArtifacts
from miniscp.interpreter import CompiledProgram, naive_matcher


def _swap_entry_rules(program: Program) -> Program:
    """Reorder the entry function's first two rules (breaks the disequality
    encoding)."""
    (name, rules), *rest = program.functions
    swapped = (rules[1], rules[0]) + rules[2:]
    return Program(((name, swapped),) + tuple(rest))


def test_structural_check_sees_constants():
    # a residual-shaped program that smuggles a constant into a call
    bad = parse_program("F_0 { 'a':y = F_0('a':y); Nil = F; s.c:y = F_0(y); }")
    rep = structural_report_program(bad)
    assert rep.constants_in_rhs >= 1


def test_structural_check_sees_repeats():
    bad = parse_program("G { s.a:y = H(y, y); Nil = F; } "
                        "H { x, y = T; }")
    rep = structural_report_program(bad)
    assert rep.repeated_params_in_rhs >= 2


def test_structural_check_sees_deep_patterns():
    bad = parse_program("F_0 { 'a':'b':y = T; s.c:y = F_0(y); Nil = F; }")
    rep = structural_report_program(bad)
    assert rep.max_lhs_cons_depth == 2


def test_automaton_check_rejects_swapped_rules():
    art = artifacts("ab")
    broken = ResidualProgram(_swap_entry_rules(art.residual.program),
                             art.residual.provenance, art.residual.entry)
    fake = PatternArtifacts("ab", art.graph, art.report, broken,
                            CompiledProgram(broken.program),
                            CompiledProgram(naive_matcher()))
    with pytest.raises(CheckFailure):
        _automaton_facts(fake)


def test_first_path_check_rejects_wrong_pattern():
    # the graph for "ab" does not satisfy the expectations for "ba"
    art = artifacts("ab")
    fake = PatternArtifacts("ba", art.graph, art.report, art.residual,
                            art.runner, art.naive_runner)
    with pytest.raises(CheckFailure):
        _first_path_facts(fake)


def test_transition_walk_rejects_rejecting_symbol_rules():
    bad = parse_program("F_0 { 'a':y = F; s.c:y = F_0(y); Nil = F; }")
    rp = ResidualProgram(
        bad, {"F_0": make_config(Call("S", (word("a"), ListParam("y"))))},
        "F_0")
    from miniscp.residual import ResidualError
    with pytest.raises(ResidualError):
        transition(rp, "F_0", "a")


def test_replay_detects_overlapping_branches():
    # duplicate the first branch of the root: two branches now admit the
    # same instances, which replay must flag
    graph, _ = specialize_pattern("ab")
    root = graph.nodes[graph.root]
    root.children = [root.children[0]] + root.children
    with pytest.raises(CheckFailure, match="branches admit"):
        replay_graph(graph, {ListParam("y"): word("ab")})


def test_differential_driving_on_random_patterns():
    """Replaying the process graph must agree with the interpreter on random
    patterns and strings (exhaustive small strings would be too slow here)."""
    from miniscp.interpreter import naive_search
    rng = random.Random(20)
    for _ in range(25):
        n = rng.randint(1, 8)
        pattern = "".join(rng.choice("abc") for _ in range(n))
        graph, report = specialize_pattern(pattern)
        assert report.generalizations_attempted == 0, pattern
        alphabet = sorted(set(pattern)) + ["d"]
        for _ in range(40):
            y = "".join(rng.choice(alphabet)
                        for _ in range(rng.randint(0, 30)))
            verdict = replay_graph(graph, {ListParam("y"): word(y)})
            assert (verdict == TRUE) == naive_search(pattern, y), (pattern, y)
