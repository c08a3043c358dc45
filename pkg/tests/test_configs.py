import itertools
import random

from miniscp.configs import (
    Config, EMPTY, UNSAT, alpha_equivalent, apply_to_restriction, covers,
    entails, make_config, prune, restriction, satisfiable,
)
from miniscp.syntax import (
    ListParam, Sym, SymParam, parse_expression, substitute, word,
)


def sp(name):
    return SymParam(name)


def lp(name):
    return ListParam(name)


def cfg(text, pairs=()):
    return make_config(parse_expression(text), restriction(pairs))


# --- satisfiable -------------------------------------------------------------

def test_satisfiable_single_disequality():
    assert satisfiable(restriction([(sp("a"), Sym("a"))]))


def test_self_contradiction_unsatisfiable():
    assert not satisfiable(restriction([(Sym("a"), Sym("a"))]))
    assert not satisfiable(restriction([(sp("a"), sp("a"))]))


def test_open_alphabet_many_exclusions_satisfiable():
    r = restriction([(sp("a"), Sym("a")), (sp("a"), Sym("b"))])
    assert satisfiable(r)


def test_satisfiable_stable_under_renaming():
    r = restriction([(sp("a"), Sym("x")), (sp("a"), sp("b"))])
    renamed = apply_to_restriction(r, {sp("a"): sp("u"), sp("b"): sp("v")})
    assert satisfiable(r) == satisfiable(renamed)


def test_normalization_idempotent():
    pairs = [(Sym("a"), sp("c")), (sp("c"), Sym("a")), (Sym("a"), Sym("b"))]
    once = restriction(pairs)
    again = restriction(once.diseqs)
    assert once == again
    assert len(once.diseqs) == 1  # duplicates merged, literal pair dropped


# --- entails -----------------------------------------------------------------

def test_entails_subset():
    r2 = restriction([(sp("a"), Sym("a")), (sp("t"), Sym("b"))])
    r1 = restriction([(sp("a"), Sym("a"))])
    assert entails(r2, r1, {sp("a"): sp("a")})


def test_entails_nothing_implies_constraint():
    r1 = restriction([(sp("a"), Sym("a"))])
    assert not entails(EMPTY, r1, {sp("a"): sp("a")})


def test_entails_distinct_literals_vacuous():
    r1 = restriction([(Sym("a"), Sym("b"))])
    assert r1 == EMPTY  # normalized away
    assert entails(EMPTY, r1, {})


def test_entails_reflexive_under_identity():
    rng = random.Random(3)
    letters = "abc"
    for _ in range(50):
        pairs = []
        for _ in range(rng.randint(0, 4)):
            p = sp(rng.choice("uvw"))
            pairs.append((p, Sym(rng.choice(letters))))
        r = restriction(pairs)
        ident = {p: p for p in r.params()}
        assert entails(r, r, ident)


def test_entails_monotone_in_left_argument():
    rng = random.Random(4)
    for _ in range(50):
        base = [(sp(rng.choice("uv")), Sym(rng.choice("abc")))
                for _ in range(rng.randint(0, 3))]
        extra = [(sp(rng.choice("uvw")), Sym(rng.choice("abc")))
                 for _ in range(rng.randint(0, 3))]
        r1 = restriction(base)
        r2 = restriction(base)
        bigger = restriction(base + extra)
        ident = {p: p for p in r1.params()}
        if entails(r2, r1, ident):
            assert entails(bigger, r1, ident)


def test_unsat_left_entails_everything():
    r1 = restriction([(sp("a"), Sym("a"))])
    assert entails(UNSAT, r1, {sp("a"): sp("a")})


# --- covers ------------------------------------------------------------------

def test_covers_identity_up_to_renaming():
    c1 = cfg('S("aab", #y)')
    c2 = cfg('S("aab", #z)')
    assert covers(c1, c2) == {lp("y"): lp("z")}


def test_covers_with_vacuous_dead_constraint():
    # arises on the fold-back edge while specializing "aab": the folded
    # node's restriction mentions only a parameter absent from the target
    c1 = cfg('L("b", #y, "aab", \'a\':#y)')
    c2 = make_config(parse_expression('L("b", #w, "aab", \'a\':#w)'),
                     restriction([(sp("c"), Sym("b"))]))
    assert covers(c1, c2) == {lp("y"): lp("w")}


def test_covers_never_maps_parameter_to_compound():
    c1 = cfg('L("ab", #y, "aab", #y)')
    c2 = cfg('L("ab", #s.c:#w, "aab", #s.c:#w)', [(sp("c"), Sym("b"))])
    assert covers(c1, c2) is None


def test_covers_respects_repeated_parameters():
    c1 = cfg('L("ab", #y, "aab", #z)')
    c2 = cfg('L("ab", #w, "aab", #w)')
    # distinct parameters may not merge: the map would not be injective
    assert covers(c1, c2) is None
    # the repeated side does cover the split side? no: repeated must stay
    assert covers(c2, c1) is None


def test_covers_requires_entailment():
    c1 = cfg('S("ab", #s.c:#y)', [(sp("c"), Sym("a"))])
    c2 = cfg('S("ab", #s.d:#w)')
    assert covers(c1, c2) is None  # empty restriction does not entail c != a
    c3 = cfg('S("ab", #s.d:#w)', [(sp("d"), Sym("a")), (sp("d"), Sym("b"))])
    assert covers(c1, c3) == {sp("c"): sp("d"), lp("y"): lp("w")}


def _ground_instances(config: Config, letters="abc", max_tail=3):
    """All ground assignments of the configuration's parameters."""
    params = config.params()
    words = [""]
    for n in range(1, max_tail + 1):
        words.extend("".join(t) for t in itertools.product(letters, repeat=n))
    pools = []
    for p in params:
        pools.append([Sym(c) for c in letters] if isinstance(p, SymParam)
                     else [word(w) for w in words])
    for combo in itertools.product(*pools):
        yield dict(zip(params, combo))


def _satisfies(config: Config, env) -> bool:
    for t1, t2 in config.restriction.diseqs:
        v1 = env.get(t1, t1)
        v2 = env.get(t2, t2)
        if v1 == v2:
            return False
    return True


def test_covers_soundness_on_ground_instances():
    c1 = cfg('L("ab", #y, "ab", #s.c:#z)', [(sp("c"), Sym("a"))])
    c2 = cfg('L("ab", #w, "ab", #s.d:#v)',
             [(sp("d"), Sym("a")), (sp("d"), Sym("b"))])
    sigma = covers(c1, c2)
    assert sigma is not None
    c1_instances = {
        substitute(c1.expr, env)
        for env in _ground_instances(c1) if _satisfies(c1, env)}
    for env in _ground_instances(c2):
        if not _satisfies(c2, env):
            continue
        ground = substitute(c2.expr, env)
        assert ground in c1_instances


def test_alpha_equivalent():
    assert alpha_equivalent(cfg('S("ab", #y)'), cfg('S("ab", #q)'))
    assert not alpha_equivalent(cfg('S("ab", #y)'), cfg('S("ba", #q)'))
    assert not alpha_equivalent(cfg('S("ab", #y)'), cfg('S("ab", #s.c:#q)'))


def test_prune_drops_dead_parameters_only():
    r = restriction([(sp("c"), Sym("a")), (sp("d"), Sym("b"))])
    kept = prune(r, {sp("c")})
    assert kept == restriction([(sp("c"), Sym("a"))])


def test_make_config_prunes_dead_restriction():
    c = make_config(parse_expression('S("ab", #y)'),
                    restriction([(sp("c"), Sym("a"))]))
    assert c.restriction == EMPTY
