import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctrs_nonconf.ctrs import Rule
from ctrs_nonconf.terms import (
    App,
    PositionError,
    Var,
    apply,
    compose,
    const,
    fn,
    fresh_scope,
    function_positions,
    is_idempotent,
    match_term,
    positions,
    rename,
    rename_apart,
    replace_at,
    restrict,
    subterm_at,
    unify,
    var_set,
    variables,
)

from generators import SIGNATURE, substitutions, terms
from oracles import ground_terms

x, y, z = Var("x"), Var("y"), Var("z")
x1, x2, x3, x4 = (Var(f"x{i}") for i in range(1, 5))
zero = const("0")


def plus(a, b):
    return fn("+", a, b)


def test_unify_example3_mgu():
    mu = unify(fn("f", x1, x2), fn("f", zero, plus(x3, x4)))
    assert mu == {"x1": zero, "x2": plus(x3, x4)}


def test_unify_variable_against_term():
    assert unify(x, fn("f", y)) == {"x": fn("f", y)}


def test_unify_occurs_check():
    assert unify(x, fn("f", x)) is None


def test_unify_clash_and_arity():
    assert unify(fn("f", x), fn("g", x)) is None
    assert unify(const("a"), const("b")) is None


def test_unify_with_prior_bindings():
    mu = unify(fn("f", x, y), fn("f", const("a"), x), {"z": x})
    assert mu is not None and apply(z, mu) == const("a")


def test_match_examples():
    assert match_term(plus(zero, y), plus(zero, fn("s", zero))) == {"y": fn("s", zero)}
    assert match_term(fn("h", x, x), fn("h", const("a"), const("b"))) is None
    assert match_term(x, fn("f", y)) == {"x": fn("f", y)}


def test_match_respects_fixed_bindings():
    assert match_term(fn("g", x), fn("g", const("a")), {"x": const("b")}) is None
    assert match_term(fn("h", x, x), fn("h", x, x)) == {"x": x}
    assert match_term(fn("g", y), fn("g", x), {"y": y}) is None
    assert match_term(fn("h", x, x), fn("h", x, y)) is None


def test_apply_examples():
    assert apply(fn("h", x, x), {"x": y}) == fn("h", y, y)
    assert apply(fn("f", x), {}) == fn("f", x)
    assert apply(x, {"x": fn("g", x)}) == fn("g", x)


def test_positions_and_replacement():
    t = fn("p", fn("q", fn("h", z)))
    assert subterm_at(t, (1,)) == fn("q", fn("h", z))
    assert replace_at(t, (1,), fn("r", z)) == fn("p", fn("r", z))
    assert replace_at(const("a"), (), const("b")) == const("b")
    assert positions(t) == [(), (1,), (1, 1), (1, 1, 1)]
    assert function_positions(fn("f", x, const("a"))) == [(), (2,)]


@pytest.mark.parametrize("p", [(2,), (1, 1, 1, 1), (0,)])
def test_invalid_positions(p):
    t = fn("p", fn("q", fn("h", z)))
    with pytest.raises(PositionError):
        subterm_at(t, p)
    with pytest.raises(PositionError):
        replace_at(t, p, z)


def test_rename_apart_rule():
    rule = Rule(const("A"), fn("h", x, x))
    with fresh_scope():
        renamed, ren = rename_apart(rule, {"x"})
    assert set(ren) == {"x"} and ren["x"] != "x"
    assert renamed == Rule(const("A"), fn("h", Var(ren["x"]), Var(ren["x"])))


def test_rename_apart_without_clash_is_identity():
    rule = Rule(fn("f", x, y), z, ((plus(x, y), plus(z, Var("z'"))),))
    renamed, ren = rename_apart(rule, set())
    assert renamed == rule and ren == {}


def test_rename_apart_twice_gives_disjoint_variants():
    rule = Rule(fn("f", x, y), z)
    avoid = {"x"}
    first, _ = rename_apart(rule, avoid)
    avoid |= set(first.variables())
    second, _ = rename_apart(rule, avoid)
    assert not set(first.variables()) & set(second.variables())


def test_variables_first_occurrence_order():
    assert variables(fn("f", y, fn("g", x), y)) == ["y", "x"]


# -- properties --------------------------------------------------------------


@given(terms(), terms())
def test_mgu_unifies_and_is_idempotent(s, t):
    mu = unify(s, t)
    if mu is not None:
        assert apply(s, mu) == apply(t, mu)
        assert is_idempotent(mu)
        assert all(v != Var(k) for k, v in mu.items())


@given(terms(), terms(), substitutions())
def test_mgu_is_most_general(s, t, sigma):
    # any unifier factors through the mgu
    if apply(s, sigma) != apply(t, sigma):
        return
    mu = unify(s, t)
    assert mu is not None
    for name in var_set(s, t):
        assert apply(apply(Var(name), mu), sigma) == apply(Var(name), sigma)


_SMALL_SIG = {"a": 0, "g": 1, "f": 2}
_UNIVERSE = ground_terms({"a": 0, "g": 1}, 2) + [App("f", (App("a", ()), App("a", ())))]


@settings(max_examples=150)
@given(terms(max_leaves=4, names=("x", "y"), symbols=_SMALL_SIG), terms(max_leaves=4, names=("x", "y"), symbols=_SMALL_SIG))
def test_unify_complete_against_brute_force(s, t):
    names = sorted(var_set(s, t))
    found = None
    for values in itertools.product(_UNIVERSE, repeat=len(names)):
        sigma = dict(zip(names, values))
        if apply(s, sigma) == apply(t, sigma):
            found = sigma
            break
    mu = unify(s, t)
    if found is not None:
        assert mu is not None
    if mu is None:
        assert found is None


@given(terms(), substitutions())
def test_match_recovers_substitution(p, sigma):
    m = match_term(p, apply(p, sigma))
    assert m is not None
    assert m == restrict(sigma, var_set(p)) | {k: v for k, v in m.items() if k not in sigma}
    assert apply(p, m) == apply(p, sigma)


@given(terms(), st.sets(st.sampled_from(["x", "y", "z", "w"])))
def test_rename_apart_avoids_and_reproduces(t, avoid):
    renamed, ren = rename_apart(t, avoid)
    assert not var_set(renamed) & avoid
    assert rename(t, ren) == renamed


@given(terms(), substitutions(), substitutions())
def test_compose_matches_sequential_application(t, a, b):
    assert apply(t, compose(a, b)) == apply(apply(t, a), b)


@given(terms())
def test_replace_at_own_subterm_is_identity(t):
    for p in positions(t):
        assert replace_at(t, p, subterm_at(t, p)) == t


def test_signature_fixture_sane():
    assert SIGNATURE["f"] == 2
