import random

import pytest
from hypothesis import given, settings

from ctrs_nonconf.ctrs import Ctrs, RewriteSequence, Rule, validate_sequence
from ctrs_nonconf.narrowing import (
    NarrowConfig,
    narrow_sequences,
    narrow_step,
    to_rewrite_sequence,
)
from ctrs_nonconf.nonconfluence import method_narrowing
from ctrs_nonconf.terms import Var, apply, const, fn, fresh_scope, var_set

from generators import bounded_narrowing, random_ctrs, random_term, seeds
from oracles import canonical_vars

a, b, c = const("a"), const("b"), const("c")
x, y = Var("x"), Var("y")
xp, yp = Var("x'"), Var("y'")
zero = const("0")


def plus(u, v):
    return fn("+", u, v)


# -- single steps -----------------------------------------------------------------


def _root_steps(cops262):
    with fresh_scope():
        return [
            (t, st) for t, st in narrow_step(fn("f", xp, yp), cops262, NarrowConfig()) if st.rule_index == 2
        ]


def test_step_with_zero_step_condition_solution(cops262):
    steps = _root_steps(cops262)
    direct = [(t, st) for t, st in steps if len(st.condition_solutions[0]) == 0]
    assert len(direct) == 1
    target, step = direct[0]
    assert isinstance(target, Var)
    assert step.position == ()
    # the condition's two sides were unified directly, binding nothing to a constant
    assert not any(isinstance(apply(v, step.unifier), type(zero)) for v in (xp, yp))


def test_step_with_one_step_condition_solution(cops262):
    steps = _root_steps(cops262)
    one = [(t, st) for t, st in steps if len(st.condition_solutions[0]) == 1]
    assert one
    target, step = one[0]
    assert isinstance(target, Var)
    sol = step.condition_solutions[0]
    assert sol.steps[0].rule_index == 0
    assert apply(xp, step.unifier) == zero


def test_condition_solutions_fewest_steps_first(cops262):
    lengths = [len(st.condition_solutions[0]) for _, st in _root_steps(cops262)]
    assert lengths == sorted(lengths)


def test_variable_does_not_narrow(cops262):
    assert narrow_step(x, cops262, NarrowConfig()) == []


def test_rule_variant_disjoint_from_source(cops262):
    s = fn("f", x, y)
    for _, st in narrow_step(s, cops262, NarrowConfig()):
        assert not set(st.variant.variables()) & var_set(s)


# -- sequences --------------------------------------------------------------------


def test_sequences_of_ground_chain():
    R = Ctrs((Rule(a, b), Rule(b, c)))
    seqs = narrow_sequences(a, R, NarrowConfig(max_length=2))
    assert [seq.end for seq in seqs] == [a, b, c]
    assert [len(seq) for seq in seqs] == [0, 1, 2]


def test_ground_normal_form_only_empty(cops262):
    seqs = narrow_sequences(fn("s", zero), cops262)
    assert len(seqs) == 1 and seqs[0].steps == ()


def test_both_forks_present(cops262):
    with fresh_scope():
        seqs = narrow_sequences(fn("f", xp, yp), cops262)
    one_step = [s for s in seqs if len(s) == 1 and s.steps[0].rule_index == 2]
    cond_lengths = {len(s.steps[0].condition_solutions[0]) for s in one_step}
    assert {0, 1} <= cond_lengths


def test_composed_substitution_is_left_to_right():
    R = Ctrs((Rule(fn("g", a), fn("h", x)), Rule(fn("h", b), c)))
    with fresh_scope():
        seqs = narrow_sequences(fn("g", y), R, NarrowConfig(max_length=2))
    two = [s for s in seqs if len(s) == 2]
    assert len(two) == 1
    seq = two[0]
    assert apply(y, seq.composed_substitution) == a
    assert seq.end == c


@pytest.mark.parametrize("cfg", [NarrowConfig(), NarrowConfig(1, 1, 1)])
def test_config_bounds_positive(cfg):
    assert min(cfg.max_length, cfg.max_level, cfg.condition_max_length) >= 1


def test_config_rejects_zero():
    with pytest.raises(ValueError):
        NarrowConfig(max_length=0)


# -- translation to rewriting -------------------------------------------------------


def test_empty_sequence_translation():
    R = Ctrs((Rule(a, b),))
    seq = narrow_sequences(fn("f", x, x), R)[0]
    closing = {"x": a}
    assert to_rewrite_sequence(seq, closing) == RewriteSequence(fn("f", a, a))


def test_example_fork_translates_to_justified_steps(cops262):
    w = method_narrowing(cops262)
    assert w is not None
    R = w.system
    x3, x4 = w.peak.args[1].args
    assert canonical_vars(w.peak) == canonical_vars(fn("f", zero, plus(Var("p"), Var("q"))))
    by_end = {}
    for seq in (w.left, w.right):
        assert validate_sequence(R, seq)
        assert len(seq) == 1 and seq.steps[0].rule_index == 2
        by_end[seq.end(R)] = seq
    assert set(by_end) == {zero, x3}
    ground_just = by_end[zero].steps[0].condition_justifications[0]
    assert len(ground_just) == 0
    var_just = by_end[x3].steps[0].condition_justifications[0]
    assert var_just.start == plus(zero, plus(x3, x4))
    assert len(var_just) == 1 and var_just.steps[0].rule_index == 0
    assert var_just.end(R) == plus(x3, x4)


def test_translation_validates_on_fixture(cops262):
    cfg = NarrowConfig()
    with fresh_scope():
        seqs = narrow_sequences(fn("f", x, y), cops262, cfg)
    assert len(seqs) > 3
    for seq in seqs:
        rw = to_rewrite_sequence(seq)
        assert validate_sequence(cops262, rw)
        assert rw.start == seq.instantiated_start
        assert rw.end(cops262) == seq.end


# -- properties -------------------------------------------------------------------


def _starts(R, rng):
    return [rule.lhs for rule in R.rules] + [random_term(rng, 2)]


@settings(max_examples=100, deadline=None)
@given(seeds())
def test_translation_is_sound(seed):
    rng = random.Random(seed)
    R = random_ctrs(rng)
    for start in _starts(R, rng):
        seqs = bounded_narrowing(start, R) or []
        for seq in seqs:
            closing = {v: random_term(rng, 1) for v in var_set(seq.instantiated_start, seq.end)}
            for sub in ({}, closing):
                rw = to_rewrite_sequence(seq, sub)
                assert validate_sequence(R, rw), (seed, start)
                assert rw.end(R) == apply(seq.end, sub)


def _all_steps(seq):
    for st in seq.steps:
        yield st
        for sol in st.condition_solutions:
            yield from _all_steps(sol)


@settings(max_examples=100, deadline=None)
@given(seeds())
def test_rule_variants_are_fresh(seed):
    rng = random.Random(seed)
    R = random_ctrs(rng)
    for start in _starts(R, rng):
        seqs = bounded_narrowing(start, R) or []
        for seq in seqs:
            seen = set(var_set(start))
            for st in seq.steps:
                variant_vars = set(st.variant.variables())
                assert not variant_vars & seen
                seen |= variant_vars | var_set(st.target)
            for st in _all_steps(seq):
                for sol in st.condition_solutions:
                    for inner in sol.steps:
                        assert not set(inner.variant.variables()) & set(st.variant.variables())


def _shape(seq):
    return (
        tuple((st.position, st.rule_index) for st in seq.steps),
        canonical_vars(seq.instantiated_start, *seq.terms()),
    )


@settings(max_examples=60, deadline=None)
@given(seeds())
def test_larger_bounds_keep_sequences(seed):
    rng = random.Random(seed)
    R = random_ctrs(rng, max_rules=3)
    start = R.rules[0].lhs
    small = NarrowConfig(2, 1, 1)
    for big in (NarrowConfig(3, 1, 1), NarrowConfig(2, 2, 1), NarrowConfig(2, 1, 2)):
        few, many = bounded_narrowing(start, R, small), bounded_narrowing(start, R, big)
        if few is None or many is None:
            continue
        assert {_shape(s) for s in few} <= {_shape(s) for s in many}
