import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctrs_nonconf.cops import (
    CopsArityError,
    CopsError,
    CopsSyntaxError,
    UnsupportedConditionType,
    VariableLhsError,
    parse_cops,
    parse_document,
    print_cops,
)
from ctrs_nonconf.ctrs import Ctrs, Rule
from ctrs_nonconf.terms import Var, const, fn

from conftest import fixture_path
from generators import random_ctrs, seeds

x, y, z, z2 = Var("x"), Var("y"), Var("z"), Var("z'")
zero = const("0")

EXAMPLE3 = (
    "(CONDITIONTYPE ORIENTED)(VAR x y z z')(RULES +(0,y) -> y  +(s(x),y) -> +(x,s(y))  "
    "f(x,y) -> z | +(x,y) == +(z,z'))"
)


def example3_system():
    return Ctrs(
        (
            Rule(fn("+", zero, y), y),
            Rule(fn("+", fn("s", x), y), fn("+", x, fn("s", y))),
            Rule(fn("f", x, y), z, ((fn("+", x, y), fn("+", z, z2)),)),
        )
    )


def test_parse_example3():
    assert parse_cops(EXAMPLE3.encode()) == example3_system()


def test_parse_empty_system():
    assert parse_cops(b"(VAR)(RULES )").rules == ()


def test_parse_variable_lhs_rejected():
    with pytest.raises(VariableLhsError):
        parse_cops(b"(RULES x -> a)")


def test_declared_variable_lhs_rejected_with_position():
    with pytest.raises(VariableLhsError) as info:
        parse_cops(b"(VAR x)\n(RULES\n  x -> a\n)")
    assert (info.value.line, info.value.column) == (3, 3)


def test_arity_inconsistency():
    with pytest.raises(CopsArityError):
        parse_cops(b"(VAR x)(RULES f(x) -> f(x,x))")


def test_unsupported_condition_type():
    with pytest.raises(UnsupportedConditionType):
        parse_cops(b"(CONDITIONTYPE JOIN)(VAR x)(RULES f(x) -> x | x == a)")


def test_conditional_rules_need_condition_type():
    with pytest.raises(CopsSyntaxError):
        parse_cops(b"(VAR x)(RULES f(x) -> x | x == a)")
    assert len(parse_cops(b"(VAR x)(RULES f(x) -> x)").rules) == 1


@pytest.mark.parametrize(
    "text",
    [b"(RULES f(x -> a)", b"(VAR x)(RULES f(x) ->)", b"(RULES a -> b", b"(FOO)", b"\xff\xfe", b""],
)
def test_syntax_errors_carry_position(text):
    try:
        parse_cops(text)
    except CopsError as exc:
        assert exc.line >= 1 and exc.column >= 1
    else:
        assert text == b""  # an empty document is the empty system


def test_sections_any_order_and_comment_kept():
    doc = parse_document(b"(COMMENT hello (nested) world)(RULES f(x) -> x)(VAR x)")
    assert doc.comment is not None and "nested" in doc.comment
    assert doc.system.rules == (Rule(fn("f", x), x),)


def test_newline_agnostic():
    crlf = EXAMPLE3.replace(" ", "\r\n").replace("(VAR\r\n", "(VAR ")
    assert parse_cops(crlf.encode()) == example3_system()


def test_fixtures_parse():
    for n, count in ((320, 2), (271, 4), (262, 3)):
        assert len(parse_cops(fixture_path(n).read_bytes()).rules) == count


def test_print_example3_round_trips():
    R = example3_system()
    assert parse_cops(print_cops(R)) == R


def test_print_empty_system():
    assert print_cops(Ctrs(())) == "(CONDITIONTYPE ORIENTED)\n(VAR )\n(RULES\n)"


def test_print_preserves_rule_and_condition_order():
    R = Ctrs(
        (
            Rule(const("b"), const("a"), ((const("c"), const("d")), (const("a"), const("c")))),
            Rule(const("a"), const("b")),
        )
    )
    again = parse_cops(print_cops(R))
    assert again == R
    assert again.rules[0].conditions == R.rules[0].conditions


@settings(max_examples=200)
@given(seeds())
def test_parse_print_round_trip(seed):
    R = random_ctrs(random.Random(seed))
    assert parse_cops(print_cops(R)) == R


@settings(max_examples=300)
@given(st.binary(max_size=80))
def test_parser_total_on_bytes(data):
    try:
        parse_cops(data)
    except CopsError as exc:
        assert exc.line >= 1 or str(exc)


@settings(max_examples=300)
@given(st.text(alphabet="()|,\"-> =\nfxyVARULESCONDITYP", max_size=60))
def test_parser_total_on_token_soup(text):
    try:
        parse_cops(text)
    except CopsError:
        pass
