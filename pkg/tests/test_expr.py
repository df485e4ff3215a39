import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanform.errors import EvalDomainError, ParseError
from meanform.shifts.expr import (
    FUNCTIONS,
    BinOp,
    Call,
    Const,
    Index,
    Neg,
    evaluate,
    parse_weight_expr,
    substitute_shift,
    to_source,
)


def test_alternating_rule():
    ast = parse_weight_expr("2+(-1)^i")
    assert evaluate(ast, [0, 1, 2]).tolist() == [3.0, 1.0, 3.0]


def test_decreasing_rule():
    vals = evaluate(parse_weight_expr("1+1/(i+1)"), np.arange(1000))
    assert vals[0] == 2.0
    assert np.all(np.diff(vals) < 0) and np.all(vals > 1)


def test_precedence_and_associativity():
    ev = lambda s: float(evaluate(parse_weight_expr(s), 0))
    assert ev("-2^2") == -4.0
    assert ev("2^3^2") == 512.0
    assert ev("8/4/2") == 1.0
    assert ev("1-2-3") == -4.0
    assert ev("2*-3") == -6.0
    assert ev("(-2)^2") == 4.0
    assert ev("--3") == 3.0
    assert ev("1e2+.5") == 100.5


def test_parse_error_offset():
    with pytest.raises(ParseError) as info:
        parse_weight_expr("2+*3")
    assert info.value.offset == 2
    assert "at offset 2" in str(info.value)
    assert "i" in info.value.expected and "(" in info.value.expected


@pytest.mark.parametrize("text,offset", [("", 0), ("(1+2", 4), ("foo(i)", 0), ("1 $ 2", 2),
                                         ("sqrt 2", 5), ("2 3", 2)])
def test_parse_error_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse_weight_expr(text)
    assert info.value.offset == offset


def test_byte_offsets_count_utf8():
    with pytest.raises(ParseError) as info:
        parse_weight_expr("1+é")
    assert info.value.offset == 2
    with pytest.raises(ParseError) as info:
        parse_weight_expr("é")
    assert info.value.offset == 0


@pytest.mark.parametrize("text", ["1/(i-3)", "log(i-2)", "sqrt(1-i)", "(-2)^0.5", "0^(-1)",
                                  "(i-1)^(0-2)"])
def test_domain_errors(text):
    with pytest.raises(EvalDomainError):
        evaluate(parse_weight_expr(text), np.arange(5))


def test_functions():
    ev = lambda s, i: float(evaluate(parse_weight_expr(s), i))
    assert ev("exp(0)+log(1)+sqrt(4)+abs(-3)", 0) == 6.0
    assert ev("abs(i-5)", 2) == 3.0


def test_substitute_shift():
    ast = parse_weight_expr("2+(-1)^i")
    shifted = substitute_shift(ast, 1)
    assert evaluate(shifted, [0, 1]).tolist() == [1.0, 3.0]
    assert substitute_shift(ast, 0) == ast


numbers = st.floats(min_value=0, max_value=1e6, allow_nan=False).map(lambda x: Const(x))
leaves = st.one_of(numbers, st.just(Index()))


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/^"), children, children),
        st.builds(Call, st.sampled_from(FUNCTIONS), children),
    )


asts = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(asts)
def test_render_parse_round_trip(ast):
    assert parse_weight_expr(to_source(ast)) == ast


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="0123456789i+-*/^() .e", max_size=20))
def test_parser_total_on_junk(text):
    # either an AST or a ParseError carrying a valid offset, never anything else
    try:
        parse_weight_expr(text)
    except ParseError as exc:
        assert 0 <= exc.offset <= len(text.encode())
