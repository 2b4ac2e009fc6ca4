import pytest
from hypothesis import given

from computable_ga.expressions import (
    DSLSyntaxError,
    GaExpr,
    Tag,
    parse,
    parse_lines,
    pretty,
    deriv,
    field_,
    units,
)

from strategies import expressions, term


def test_covariant_observable_structure():
    (t,) = parse("<F~ O F>0").terms
    assert [(f.symbol, f.tag, f.rev) for f in t.factors] == [
        ("F", Tag.COVARIANT_FIELD, True),
        ("O", Tag.COVARIANT_FIELD, False),
        ("F", Tag.COVARIANT_FIELD, False),
    ]
    assert t.weight == 1.0


def test_free_hamiltonian_structure():
    (t,) = parse("<d3x F~ e^k d_k F>0").terms
    assert [f.tag for f in t.factors] == [
        Tag.VOLUME,
        Tag.COVARIANT_FIELD,
        Tag.REFERENCE,
        Tag.DERIVATIVE,
        Tag.COVARIANT_FIELD,
    ]
    assert t.factors[2].index == "k" and t.factors[3].index == "k"
    # the derivative is grouped with its operand
    assert [len(u) for u in t.units()] == [1, 1, 1, 2]


def test_commutator_expands_to_weighted_sum():
    e = parse("<F~ e^k d_k F>0 + <F~ e^k [F, W_k]>0")
    assert [t.weight for t in e.terms] == [1.0, 1.0, -1.0]
    assert pretty(e) == "<F~ e^k d_k F>0 + <F~ e^k F W_k>0 - <F~ e^k W_k F>0"


def test_connection_tags():
    (t,) = parse("<W_k w_0 S dS~_k>0").terms
    assert [f.tag for f in t.factors] == [Tag.CONNECTION, Tag.COVARIANT_CONNECTION, Tag.ROTOR, Tag.ROTOR]
    assert t.factors[3].rev and t.factors[3].derivs == ("k",)


def test_derivative_applied_to_rotor_becomes_rotor_derivative():
    (t,) = parse("<F~ d_k S F>0").terms
    assert t.factors[1].tag is Tag.ROTOR and t.factors[1].derivs == ("k",)


def test_weights_and_signs():
    e = parse("2 <F~ F>0 - 0.5*<O>0")
    assert [t.weight for t in e.terms] == [2.0, -0.5]


def test_unit_factor_is_dropped():
    assert parse("<1 F>0") == parse("<F>0")


def test_fixed_order_when_any_term_has_a_derivative():
    assert parse("<F~ O F>0 + <F~ e^k d_k F>0").fixed_order
    assert not parse("<F~ O F>0").fixed_order


@pytest.mark.parametrize(
    "text, column",
    [
        ("<F~ O F", 8),
        ("<F ? F>0", 4),
        ("", 1),
        ("<>0", 2),
    ],
)
def test_syntax_errors_report_column(text, column):
    with pytest.raises(DSLSyntaxError) as info:
        parse(text)
    assert info.value.position + 1 == column
    assert f"column {column}" in str(info.value)


@pytest.mark.parametrize("text", ["<F d_k>0", "<F~ e^k d_k>0"])
def test_derivative_in_last_position_rejected(text):
    with pytest.raises(DSLSyntaxError, match="derivative must act"):
        parse(text)


@pytest.mark.parametrize("text", ["<d_k [F, O]>0", "<d_k 1>0"])
def test_derivative_needs_single_operand(text):
    with pytest.raises(DSLSyntaxError, match="single factor"):
        parse(text)


def test_units_rejects_dangling_derivative():
    with pytest.raises(ValueError):
        units((field_("F"), deriv("k")))


def test_parse_lines_skips_comments_and_blank_lines():
    entries = parse_lines("# header\n<F~ O F>0\n\n<O>0  # trailing\n")
    assert [(n, s) for n, s, _ in entries] == [(2, "<F~ O F>0"), (4, "<O>0")]


def test_parse_lines_attaches_line_number():
    with pytest.raises(DSLSyntaxError) as info:
        parse_lines("<O>0\n<F~ d_k>0\n")
    assert info.value.lineno == 2


def test_empty_expression_prints_zero():
    assert pretty(GaExpr()) == "0"


def test_dagger_display():
    (t,) = parse("<F~ S~ e^k S F>0").terms
    assert [f.pretty() for f in t.factors] == ["F†", "S†", "e^k", "S", "F"]


@given(expressions)
def test_round_trip_through_printer(text):
    e = parse(text)
    assert parse(pretty(e)) == e


@given(term)
def test_reverse_is_involution(text):
    (t,) = parse(text).terms
    assert t.reverse().reverse() == t
