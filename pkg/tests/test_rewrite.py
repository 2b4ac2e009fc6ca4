import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from computable_ga.algebra import Multivector, random_rotor
from computable_ga.expressions import Tag, parse, pretty
from computable_ga.rewrite import (
    CANONICAL,
    RewriteLimitError,
    apply_basis_rotation,
    check_computable,
    normalize,
    transform_under,
)

from strategies import expressions

RULES = ["printed", "derived"]


def has_rotor_derivative(e) -> bool:
    return any(f.tag is Tag.ROTOR and f.derivs for t in e.terms for f in t.factors)


# --- transformation images -------------------------------------------------------


def test_observable_image_sandwiches_every_field():
    e = apply_basis_rotation(parse("<F~ O F>0"))
    assert pretty(e) == "<S F~ S~ S O S~ S F S~>0"


def test_free_hamiltonian_inhomogeneous_has_three_terms():
    e = apply_basis_rotation(parse("<d3x F~ e^k d_k F>0"))
    assert len(e) == 3
    assert has_rotor_derivative(e)


def test_free_hamiltonian_homogeneous_is_single_term():
    e = normalize(apply_basis_rotation(parse("<d3x F~ e^k d_k F>0"), homogeneous=True))
    assert pretty(e) == "<d3x F~ S~ e^k S d_k F>0"
    assert not has_rotor_derivative(e)


def test_identity_transform_is_unchanged():
    e = parse("<d3x F~ e^k [F, W_k]>0")
    assert transform_under(e, "identity") == e


def test_unsupported_kind_is_domain_error():
    with pytest.raises(ValueError, match="unsupported"):
        transform_under(parse("<F>0"), "boost")


def test_translation_of_connection_adds_correction_terms():
    e = transform_under(parse("<F~ e^k W_k F>0"), "translation")
    text = pretty(e)
    # -eps^n d_n W_k and -(d_k eps^n) W_n
    assert "- <F~ e^k eps^n d_n W_k F>0" in text
    assert "- <F~ e^k d_k eps^n W_n F>0" in text
    assert e.terms[0] == parse("<F~ e^k W_k F>0").terms[0]


def test_covariant_connection_laws():
    basis = transform_under(parse("<F~ w_k F>0"), "basis-rotation")
    assert "S w_k S~" in pretty(basis)
    coords = transform_under(parse("<F~ w_k F>0"), "coordinate-rotation")
    assert pretty(coords) == "<F~ w_k' F>0 - <F~ R~ dR_k F>0"


# --- normalization ------------------------------------------------------------------


def test_covariant_pairs_cancel():
    assert pretty(normalize(parse("<S O S~ S F F~ S~>0"))) == "<O F F~>0"


@pytest.mark.parametrize("text", ["<F S~ S O>0", "<F S S~ O>0"])
def test_adjacent_rotor_pair_removed(text):
    assert normalize(parse(text)) == parse("<F O>0")


def test_reference_vector_keeps_inner_rotors():
    e = normalize(apply_basis_rotation(parse("<F~ e^i F>0")))
    assert pretty(e) == "<F~ S~ e^i S F>0"


def test_like_terms_merge():
    assert normalize(parse("<F~ O F>0 + <O F F~>0")) == parse("2 <F~ O F>0")
    assert normalize(parse("<F~ O F>0 - <F~ O F>0")).terms == ()


def test_pass_limit_raises():
    e = apply_basis_rotation(parse(CANONICAL["h-plus"][0]))
    with pytest.raises(RewriteLimitError):
        normalize(e, max_passes=1)


@settings(max_examples=60, deadline=None)
@given(expressions, st.sampled_from(RULES))
def test_normalize_is_idempotent(text, rule):
    e = apply_basis_rotation(parse(text))
    n = normalize(e, rule)
    assert normalize(n, rule) == n


# --- verdicts ---------------------------------------------------------------------


@pytest.mark.parametrize("rule", RULES)
@pytest.mark.parametrize("name", list(CANONICAL))
def test_canonical_verdicts(name, rule):
    text, expected = CANONICAL[name]
    assert check_computable(parse(text), rule=rule).computable is expected


def test_reference_vector_report():
    rep = check_computable(parse("<F~ e^i F>0"))
    assert rep.summary() == "not-computable (outer S† in ordering #2)"
    assert rep.verdict == "not-computable"


def test_free_hamiltonian_report_names_term():
    rep = check_computable(parse("<d3x F~ e^k d_k F>0"))
    assert not rep.computable
    assert rep.fixed_order
    assert "term" in rep.summary()


def test_plus_hamiltonian_reduces_to_covariant_form():
    rep = check_computable(parse(CANONICAL["h-plus"][0]))
    # ~F ~S e^k d_k(S F) expanded, plus ~F e^k' F W_k
    assert pretty(rep.normalized) == (
        "<d3x F~ S~ e^k dS_k F>0 + <d3x F~ S~ e^k S d_k F>0 + <d3x F~ S~ e^k S F W_k>0"
    )


@settings(max_examples=60, deadline=None)
@given(expressions)
def test_verdict_iff_no_residual(text):
    rep = check_computable(parse(text))
    assert rep.computable == (len(rep.residual) == 0)


def test_gauge_invariance_of_plus_lagrangian():
    L = parse("<d3x F~ e^k d_k F>0 + <d3x F~ e^k [F, W_k]>0 + <d3x F~ e^k W_k F>0")
    assert normalize(transform_under(L, "gauge")) == normalize(L)


def test_minus_lagrangian_is_not_gauge_invariant():
    L = parse("<d3x F~ e^k d_k F>0 + <d3x F~ e^k [F, W_k]>0 - <d3x F~ e^k W_k F>0")
    assert normalize(transform_under(L, "gauge")) != normalize(L)


def test_cancellation_is_sound_numerically():
    # deleting the cancelled S pairs leaves the grade-0 value unchanged
    rng = np.random.default_rng(4)
    F, O = (Multivector(rng.standard_normal(8)) for _ in range(2))
    S = random_rotor(rng)
    Fp, Op = S * F * ~S, S * O * ~S
    assert abs((~Fp * Op * Fp).scalar_part - (~F * O * F).scalar_part) <= 1e-12 * 100
    # with a fixed reference vector the inner S survives and changes the value
    e1 = Multivector.blade("e1")
    assert abs((~Fp * e1 * Fp).scalar_part - (~F * e1 * F).scalar_part) > 1e-3
