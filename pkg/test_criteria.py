#!/usr/bin/env python3
"""
Tests for the coefficient criteria for well-roundedness and density
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.constructions import build, family_for, gram_for_family
from src.criteria import density_closed_form, predicted_minimum, verdict_for, wr_predicate
from src.errors import InvalidFamilyError, NotApplicableError, UnsupportedStructureError
from src.models import Branch, ConstructionFamily, IntPolynomial
from src.polynomials import classify
from src.svp_engine import center_density_sq, shortest_vectors

F2R, F2C, F3R, F4S = (ConstructionFamily.F2R, ConstructionFamily.F2C,
                      ConstructionFamily.F3R, ConstructionFamily.F4S)


def poly(*coefficients):
    return IntPolynomial.from_coefficients(list(coefficients))


@pytest.mark.parametrize("family, a, b, well_rounded, optimal, enlarged", [
    (F2R, 6, 6, True, True, True),
    (F2R, 2, -2, True, True, True),
    (F2R, 5, 5, False, False, False),
    (F2R, 7, 4, True, False, False),
    (F2R, 1, -1, False, False, False),
    (F2C, 3, 3, True, True, True),
    (F2C, 1, 1, True, True, True),
    (F2C, 2, 2, True, False, False),
    (F2C, 1, 2, False, False, False),
    (F3R, 4, 4, True, True, True),
    (F3R, 1, -1, True, False, True),
    (F3R, 3, 3, False, False, False),
    (F3R, 5, -3, True, False, False),
    (F4S, 6, 6, True, False, True),
    (F4S, 4, 1, True, False, False),
    (F4S, 2, -2, True, False, True),
    (F4S, 3, 2, False, False, False),
])
def test_wr_predicate(family, a, b, well_rounded, optimal, enlarged):
    verdict = wr_predicate(family, a, b)
    assert verdict.well_rounded is well_rounded
    assert verdict.optimal_density is optimal
    assert verdict.enlarged_kissing is enlarged


def test_branches():
    assert wr_predicate(F2R, 6, 6).branch is Branch.B_NON_NEGATIVE
    assert wr_predicate(F3R, 1, -1).branch is Branch.B_NEGATIVE
    assert wr_predicate(F2C, 3, 3).branch is Branch.COMPLEX_BAND


def test_zero_a_is_rejected():
    with pytest.raises(InvalidFamilyError, match="a must be nonzero"):
        wr_predicate(F2R, 0, -4)


def test_predicted_minimum():
    assert predicted_minimum(F2R, 6, 6) == 24
    # not well-rounded: e1 - e2 beats the unit vectors
    assert predicted_minimum(F2R, 5, 5) == 10
    assert predicted_minimum(F2C, 1, 2) == 1


@pytest.mark.parametrize("coefficients, density", [
    ((6, 6), Fraction(1, 12)),
    ((2, -2), Fraction(1, 12)),
    ((3, 3), Fraction(1, 12)),
    ((1, 1), Fraction(1, 12)),
    ((4, 4, 1), Fraction(1, 32)),
    ((1, -1, 0), Fraction(27, 1024)),
])
def test_density_closed_form(coefficients, density):
    p = poly(*coefficients)
    instance = build(p)
    assert density_closed_form(instance.family, p.a, p.b) == density
    result = shortest_vectors(instance.gram)
    assert center_density_sq(instance.gram, result).value == density


def test_density_closed_form_needs_well_rounded():
    with pytest.raises(NotApplicableError):
        density_closed_form(F2R, 5, 5)


def test_verdict_for_uses_the_instance_family():
    verdict = verdict_for(build(poly(6, 6, -6, -7)))
    assert verdict.family is F4S
    assert verdict.well_rounded
    assert verdict.predicted_minimum == 24


def _instance_or_none(coefficients):
    p = poly(*coefficients)
    try:
        family_for(classify(p).kind)
    except UnsupportedStructureError:
        return None
    return build(p)


@pytest.mark.parametrize("degree", [2, 3])
def test_theorem_agrees_with_enumeration_on_small_grid(degree):
    for a in range(-6, 7):
        if a == 0:
            continue
        for b in range(-6, 7):
            for c in ([None] if degree == 2 else range(-3, 4)):
                coefficients = (a, b) if c is None else (a, b, c)
                instance = _instance_or_none(coefficients)
                if instance is None:
                    continue
                verdict = verdict_for(instance)
                result = shortest_vectors(instance.gram)
                assert verdict.well_rounded == result.well_rounded, coefficients
                assert verdict.predicted_minimum == result.lambda_min, coefficients


@settings(max_examples=200)
@given(st.integers(-40, 40).filter(bool), st.integers(-40, 40))
def test_predicted_minimum_is_the_real_minimum(a, b):
    for family in (F2R, F2C, F3R, F4S):
        gram = gram_for_family(family, a, b)
        # only parameter values where the family exists give a positive definite Gram
        disc = a * a - 4 * b
        if family is F2C and disc >= 0:
            continue
        if family is F3R and a * a - 3 * b <= 0:
            continue
        if family in (F2R, F4S) and disc <= 0:
            continue
        assert shortest_vectors(gram).lambda_min == predicted_minimum(family, a, b)


def test_well_rounded_minimum_equals_diagonal():
    for family in ConstructionFamily:
        for a in range(1, 9):
            for b in range(-8, 9):
                if not wr_predicate(family, a, b).well_rounded:
                    continue
                expected = b if family is F2C else a * a - 2 * b
                assert predicted_minimum(family, a, b) == expected
