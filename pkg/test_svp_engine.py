#!/usr/bin/env python3
"""
Tests for exact shortest-vector enumeration against exhaustive box search
"""
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from src import linalg
from src.constructions import build, exact_gram, gram_for_family
from src.errors import InvalidInputError, UnsupportedDimensionError
from src.models import ConstructionFamily, IntPolynomial
from src.svp_engine import (center_density_sq, coordinate_bounds, form_value, is_well_rounded,
                            minimal_vector_embeddings, naive_shortest_vectors, shortest_vectors)


def poly(*coefficients):
    return IntPolynomial.from_coefficients(list(coefficients))


def naive(gram, margin=2):
    box = [k + margin for k in coordinate_bounds(gram, min(gram.diagonal))]
    return naive_shortest_vectors(gram, box)


def test_hexagonal_lattice():
    gram = exact_gram([[2, 1], [1, 2]])
    result = shortest_vectors(gram)
    assert result.lambda_min == 2
    assert result.kissing_number == 6
    assert result.minimal_vectors == ((-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0))
    assert result.well_rounded
    assert center_density_sq(gram, result).value == Fraction(1, 12)


def test_rectangular_lattice_is_not_well_rounded():
    gram = exact_gram([[1, 0], [0, 4]])
    result = shortest_vectors(gram)
    assert result.lambda_min == 1
    assert result.minimal_vectors == ((-1, 0), (1, 0))
    assert result.span_rank == 1
    assert not result.well_rounded
    assert not is_well_rounded(gram)


def test_minimum_below_diagonal():
    # the minimum is reached by e1 - e2, not by a basis vector
    gram = exact_gram([[10, 9], [9, 10]])
    result = shortest_vectors(gram)
    assert result.lambda_min == 2
    assert result.minimal_vectors == ((-1, 1), (1, -1))


def test_fcc_lattice():
    instance = build(poly(4, 4, 1))
    result = shortest_vectors(instance.gram)
    assert result.lambda_min == 8
    assert result.kissing_number == 12
    assert center_density_sq(instance.gram, result).value == Fraction(1, 32)


def test_rational_gram():
    instance = build(poly(3, 3))
    result = shortest_vectors(instance.gram)
    assert result.lambda_min == 3
    assert result.kissing_number == 6


@pytest.mark.parametrize("coefficients, minimum, kissing", [
    ((6, 6), 24, 6),
    ((2, -2), 8, 6),
    ((1, 1), 1, 6),
    ((1, -1, 0), 3, 8),
    ((6, 6, -6, -7), 24, 12),
    ((4, 1, -4, -2), 14, 8),
])
def test_engine_agrees_with_naive_search(coefficients, minimum, kissing):
    gram = build(poly(*coefficients)).gram
    fast = shortest_vectors(gram)
    slow = naive(gram)
    assert fast.lambda_min == slow.lambda_min == minimum
    assert fast.kissing_number == kissing
    assert fast.minimal_vectors == slow.minimal_vectors


def test_minimal_vectors_are_symmetric_and_sorted():
    result = shortest_vectors(build(poly(6, 6, -6, -7)).gram)
    vectors = set(result.minimal_vectors)
    assert all(tuple(-v for v in x) in vectors for x in vectors)
    assert list(result.minimal_vectors) == sorted(result.minimal_vectors)


def test_form_value():
    gram = exact_gram([[2, 1], [1, 2]])
    assert form_value(gram, (1, -1)) == 2
    assert form_value(gram, (2, 1)) == 14
    with pytest.raises(InvalidInputError):
        form_value(gram, (1, 0, 0))


def test_rejects_indefinite_gram():
    with pytest.raises(InvalidInputError):
        shortest_vectors(exact_gram([[1, 2], [2, 1]]))


def test_rejects_large_dimension():
    identity = [[int(i == j) for j in range(5)] for i in range(5)]
    with pytest.raises(UnsupportedDimensionError):
        shortest_vectors(exact_gram(identity))


def test_coordinate_bounds_cover_the_ellipsoid():
    gram = exact_gram([[10, 9], [9, 10]])
    bounds = coordinate_bounds(gram, Fraction(10))
    # x = (k, -k) has norm 2k^2, so |x_i| <= 2 is reachable under 10
    assert bounds[0] >= 2 and bounds[1] >= 2


def test_embeddings_have_the_minimal_norm():
    instance = build(poly(6, 6))
    result = shortest_vectors(instance.gram)
    for vector in minimal_vector_embeddings(instance, result):
        assert sum(v * v for v in vector) == pytest.approx(float(result.lambda_min))


@st.composite
def positive_definite_grams(draw):
    """Random small-entry Gram matrices B B^t of full rank"""
    n = draw(st.integers(2, 4))
    basis = [[draw(st.integers(-2, 2)) for _ in range(n)] for _ in range(n)]
    assume(linalg.determinant(basis) != 0)
    entries = [[sum(basis[i][k] * basis[j][k] for k in range(n)) for j in range(n)]
               for i in range(n)]
    return exact_gram(entries)


@settings(max_examples=150, deadline=None)
@given(positive_definite_grams())
def test_enumeration_matches_box_search(gram):
    box = [k + 2 for k in coordinate_bounds(gram, min(gram.diagonal))]
    assume(math.prod(2 * k + 1 for k in box) <= 200_000)
    fast = shortest_vectors(gram)
    slow = naive_shortest_vectors(gram, box)
    assert fast.lambda_min == slow.lambda_min
    assert fast.minimal_vectors == slow.minimal_vectors


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(list(ConstructionFamily)), st.integers(1, 8), st.integers(-8, 8),
       st.integers(2, 3))
def test_scaling_preserves_minimal_vectors(family, a, b, k):
    gram = gram_for_family(family, a, b)
    if not linalg.is_positive_definite(gram.entries):
        return
    base = shortest_vectors(gram)
    scaled_gram = gram_for_family(family, k * a, k * k * b)
    scaled = shortest_vectors(scaled_gram)
    assert scaled.lambda_min == k * k * base.lambda_min
    assert scaled.minimal_vectors == base.minimal_vectors
    assert center_density_sq(scaled_gram, scaled).value == center_density_sq(gram, base).value


def test_box_search_refuses_int64_overflow():
    gram = exact_gram([[10 ** 12, 0], [0, 10 ** 12]])
    with pytest.raises(InvalidInputError, match="overflow"):
        naive_shortest_vectors(gram, 3000)
    assert naive_shortest_vectors(gram, 1).lambda_min == 10 ** 12
