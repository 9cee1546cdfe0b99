"""
Exact shortest-vector search for positive definite rational Gram matrices.

The minimum and the full minimal layer are found by Fincke-Pohst
enumeration over an exact LDL^t decomposition, with the smallest
diagonal entry as the search radius (unit vectors are lattice points).
"""
import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from . import linalg
from .errors import InvalidInputError, UnsupportedDimensionError
from .models import CenterDensitySq, CoordinateVector, ExactGram, LatticeInstance, MinResult

MAX_DIMENSION = 4

Entries = Tuple[Tuple[Fraction, ...], ...]


def form_value(g: ExactGram, v: Sequence[int]) -> Fraction:
    if len(v) != g.n:
        raise InvalidInputError(f"vector of length {len(v)} does not match dimension {g.n}")
    total = Fraction(0)
    for i in range(g.n):
        if v[i] == 0:
            continue
        total += g.entries[i][i] * v[i] * v[i]
        for j in range(i + 1, g.n):
            if v[j]:
                total += 2 * g.entries[i][j] * v[i] * v[j]
    return total


def _check_gram(g: ExactGram) -> None:
    if g.n > MAX_DIMENSION:
        raise UnsupportedDimensionError(f"dimension {g.n} exceeds the supported maximum {MAX_DIMENSION}")
    if not linalg.is_positive_definite(g.entries):
        raise InvalidInputError("Gram matrix is not positive definite")


@lru_cache(maxsize=8192)
def _enumerate(entries: Entries, bound: Fraction) -> Tuple[Tuple[CoordinateVector, Fraction], ...]:
    """Every nonzero x with Q(x) <= bound, with its form value"""
    pivots, lower = linalg.ldl_decomposition(entries)
    n = len(entries)
    found: List[Tuple[CoordinateVector, Fraction]] = []
    x = [0] * n

    # Q(x) = sum_i D_i (x_i + sum_{j>i} L_ji x_j)^2, filled from the last coordinate down
    def search(i: int, used: Fraction) -> None:
        center = -sum((lower[j][i] * x[j] for j in range(i + 1, n)), Fraction(0))
        budget = bound - used
        radius = math.sqrt(budget / pivots[i])
        lo = math.floor(center - radius) - 1
        hi = math.ceil(center + radius) + 1
        for xi in range(lo, hi + 1):
            t = xi - center
            value = used + pivots[i] * t * t
            if value > bound:
                continue
            x[i] = xi
            if i == 0:
                if any(x):
                    found.append((tuple(x), value))
            else:
                search(i - 1, value)
        x[i] = 0

    search(n - 1, Fraction(0))
    return tuple(found)


def _min_result(n: int, points: Sequence[Tuple[CoordinateVector, Fraction]]) -> MinResult:
    lambda_min = min(value for _, value in points)
    vectors = tuple(sorted(v for v, value in points if value == lambda_min))
    span_rank = linalg.rank(vectors)
    return MinResult(
        dimension=n,
        lambda_min=lambda_min,
        minimal_vectors=vectors,
        kissing_number=len(vectors),
        span_rank=span_rank,
        well_rounded=span_rank == n,
    )


@lru_cache(maxsize=8192)
def _shortest(entries: Entries) -> MinResult:
    bound = min(entries[i][i] for i in range(len(entries)))
    points = _enumerate(entries, bound)
    result = _min_result(len(entries), points)
    logger.debug(f"Enumerated {len(points)} vectors under {bound}: "
                 f"minimum {result.lambda_min}, kissing {result.kissing_number}")
    return result


def shortest_vectors(g: ExactGram) -> MinResult:
    _check_gram(g)
    return _shortest(g.entries)


def is_well_rounded(g: ExactGram) -> bool:
    return shortest_vectors(g).well_rounded


def center_density_sq(g: ExactGram, m: MinResult) -> CenterDensitySq:
    value = (m.lambda_min / 4) ** g.n / g.det_exact
    return CenterDensitySq(value=value, numeric_approx=math.sqrt(value))


def coordinate_bounds(g: ExactGram, bound: Fraction) -> Tuple[int, ...]:
    """
    |x_i| <= floor(sqrt(bound * (G^-1)_ii)) holds for every x with Q(x) <= bound
    """
    inv = linalg.inverse(g.entries)
    return tuple(math.isqrt(math.floor(bound * inv[i][i])) for i in range(g.n))


def naive_shortest_vectors(g: ExactGram, box: Union[int, Sequence[int]]) -> MinResult:
    """Exhaustive search over the box |x_i| <= box_i"""
    _check_gram(g)
    if isinstance(box, int):
        box = [box] * g.n
    denominator = math.lcm(*(value.denominator for row in g.entries for value in row))
    integers = [[int(value * denominator) for value in row] for row in g.entries]
    # every form value is bounded by n^2 * max|entry| * max(box)^2 and must fit in int64
    largest = max(abs(v) for row in integers for v in row) * g.n ** 2 * max(box) ** 2
    if largest > np.iinfo(np.int64).max:
        raise InvalidInputError(f"box search would overflow int64 (form values up to {largest:.3e})")
    scaled = np.array(integers, dtype=np.int64)
    points = np.array(list(itertools.product(*(range(-k, k + 1) for k in box))), dtype=np.int64)
    points = points[np.any(points != 0, axis=1)]
    values = np.einsum("ki,ij,kj->k", points, scaled, points)
    smallest = int(values.min())
    minimal = points[values == smallest]
    return _min_result(g.n, [(tuple(int(v) for v in row), Fraction(smallest, denominator))
                             for row in minimal])


def minimal_vector_embeddings(instance: LatticeInstance, m: MinResult) -> List[Tuple[float, ...]]:
    """Floating coordinates x . M of each minimal vector"""
    basis = np.array(instance.gen_matrix, dtype=float)
    return [tuple(float(v) for v in np.array(x, dtype=float) @ basis) for x in m.minimal_vectors]
