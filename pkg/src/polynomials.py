import math
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from .errors import (DegreeMismatchError, InvalidFamilyError, InvalidInputError,
                     InvalidParameterError)
from .models import IntPolynomial, RootClassification, RootKind

ROOT_ERROR_BOUND = 1e-10
# imaginary parts below this (relative) size are noise from the eigenvalue solver
_REAL_SNAP = 1e-9
_NEWTON_STEPS = 4


def parse_coefficients(text: str) -> IntPolynomial:
    """Parse the monic tail "a,b[,c[,d]]" into a polynomial"""
    parts = [part.strip() for part in text.split(",")]
    if not text.strip() or any(part == "" for part in parts):
        raise InvalidInputError(f"cannot parse coefficient list {text!r}")
    try:
        values = [int(part) for part in parts]
    except ValueError:
        raise InvalidInputError(f"coefficients must be integers: {text!r}") from None
    return IntPolynomial.from_coefficients(values)


def _require_degree(p: IntPolynomial, degree: int) -> None:
    if p.degree != degree:
        raise DegreeMismatchError(f"expected a degree {degree} polynomial, got degree {p.degree}")


def discriminant_quadratic(p: IntPolynomial) -> int:
    _require_degree(p, 2)
    return p.a * p.a - 4 * p.b


def discriminant_cubic(p: IntPolynomial) -> int:
    _require_degree(p, 3)
    a, b, c = p.a, p.b, p.c
    return 18 * a * b * c - 4 * a ** 3 * c + a * a * b * b - 4 * b ** 3 - 27 * c * c


def detect_symmetric_quartic(p: IntPolynomial) -> Optional[Fraction]:
    """
    Recognise f = (x^2 - g)(x^2 + a x + q) with g > 0 and four distinct real roots

    Returns:
        g = gamma^2 = -c/a, or None when f does not have that structure
    """
    _require_degree(p, 4)
    if p.a == 0:
        raise InvalidFamilyError("a must be nonzero")

    gamma_sq = Fraction(-p.c, p.a)
    if gamma_sq <= 0:
        return None
    q = p.b + gamma_sq
    if p.d != -gamma_sq * q:
        return None
    if p.a * p.a - 4 * q <= 0:
        return None
    # +gamma or -gamma is a root of x^2 + a x + q exactly when (q + g)^2 = a^2 g
    if (q + gamma_sq) ** 2 - p.a * p.a * gamma_sq == 0:
        return None
    return gamma_sq


def expand_symmetric_quartic(a: int, p: int, gamma_sq: int) -> IntPolynomial:
    return IntPolynomial.from_coefficients([a, p - gamma_sq, -a * gamma_sq, -gamma_sq * p])


def synthesize_symmetric_quartic(a: int, p: int, gamma_sq: int) -> IntPolynomial:
    """Build (x^2 - gamma_sq)(x^2 + a x + p), checking it has the symmetric structure"""
    if a == 0:
        raise InvalidParameterError("a must be nonzero")
    if gamma_sq < 1:
        raise InvalidParameterError(f"gamma_sq must be >= 1, got {gamma_sq}")
    if a * a - 4 * p <= 0:
        raise InvalidParameterError(
            f"a^2 - 4p must be positive, got {a * a - 4 * p} (cofactor roots not real and distinct)")
    if (p + gamma_sq) ** 2 == a * a * gamma_sq:
        raise InvalidParameterError(
            "(p + gamma_sq)^2 must differ from a^2 gamma_sq (a cofactor root would equal ±gamma)")
    return expand_symmetric_quartic(a, p, gamma_sq)


def evaluate(p: IntPolynomial, z: complex) -> complex:
    value = 0j
    for coefficient in p.monic_coefficients:
        value = value * z + coefficient
    return value


def _quadratic_roots(a: float, b: float) -> List[complex]:
    disc = a * a - 4 * b
    if disc >= 0:
        s = math.sqrt(disc)
        if a == 0:
            return [complex(-s / 2), complex(s / 2)]
        # avoid cancellation: the larger root comes from adding same-signed terms
        q = -(a + math.copysign(s, a)) / 2
        other = b / q if q != 0 else 0.0
        return [complex(q), complex(other)]
    s = math.sqrt(-disc)
    return [complex(-a / 2, -s / 2), complex(-a / 2, s / 2)]


def _polish(coefficients: List[int], roots: np.ndarray) -> List[complex]:
    derivative = np.polyder(np.array(coefficients, dtype=float))
    polished = []
    for root in roots:
        z = complex(root)
        residual = abs(np.polyval(coefficients, z))
        for _ in range(_NEWTON_STEPS):
            slope = np.polyval(derivative, z)
            if slope == 0:
                break
            candidate = z - np.polyval(coefficients, z) / slope
            candidate_residual = abs(np.polyval(coefficients, candidate))
            if candidate_residual >= residual:
                break
            z, residual = complex(candidate), candidate_residual
        polished.append(z)
    return polished


def _snap_real(z: complex) -> complex:
    if abs(z.imag) <= _REAL_SNAP * max(1.0, abs(z.real)):
        return complex(z.real, 0.0)
    return z


def roots_numeric(p: IntPolynomial) -> List[complex]:
    """
    All complex roots, ordered by real part then imaginary part

    Degree 2 uses the closed form; degrees 3 and 4 use companion-matrix
    eigenvalues followed by Newton polishing.
    """
    if p.degree == 2:
        roots = _quadratic_roots(float(p.a), float(p.b))
    else:
        coefficients = p.monic_coefficients
        roots = _polish(coefficients, np.roots(coefficients))
    roots = [_snap_real(z) for z in roots]
    return sorted(roots, key=lambda z: (z.real, z.imag))


def vieta_residuals(p: IntPolynomial) -> Tuple[float, float]:
    """|sum of roots + a| and |product of roots - (-1)^n * constant term|"""
    roots = roots_numeric(p)
    total = sum(roots)
    product = complex(1.0)
    for root in roots:
        product *= root
    return abs(total + p.a), abs(product - (-1) ** p.degree * p.constant_term)


def classify(p: IntPolynomial) -> RootClassification:
    gamma_sq = None
    if p.degree == 2:
        disc = discriminant_quadratic(p)
        if disc > 0:
            kind = RootKind.TWO_DISTINCT_REAL
        elif disc < 0:
            kind = RootKind.COMPLEX_CONJUGATE_PAIR
        else:
            kind = RootKind.OTHER
    elif p.degree == 3:
        kind = RootKind.THREE_DISTINCT_REAL if discriminant_cubic(p) > 0 else RootKind.OTHER
    else:
        kind = RootKind.OTHER
        if p.a != 0:
            gamma_sq = detect_symmetric_quartic(p)
            if gamma_sq is not None:
                kind = RootKind.FOUR_DISTINCT_REAL_SYMMETRIC

    roots = roots_numeric(p)
    logger.debug(f"Classified {p} as {kind.value}")
    return RootClassification(
        kind=kind,
        roots=tuple((z.real, z.imag) for z in roots),
        gamma_sq=gamma_sq,
        error_bound=ROOT_ERROR_BOUND,
    )
