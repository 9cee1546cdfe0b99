import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger

from . import linalg
from .errors import InternalConsistencyError, InvalidFamilyError, UnsupportedStructureError
from .models import (ConstructionFamily, ExactGram, IntPolynomial, LatticeInstance,
                     RootClassification, RootKind)
from .polynomials import classify

FAMILY_BY_KIND: Dict[RootKind, ConstructionFamily] = {
    RootKind.TWO_DISTINCT_REAL: ConstructionFamily.F2R,
    RootKind.COMPLEX_CONJUGATE_PAIR: ConstructionFamily.F2C,
    RootKind.THREE_DISTINCT_REAL: ConstructionFamily.F3R,
    RootKind.FOUR_DISTINCT_REAL_SYMMETRIC: ConstructionFamily.F4S,
}


def family_for(kind: RootKind) -> ConstructionFamily:
    try:
        return FAMILY_BY_KIND[kind]
    except KeyError:
        raise UnsupportedStructureError(
            f"root structure {kind.value} does not match any construction family") from None


def exact_gram(rows: Sequence[Sequence]) -> ExactGram:
    entries = tuple(tuple(Fraction(value) for value in row) for row in rows)
    return ExactGram(n=len(entries), entries=entries, det_exact=linalg.determinant(entries))


@lru_cache(maxsize=8192)
def gram_for_family(family: ConstructionFamily, a: int, b: int) -> ExactGram:
    """Gram matrix whose quadratic form is the family's norm formula in a and b"""
    diag = a * a - 2 * b
    if family is ConstructionFamily.F2R:
        rows = [[diag, 2 * b], [2 * b, diag]]
    elif family is ConstructionFamily.F2C:
        off = Fraction(a * a - 2 * b, 2)
        rows = [[b, off], [off, b]]
    elif family is ConstructionFamily.F3R:
        rows = [[diag if i == j else b for j in range(3)] for i in range(3)]
    else:
        # coordinates 1,3 and 2,4 couple through 2b; neighbours are orthogonal
        rows = [[0] * 4 for _ in range(4)]
        for i in range(4):
            rows[i][i] = diag
            rows[i][(i + 2) % 4] = 2 * b
    return exact_gram(rows)


def det_closed_form(family: ConstructionFamily, a: int, b: int) -> Fraction:
    """det(G) = det(M)^2 from the coefficients alone"""
    if family is ConstructionFamily.F2R:
        return Fraction(a * a * (a * a - 4 * b))
    if family is ConstructionFamily.F2C:
        return Fraction(a * a * (4 * b - a * a), 4)
    if family is ConstructionFamily.F3R:
        return Fraction(a * a * (a * a - 3 * b) ** 2)
    return Fraction(a ** 4 * (a * a - 4 * b) ** 2)


def lemma_norm(family: ConstructionFamily, a: int, b: int, x: Sequence[int]) -> Fraction:
    """Squared norm of x_1 v_1 + ... + x_n v_n written with the family's lemma"""
    if len(x) != family.dimension:
        raise ValueError(f"{family.label} needs {family.dimension} coordinates, got {len(x)}")
    if family is ConstructionFamily.F2R:
        x1, x2 = x
        return Fraction(a * a * (x1 * x1 + x2 * x2) - 2 * b * (x1 - x2) ** 2)
    if family is ConstructionFamily.F2C:
        x1, x2 = x
        return Fraction(a * a * (x1 + x2) ** 2 + (4 * b - a * a) * (x1 - x2) ** 2, 4)
    if family is ConstructionFamily.F3R:
        x1, x2, x3 = x
        return Fraction((a * a - 2 * b) * (x1 * x1 + x2 * x2 + x3 * x3)
                        + 2 * b * (x1 * x2 + x1 * x3 + x2 * x3))
    x1, x2, x3, x4 = x
    return Fraction((a * a - 2 * b) * (x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4)
                    + 4 * b * (x1 * x3 + x2 * x4))


def candidate_table(family: ConstructionFamily, a: int, b: int) -> List[Tuple[str, Fraction]]:
    """Small-coefficient norm values whose minimum is the lattice minimum"""
    a2 = a * a
    if family is ConstructionFamily.F2R:
        values = [("(i) ±e", a2 - 2 * b), ("(ii) ±(1,1)", 2 * a2), ("(iii) ±(1,-1)", 2 * a2 - 8 * b)]
    elif family is ConstructionFamily.F2C:
        values = [("(i) ±e", b), ("(ii) ±(1,1)", a2), ("(iii) ±(1,-1)", 4 * b - a2)]
    elif family is ConstructionFamily.F3R:
        values = [
            ("(i) ±e", a2 - 2 * b),
            ("(ii) ±(e_i+e_j)", 2 * a2 - 2 * b),
            ("(iii) ±(e_i-e_j)", 2 * a2 - 6 * b),
            ("(iv) ±(1,1,1)", 3 * a2),
            ("(v) two plus one minus", 3 * a2 - 8 * b),
        ]
    else:
        values = [
            ("(i) ±e", a2 - 2 * b),
            ("(ii) ±(e1+e3), ±(e2+e4)", 2 * a2),
            ("(iii) ±(e1-e3), ±(e2-e4)", 2 * a2 - 8 * b),
            ("(iv) A+C", 3 * a2 - 10 * b),
            ("(v) 2A", 2 * (a2 - 2 * b)),
            ("(vi) A+B", 3 * a2 - 2 * b),
            ("(vii) 2B", 4 * a2),
            ("(viii) 2C", 2 * (2 * a2 - 8 * b)),
            ("(ix) 4A", 4 * (a2 - 2 * b)),
        ]
    return [(label, Fraction(value)) for label, value in values]


def _real_roots(classification: RootClassification) -> List[float]:
    return sorted(re for re, _ in classification.roots)


def generator_matrix(family: ConstructionFamily, p: IntPolynomial,
                     classification: RootClassification) -> Tuple[Tuple[float, ...], ...]:
    """Rows are the basis vectors built from the roots, in a fixed root order"""
    if family is ConstructionFamily.F2R:
        alpha, beta = _real_roots(classification)
        rows = [(alpha, beta), (beta, alpha)]
    elif family is ConstructionFamily.F2C:
        alpha = -p.a / 2
        beta = math.sqrt(4 * p.b - p.a * p.a) / 2
        rows = [(alpha, beta), (alpha, -beta)]
    elif family is ConstructionFamily.F3R:
        alpha, beta, gamma = _real_roots(classification)
        rows = [(alpha, beta, gamma), (gamma, alpha, beta), (beta, gamma, alpha)]
    else:
        gamma_sq = classification.gamma_sq
        gamma = math.sqrt(gamma_sq)
        alpha = -gamma
        q = float(p.b + gamma_sq)
        disc = math.sqrt(p.a * p.a - 4 * q)
        beta, psi = sorted(((-p.a - disc) / 2, (-p.a + disc) / 2))
        rows = [
            (alpha, beta, gamma, psi),
            (beta, gamma, psi, alpha),
            (gamma, psi, alpha, beta),
            (psi, alpha, beta, gamma),
        ]
    return tuple(tuple(float(v) for v in row) for row in rows)


def gram_residual(instance: LatticeInstance) -> float:
    """Max-entry |G - M M^t| between the exact Gram and the floating generator"""
    m = np.array(instance.gen_matrix, dtype=float)
    exact = np.array([[float(v) for v in row] for row in instance.gram.entries])
    return float(np.max(np.abs(m @ m.T - exact)))


def build(p: IntPolynomial) -> LatticeInstance:
    if p.a == 0:
        raise InvalidFamilyError("a must be nonzero")
    classification = classify(p)
    family = family_for(classification.kind)

    gram = gram_for_family(family, p.a, p.b)
    if not linalg.is_positive_definite(gram.entries):
        raise InternalConsistencyError(f"Gram matrix of {p} is not positive definite")
    det_cf = det_closed_form(family, p.a, p.b)
    if gram.det_exact != det_cf:
        raise InternalConsistencyError(
            f"det(G) = {gram.det_exact} but the closed form gives {det_cf} for {p}")

    instance = LatticeInstance(
        poly=p,
        family=family,
        classification=classification,
        gram=gram,
        gen_matrix=generator_matrix(family, p, classification),
        det_closed_form=det_cf,
    )
    logger.debug(f"Built {family.label} lattice for {p}: det(G) = {det_cf}")
    return instance
