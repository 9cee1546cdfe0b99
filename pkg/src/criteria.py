from fractions import Fraction
from typing import Callable, Dict

from .constructions import candidate_table, det_closed_form
from .errors import InvalidFamilyError, NotApplicableError
from .models import Branch, ConstructionFamily, CriterionVerdict, LatticeInstance

Rule = Callable[[int, int], bool]


def _f2r_wr(a: int, b: int) -> bool:
    a2 = a * a
    return a2 >= 6 * b if b >= 0 else a2 >= -2 * b


def _f2c_wr(a: int, b: int) -> bool:
    return b <= a * a <= 3 * b


def _f3r_wr(a: int, b: int) -> bool:
    a2 = a * a
    return a2 >= 4 * b if b >= 0 else a2 >= -b


# the quartic theorem has the same two branches as the real quadratic one
WR_RULES: Dict[ConstructionFamily, Rule] = {
    ConstructionFamily.F2R: _f2r_wr,
    ConstructionFamily.F2C: _f2c_wr,
    ConstructionFamily.F3R: _f3r_wr,
    ConstructionFamily.F4S: _f2r_wr,
}

OPTIMAL_RULES: Dict[ConstructionFamily, Rule] = {
    ConstructionFamily.F2R: lambda a, b: a * a in (6 * b, -2 * b),
    ConstructionFamily.F2C: lambda a, b: a * a in (b, 3 * b),
    ConstructionFamily.F3R: lambda a, b: a * a == 4 * b,
    ConstructionFamily.F4S: lambda a, b: False,
}

ENLARGED_KISSING_RULES: Dict[ConstructionFamily, Rule] = {
    ConstructionFamily.F2R: lambda a, b: a * a in (6 * b, -2 * b),
    ConstructionFamily.F2C: lambda a, b: a * a in (b, 3 * b),
    ConstructionFamily.F3R: lambda a, b: a * a in (4 * b, -b),
    ConstructionFamily.F4S: lambda a, b: a * a in (6 * b, -2 * b),
}


def _branch(family: ConstructionFamily, b: int) -> Branch:
    if family is ConstructionFamily.F2C:
        return Branch.COMPLEX_BAND
    return Branch.B_NON_NEGATIVE if b >= 0 else Branch.B_NEGATIVE


def predicted_minimum(family: ConstructionFamily, a: int, b: int) -> Fraction:
    return min(value for _, value in candidate_table(family, a, b))


def wr_predicate(family: ConstructionFamily, a: int, b: int) -> CriterionVerdict:
    """Well-roundedness and density optimality read off the coefficient inequalities"""
    if a == 0:
        raise InvalidFamilyError("a must be nonzero")
    well_rounded = WR_RULES[family](a, b)
    return CriterionVerdict(
        family=family,
        well_rounded=well_rounded,
        optimal_density=well_rounded and OPTIMAL_RULES[family](a, b),
        enlarged_kissing=well_rounded and ENLARGED_KISSING_RULES[family](a, b),
        branch=_branch(family, b),
        predicted_minimum=predicted_minimum(family, a, b),
    )


def verdict_for(instance: LatticeInstance) -> CriterionVerdict:
    return wr_predicate(instance.family, instance.poly.a, instance.poly.b)


def density_closed_form(family: ConstructionFamily, a: int, b: int) -> Fraction:
    """delta^2 = (lambda/4)^n / det(G) with lambda = a^2 - 2b (or b for complex roots)"""
    verdict = wr_predicate(family, a, b)
    if not verdict.well_rounded:
        raise NotApplicableError(
            f"{family.label} with a={a}, b={b} is not well-rounded; the closed-form minimum does not apply")
    return (verdict.predicted_minimum / 4) ** family.dimension / det_closed_form(family, a, b)
