from enum import Enum
from fractions import Fraction
from typing import Annotated, Optional, List, Tuple, Dict, Sequence

from pydantic import (BaseModel, ConfigDict, Field, BeforeValidator, PlainSerializer,
                      model_validator)

from .errors import InvalidInputError

COEFFICIENT_LIMIT = 10 ** 6


def _as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, dict):
        return Fraction(value["num"], value["den"])
    if isinstance(value, (int, str)):
        return Fraction(value)
    return value


def fraction_to_json(value: Fraction) -> Dict[str, int]:
    return {"num": value.numerator, "den": value.denominator}


Rational = Annotated[
    Fraction,
    BeforeValidator(_as_fraction),
    PlainSerializer(fraction_to_json, when_used="json"),
]

CoordinateVector = Tuple[int, ...]


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class IntPolynomial(FrozenModel):
    """Monic integer polynomial x^n + a x^(n-1) + b x^(n-2) [+ c x^(n-3) [+ d]]"""
    degree: int
    a: int
    b: int
    c: Optional[int] = None
    d: Optional[int] = None

    @model_validator(mode="after")
    def check_shape(self):
        if self.degree not in (2, 3, 4):
            raise ValueError(f"degree must be 2, 3 or 4, got {self.degree}")
        if (self.c is None) != (self.degree < 3):
            raise ValueError(f"coefficient c does not match degree {self.degree}")
        if (self.d is None) != (self.degree < 4):
            raise ValueError(f"coefficient d does not match degree {self.degree}")
        for value in self.coefficients:
            if abs(value) > COEFFICIENT_LIMIT:
                raise ValueError(f"coefficient {value} exceeds the bound {COEFFICIENT_LIMIT}")
        return self

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[int]) -> "IntPolynomial":
        coefficients = list(coefficients)
        if len(coefficients) not in (2, 3, 4):
            raise InvalidInputError(
                f"expected 2 to 4 coefficients (a,b[,c[,d]]), got {len(coefficients)}")
        for value in coefficients:
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidInputError(f"coefficient {value!r} is not an integer")
            if abs(value) > COEFFICIENT_LIMIT:
                raise InvalidInputError(
                    f"coefficient {value} exceeds the bound {COEFFICIENT_LIMIT}")
        padded = coefficients + [None] * (4 - len(coefficients))
        return cls(degree=len(coefficients), a=padded[0], b=padded[1], c=padded[2], d=padded[3])

    @property
    def coefficients(self) -> Tuple[int, ...]:
        return tuple(v for v in (self.a, self.b, self.c, self.d) if v is not None)

    @property
    def monic_coefficients(self) -> List[int]:
        return [1, *self.coefficients]

    @property
    def constant_term(self) -> int:
        return self.coefficients[-1]

    def __str__(self) -> str:
        terms = []
        for power, coefficient in zip(range(self.degree, -1, -1), self.monic_coefficients):
            if coefficient == 0:
                continue
            magnitude = abs(coefficient)
            if power == 0:
                body = str(magnitude)
            else:
                variable = "x" if power == 1 else f"x^{power}"
                body = variable if magnitude == 1 else f"{magnitude}{variable}"
            if not terms:
                terms.append(body if coefficient > 0 else f"-{body}")
            else:
                terms.append(f"{'+' if coefficient > 0 else '-'} {body}")
        return " ".join(terms)


class ConstructionFamily(str, Enum):
    F2R = "f2r"
    F2C = "f2c"
    F3R = "f3r"
    F4S = "f4s"

    @property
    def dimension(self) -> int:
        return {"f2r": 2, "f2c": 2, "f3r": 3, "f4s": 4}[self.value]

    @property
    def label(self) -> str:
        return self.name

    @classmethod
    def from_tag(cls, tag: str) -> "ConstructionFamily":
        try:
            return cls(tag.strip().lower())
        except ValueError:
            raise InvalidInputError(
                f"unknown family {tag!r}; expected one of f2r, f2c, f3r, f4s") from None


class RootKind(str, Enum):
    TWO_DISTINCT_REAL = "TwoDistinctReal"
    COMPLEX_CONJUGATE_PAIR = "ComplexConjugatePair"
    THREE_DISTINCT_REAL = "ThreeDistinctReal"
    FOUR_DISTINCT_REAL_SYMMETRIC = "FourDistinctRealSymmetric"
    OTHER = "Other"


class RootClassification(FrozenModel):
    kind: RootKind
    roots: Tuple[Tuple[float, float], ...]
    gamma_sq: Optional[Rational] = None
    error_bound: float = 1e-10


class ExactGram(FrozenModel):
    n: int
    entries: Tuple[Tuple[Rational, ...], ...]
    det_exact: Rational

    @model_validator(mode="after")
    def check_symmetric(self):
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"Gram matrix must be {self.n}x{self.n}")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError(f"Gram matrix is not symmetric at ({i + 1},{j + 1})")
        return self

    @property
    def diagonal(self) -> List[Fraction]:
        return [self.entries[i][i] for i in range(self.n)]


class LatticeInstance(FrozenModel):
    poly: IntPolynomial
    family: ConstructionFamily
    classification: RootClassification
    gram: ExactGram
    gen_matrix: Tuple[Tuple[float, ...], ...]
    det_closed_form: Rational

    @property
    def dimension(self) -> int:
        return self.family.dimension


class MinResult(FrozenModel):
    dimension: int
    lambda_min: Rational
    minimal_vectors: Tuple[CoordinateVector, ...]
    kissing_number: int
    span_rank: int
    well_rounded: bool

    @model_validator(mode="after")
    def check_counts(self):
        if self.kissing_number != len(self.minimal_vectors):
            raise ValueError("kissing number must equal the number of minimal vectors")
        if self.well_rounded != (self.span_rank == self.dimension):
            raise ValueError("well_rounded must match full span rank")
        return self


class CenterDensitySq(FrozenModel):
    value: Rational
    numeric_approx: float


class Branch(str, Enum):
    B_NON_NEGATIVE = "BNonNegative"
    B_NEGATIVE = "BNegative"
    COMPLEX_BAND = "ComplexBand"


class CriterionVerdict(FrozenModel):
    family: ConstructionFamily
    well_rounded: bool
    optimal_density: bool
    enlarged_kissing: bool
    branch: Branch
    predicted_minimum: Rational

    @model_validator(mode="after")
    def check_optimal_implies_wr(self):
        if self.optimal_density and not self.well_rounded:
            raise ValueError("an optimal-density verdict must be well-rounded")
        return self


class SweepSpec(FrozenModel):
    family: ConstructionFamily
    a_range: Tuple[int, int]
    b_range: Optional[Tuple[int, int]] = None
    c_range: Optional[Tuple[int, int]] = None
    p_range: Optional[Tuple[int, int]] = None
    gamma_sq_values: Optional[Tuple[int, ...]] = None
    box_margin: int = Field(default=2, ge=0)


CSV_COLUMNS = [
    "family", "a", "b", "c", "d", "valid", "theorem_wr", "oracle_wr", "agree", "lambda",
    "kissing", "delta_sq_num", "delta_sq_den", "optimal", "enlarged_kissing",
]


class SweepRecord(FrozenModel):
    family: Optional[ConstructionFamily] = None
    a: int
    b: int
    c: Optional[int] = None
    d: Optional[int] = None
    valid: bool
    theorem_wr: Optional[bool] = None
    oracle_wr: Optional[bool] = None
    agree: Optional[bool] = None
    lambda_min: Optional[Rational] = None
    kissing: Optional[int] = None
    delta_sq: Optional[Rational] = None
    optimal: Optional[bool] = None
    enlarged_kissing: Optional[bool] = None
    predicted_minimum: Optional[Rational] = None
    gram_residual: Optional[float] = None
    det_consistent: Optional[bool] = None
    lemma_consistent: Optional[bool] = None

    @model_validator(mode="after")
    def check_agreement(self):
        if self.valid and self.agree != (self.theorem_wr == self.oracle_wr):
            raise ValueError("agree must equal (theorem_wr == oracle_wr)")
        if not self.valid and self.theorem_wr is not None:
            raise ValueError("invalid grid points carry no verdicts")
        return self

    @property
    def coefficient_key(self) -> Tuple[int, ...]:
        return (self.a, self.b, self.c or 0, self.d or 0)

    def csv_row(self) -> Dict[str, object]:
        return {
            "family": self.family.value if self.family else None,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "d": self.d,
            "valid": self.valid,
            "theorem_wr": self.theorem_wr,
            "oracle_wr": self.oracle_wr,
            "agree": self.agree,
            "lambda": str(self.lambda_min) if self.lambda_min is not None else None,
            "kissing": self.kissing,
            "delta_sq_num": self.delta_sq.numerator if self.delta_sq is not None else None,
            "delta_sq_den": self.delta_sq.denominator if self.delta_sq is not None else None,
            "optimal": self.optimal,
            "enlarged_kissing": self.enlarged_kissing,
        }


class Mismatch(FrozenModel):
    record: SweepRecord
    branch: Branch
    predicted_minimum: Rational
    minimal_vectors: Tuple[CoordinateVector, ...]


class SweepReport(FrozenModel):
    spec: SweepSpec
    total_points: int
    valid_points: int
    agreements: int
    mismatches: List[Mismatch]
    optimal_count: int
    enlarged_kissing_count: int
    wall_time_millis: int
    records: List[SweepRecord]
    structural_failures: List[str] = []

    @model_validator(mode="after")
    def check_totals(self):
        if self.agreements + len(self.mismatches) != self.valid_points:
            raise ValueError("agreements + mismatches must equal the number of valid points")
        return self


class GoldenCheck(FrozenModel):
    name: str
    passed: bool
    details: List[str] = []


class VerificationSummary(FrozenModel):
    families: int
    instances: int
    mismatches: int
    golden: List[GoldenCheck]
    oracle_samples: int
    failures: List[str]

    @property
    def golden_passed(self) -> int:
        return sum(1 for check in self.golden if check.passed)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary_line(self) -> str:
        return (f"{self.families} families, {self.instances} instances, "
                f"{self.mismatches} mismatches, "
                f"{self.golden_passed}/{len(self.golden)} golden values")


class GridSettings(BaseModel):
    a: Tuple[int, int]
    b: Optional[Tuple[int, int]] = None
    c: Optional[Tuple[int, int]] = None
    p: Optional[Tuple[int, int]] = None
    gamma_sq: Optional[Tuple[int, ...]] = None


def _default_grids() -> Dict[ConstructionFamily, GridSettings]:
    return {
        ConstructionFamily.F2R: GridSettings(a=(-12, 12), b=(-12, 12)),
        ConstructionFamily.F2C: GridSettings(a=(-12, 12), b=(-12, 12)),
        ConstructionFamily.F3R: GridSettings(a=(-12, 12), b=(-12, 12), c=(-8, 8)),
        ConstructionFamily.F4S: GridSettings(a=(-10, 10), p=(-6, 6), gamma_sq=(1, 4)),
    }


class OutputSettings(BaseModel):
    output_dir: str = "data"
    filename_prefix: str = "sweep"


class LoggingSettings(BaseModel):
    console_level: str = "INFO"
    file_level: str = "DEBUG"


class Settings(BaseModel):
    grids: Dict[ConstructionFamily, GridSettings] = Field(default_factory=_default_grids)
    box_margin: int = Field(default=2, ge=0)
    workers: int = Field(default=1, ge=1)
    oracle_samples: int = Field(default=100, ge=0)
    seed: int = 1729
    gram_tolerance: float = 1e-8
    output: OutputSettings = Field(default_factory=OutputSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    @model_validator(mode="after")
    def fill_missing_grids(self):
        for family, grid in _default_grids().items():
            self.grids.setdefault(family, grid)
        return self

    def sweep_spec(self, family: ConstructionFamily) -> SweepSpec:
        grid = self.grids[family]
        return SweepSpec(family=family, a_range=grid.a, b_range=grid.b, c_range=grid.c,
                         p_range=grid.p, gamma_sq_values=grid.gamma_sq,
                         box_margin=self.box_margin)
