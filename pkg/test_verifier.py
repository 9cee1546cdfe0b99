#!/usr/bin/env python3
"""
Tests for coefficient sweeps, report writers and the verification run
"""
import json
from fractions import Fraction

import pytest

from src import criteria
from src.errors import InvalidSpecError
from src.models import (ConstructionFamily, GridSettings, IntPolynomial, Settings, SweepRecord,
                        SweepSpec)
from src.verifier import (check_oracle_consistency, cross_check_instance,
                          family_invariant_failures, golden_checks, grid_points, lemma_consistent,
                          report_to_csv, report_to_json, run_sweep, run_verification,
                          structural_failures)

F2R, F2C, F3R, F4S = (ConstructionFamily.F2R, ConstructionFamily.F2C,
                      ConstructionFamily.F3R, ConstructionFamily.F4S)

CSV_HEADER = ("family,a,b,c,d,valid,theorem_wr,oracle_wr,agree,lambda,kissing,"
              "delta_sq_num,delta_sq_den,optimal,enlarged_kissing")


def small_settings(**overrides) -> Settings:
    grids = {
        F2R: GridSettings(a=(-4, 4), b=(-4, 4)),
        F2C: GridSettings(a=(-4, 4), b=(-4, 4)),
        F3R: GridSettings(a=(-3, 3), b=(-3, 3), c=(-2, 2)),
        F4S: GridSettings(a=(-4, 4), p=(-3, 3), gamma_sq=(1, 4)),
    }
    return Settings(grids=grids, oracle_samples=10, **overrides)


def test_grid_points():
    spec = SweepSpec(family=F2R, a_range=(-2, 2), b_range=(-1, 1))
    points = grid_points(spec)
    assert len(points) == 12
    assert all(p.a != 0 for p in points)

    quartics = grid_points(SweepSpec(family=F4S, a_range=(1, 2), p_range=(0, 1), gamma_sq_values=(4, 1, 4)))
    assert len(quartics) == 2 * 2 * 2
    assert quartics[0].coefficients == (1, -1, -1, 0)


@pytest.mark.parametrize("spec", [
    SweepSpec(family=F2R, a_range=(-2, 2)),
    SweepSpec(family=F3R, a_range=(-2, 2), b_range=(0, 1)),
    SweepSpec(family=F4S, a_range=(1, 2), p_range=(0, 1)),
    SweepSpec(family=F4S, a_range=(1, 2), p_range=(0, 1), gamma_sq_values=(0, 1)),
])
def test_grid_points_rejects_incomplete_specs(spec):
    with pytest.raises(InvalidSpecError):
        grid_points(spec)


def test_empty_grid_is_rejected():
    with pytest.raises(InvalidSpecError):
        run_sweep(SweepSpec(family=F2R, a_range=(0, 0), b_range=(0, 0)))


def test_f2r_sweep():
    spec = SweepSpec(family=F2R, a_range=(-6, 6), b_range=(-6, 6))
    report = run_sweep(spec)
    expected_valid = sum(1 for a in range(-6, 7) for b in range(-6, 7) if a and a * a - 4 * b > 0)
    assert report.total_points == 12 * 13
    assert report.valid_points == expected_valid
    assert report.mismatches == []
    assert report.agreements == expected_valid
    assert report.structural_failures == []
    # a^2 = 6b: (6, 6), (-6, 6); a^2 = -2b: (2, -2), (-2, -2)
    assert report.optimal_count == 4
    keys = [record.coefficient_key for record in report.records]
    assert keys == sorted(keys)


def test_invalid_points_carry_no_verdicts():
    report = run_sweep(SweepSpec(family=F2C, a_range=(1, 2), b_range=(0, 2)))
    invalid = [record for record in report.records if not record.valid]
    assert invalid
    assert all(record.theorem_wr is None and record.kissing is None for record in invalid)
    assert all(record.family is F2C for record in invalid)


def test_f3r_sweep_is_independent_of_c():
    report = run_sweep(SweepSpec(family=F3R, a_range=(-4, 4), b_range=(-4, 4), c_range=(-4, 4)))
    assert report.mismatches == []
    assert report.structural_failures == []
    assert family_invariant_failures(report) == []


def test_f4s_sweep():
    report = run_sweep(SweepSpec(family=F4S, a_range=(-6, 6), p_range=(-4, 4), gamma_sq_values=(1, 4)))
    assert report.valid_points > 0
    assert report.mismatches == []
    assert report.optimal_count == 0
    assert all(record.kissing != 24 for record in report.records if record.valid)
    assert family_invariant_failures(report) == []


def test_parallel_sweep_matches_sequential():
    spec = SweepSpec(family=F3R, a_range=(-3, 3), b_range=(-3, 3), c_range=(-2, 2))
    sequential = run_sweep(spec)
    parallel = run_sweep(spec, workers=3)
    assert parallel.records == sequential.records
    assert report_to_json(parallel) == report_to_json(sequential)
    assert report_to_csv(parallel) == report_to_csv(sequential)


def test_csv_output():
    report = run_sweep(SweepSpec(family=F2R, a_range=(6, 6), b_range=(6, 6)))
    lines = report_to_csv(report).splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "f2r,6,6,,,True,True,True,True,24,6,1,12,True,True"


def test_json_output_is_reproducible():
    spec = SweepSpec(family=F2C, a_range=(-3, 3), b_range=(0, 4))
    first = report_to_json(run_sweep(spec))
    second = report_to_json(run_sweep(spec))
    assert first == second
    data = json.loads(first)
    assert "wall_time_millis" not in data["header"]
    assert data["header"]["mismatches"] == 0
    valid = [record for record in data["records"] if record["valid"]]
    assert all(record["diagnostics"]["det_consistent"] for record in valid)


def test_structural_failures_report_bad_records():
    good = cross_check_instance(IntPolynomial.from_coefficients([6, 6]))
    assert structural_failures(good) == []
    bad = SweepRecord.model_validate({**good.model_dump(), "det_consistent": False, "kissing": 5})
    failures = structural_failures(bad)
    assert any("det(G)" in failure for failure in failures)
    assert any("odd kissing" in failure for failure in failures)


def test_lemma_consistent():
    for family in ConstructionFamily:
        assert lemma_consistent(family, 5, -3)


def test_oracle_consistency():
    spec = SweepSpec(family=F4S, a_range=(-4, 4), p_range=(-3, 3), gamma_sq_values=(1, 4))
    report = run_sweep(spec)
    checked, failures = check_oracle_consistency(spec, 15, seed=7, report=report)
    assert checked == min(15, report.valid_points)
    assert failures == []


def test_oracle_consistency_without_report():
    spec = SweepSpec(family=F2C, a_range=(-3, 3), b_range=(0, 5))
    checked, failures = check_oracle_consistency(spec, 5, seed=1)
    assert checked == 5
    assert failures == []


def test_golden_checks():
    checks = golden_checks()
    assert [check.name for check in checks] == [
        "hexagonal density 1/12",
        "cubic density 1/32",
        "cubic density 27/1024",
        "quartic kissing 12",
    ]
    assert all(check.passed for check in checks), [check.details for check in checks]


def test_cross_check_instance():
    record = cross_check_instance(IntPolynomial.from_coefficients([1, -1, 0]))
    assert record.family is F3R
    assert record.lambda_min == 3
    assert record.kissing == 8
    assert record.delta_sq == Fraction(27, 1024)
    assert record.enlarged_kissing


def test_run_verification_passes():
    summary = run_verification(small_settings())
    assert summary.passed, summary.failures
    assert summary.families == 4
    assert summary.mismatches == 0
    assert summary.golden_passed == 4
    assert summary.summary_line() == f"4 families, {summary.instances} instances, 0 mismatches, 4/4 golden values"


def test_run_verification_catches_a_broken_criterion(monkeypatch):
    monkeypatch.setitem(criteria.WR_RULES, F3R, lambda a, b: a * a >= 5 * b)
    summary = run_verification(small_settings(), samples=0)
    assert not summary.passed
    assert summary.mismatches > 0
    assert any(failure.startswith("F3R theorem mismatch") for failure in summary.failures)


def test_optimal_points_have_hexagonal_density():
    report = run_sweep(SweepSpec(family=F2C, a_range=(-4, 4), b_range=(0, 6)))
    assert family_invariant_failures(report) == []
    optimal = [record for record in report.records if record.valid and record.optimal]
    assert optimal and all(record.delta_sq == Fraction(1, 12) for record in optimal)

    tampered = optimal[0].model_copy(update={"delta_sq": Fraction(1, 10)})
    broken = report.model_copy(update={"records": [tampered]})
    failures = family_invariant_failures(broken)
    assert failures == [f"F2C {tampered.coefficient_key}: optimal with density 1/10, expected 1/12"]
