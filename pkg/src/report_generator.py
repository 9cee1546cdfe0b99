from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import pandas as pd

from .models import (CenterDensitySq, CriterionVerdict, LatticeInstance, MinResult, SweepReport,
                     VerificationSummary, fraction_to_json)


def _num(value: float) -> str:
    """Floating values are shown with 6 significant digits"""
    return f"{value:.6g}"


def _exact(value: Fraction) -> str:
    return f"{value} (≈ {_num(float(value))})"


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


class TableReportGenerator:
    """Render lattice analyses, minimal-vector listings and sweep summaries as text tables"""

    def _key_values(self, rows: Sequence[Tuple[str, str]]) -> str:
        frame = pd.DataFrame(rows, columns=["field", "value"])
        return frame.to_string(index=False, header=False, justify="left")

    def _gram_table(self, instance: LatticeInstance) -> str:
        frame = pd.DataFrame([[str(v) for v in row] for row in instance.gram.entries])
        return frame.to_string(index=False, header=False)

    def analysis(self, instance: LatticeInstance, result: MinResult, verdict: CriterionVerdict,
                 density: CenterDensitySq) -> str:
        roots = ", ".join(
            _num(re) if im == 0 else f"{_num(re)}{'+' if im > 0 else '-'}{_num(abs(im))}i"
            for re, im in instance.classification.roots)
        rows = [
            ("polynomial", str(instance.poly)),
            ("root structure", instance.classification.kind.value),
            ("roots", roots),
            ("family", f"{instance.family.label} (dimension {instance.dimension})"),
            ("valid", "yes"),
            ("det(G) closed form", str(instance.det_closed_form)),
            ("det(G) exact", str(instance.gram.det_exact)),
            ("minimum", _exact(result.lambda_min)),
            ("predicted minimum", str(verdict.predicted_minimum)),
            ("kissing number", str(result.kissing_number)),
            ("well-rounded (theorem)", _yes_no(verdict.well_rounded)),
            ("well-rounded (enumeration)", _yes_no(result.well_rounded)),
            ("agree", _yes_no(verdict.well_rounded == result.well_rounded)),
            ("delta^2", _exact(density.value)),
            ("delta", _num(density.numeric_approx)),
            ("optimal density", _yes_no(verdict.optimal_density)),
            ("enlarged kissing", _yes_no(verdict.enlarged_kissing)),
            ("branch", verdict.branch.value),
        ]
        return (self._key_values(rows) + "\n\nGram matrix G:\n" + self._gram_table(instance)
                + "\n")

    def analysis_dict(self, instance: LatticeInstance, result: MinResult,
                      verdict: CriterionVerdict, density: CenterDensitySq) -> Dict:
        return {
            "polynomial": list(instance.poly.coefficients),
            "kind": instance.classification.kind.value,
            "family": instance.family.value,
            "valid": True,
            "gram": [[fraction_to_json(v) for v in row] for row in instance.gram.entries],
            "det_closed_form": fraction_to_json(instance.det_closed_form),
            "det_exact": fraction_to_json(instance.gram.det_exact),
            "lambda": fraction_to_json(result.lambda_min),
            "kissing": result.kissing_number,
            "theorem_wr": verdict.well_rounded,
            "oracle_wr": result.well_rounded,
            "agree": verdict.well_rounded == result.well_rounded,
            "delta_sq": fraction_to_json(density.value),
            "delta": density.numeric_approx,
            "optimal": verdict.optimal_density,
            "enlarged_kissing": verdict.enlarged_kissing,
            "branch": verdict.branch.value,
        }

    def minimal_vectors(self, instance: LatticeInstance, result: MinResult,
                        embeddings: List[Tuple[float, ...]]) -> str:
        frame = pd.DataFrame({
            "coordinates": [str(v) for v in result.minimal_vectors],
            "norm": [str(result.lambda_min)] * result.kissing_number,
            "embedding": ["(" + ", ".join(_num(x) for x in e) + ")" for e in embeddings],
        })
        header = (f"{instance.poly}: {instance.family.label}, "
                  f"{result.kissing_number} minimal vectors of norm {result.lambda_min}")
        return header + "\n" + frame.to_string(index=False) + "\n"

    def minimal_vectors_list(self, result: MinResult,
                             embeddings: List[Tuple[float, ...]]) -> List[Dict]:
        return [{"coordinates": list(v), "norm": fraction_to_json(result.lambda_min),
                 "embedding": list(e)}
                for v, e in zip(result.minimal_vectors, embeddings)]

    def sweep_summary(self, report: SweepReport) -> str:
        rows = [
            ("family", report.spec.family.label),
            ("grid points", str(report.total_points)),
            ("valid points", str(report.valid_points)),
            ("agreements", str(report.agreements)),
            ("optimal", str(report.optimal_count)),
            ("enlarged kissing", str(report.enlarged_kissing_count)),
            ("structural failures", str(len(report.structural_failures))),
        ]
        lines = [self._key_values(rows)]
        if report.mismatches:
            frame = pd.DataFrame([{
                "a": m.record.a, "b": m.record.b,
                "c": "" if m.record.c is None else m.record.c,
                "theorem": _yes_no(m.record.theorem_wr),
                "enumeration": _yes_no(m.record.oracle_wr),
                "minimum": str(m.record.lambda_min),
                "branch": m.branch.value,
            } for m in report.mismatches])
            lines.append(frame.to_string(index=False))
        for failure in report.structural_failures:
            lines.append(f"FAIL {failure}")
        lines.append(f"mismatches: {len(report.mismatches)}")
        return "\n".join(lines) + "\n"

    def verification(self, summary: VerificationSummary) -> str:
        frame = pd.DataFrame([{"golden check": check.name, "passed": _yes_no(check.passed)}
                              for check in summary.golden])
        lines = [frame.to_string(index=False),
                 f"oracle cross-checks: {summary.oracle_samples}"]
        lines += [f"FAIL {failure}" for failure in summary.failures]
        lines.append(summary.summary_line())
        lines.append("PASS" if summary.passed else "FAIL")
        return "\n".join(lines) + "\n"

    def verification_dict(self, summary: VerificationSummary) -> Dict:
        return {
            "families": summary.families,
            "instances": summary.instances,
            "mismatches": summary.mismatches,
            "golden": [check.model_dump(mode="json") for check in summary.golden],
            "golden_passed": summary.golden_passed,
            "oracle_samples": summary.oracle_samples,
            "failures": summary.failures,
            "passed": summary.passed,
        }
