"""
Engine layer test script.

Checks galerkin_all against the published benchmark tables: three
non-touching pairs with all four integrals, and parallel-plane pairs at six
offsets. Runs under pytest, or directly for a printed report.
"""

import numpy as np
import pytest

from laplace_panels import Branch, ContactKind, galerkin_all
from laplace_panels.oracle import table1_cases, table2_cases
from validation_runner import GOLDEN_TOLERANCE, check_golden_case, format_report, golden_cases

TABLE1 = table1_cases()
TABLE2 = table2_cases()


def _values(out):
    return {
        "L": out.L,
        "M": out.M,
        "Lp_x": out.Lp[0],
        "Lp_y": out.Lp[1],
        "Lp_z": out.Lp[2],
        "Mp": out.Mp,
    }


@pytest.mark.parametrize("case", TABLE1, ids=lambda c: c.name)
def test_table1(case):
    out = galerkin_all(case.tx, case.ty)
    assert out.contact.kind is ContactKind.NO_TOUCH
    # the third receiver lies in z = 1, parallel to the source
    branch = Branch.PARALLEL_PLANES if case.name == "table1_case3" else Branch.NON_DEGENERATE
    assert out.branch is branch
    computed = _values(out)
    for quantity, expected in case.expected.items():
        assert abs(computed[quantity] - expected) <= GOLDEN_TOLERANCE, quantity


@pytest.mark.parametrize("case", TABLE2, ids=lambda c: c.name)
def test_table2(case):
    computed = _values(galerkin_all(case.tx, case.ty))
    for quantity, expected in case.expected.items():
        assert abs(computed[quantity] - expected) <= GOLDEN_TOLERANCE, quantity


def test_table2_reference_column_agrees():
    for case in TABLE2:
        for quantity, value in (case.reference or {}).items():
            assert abs(value - case.expected[quantity]) < 1e-13


def test_table2_coplanar_offset_is_two_touch():
    case = TABLE2[0]
    out = galerkin_all(case.tx, case.ty)
    assert out.branch is Branch.COPLANAR
    assert out.contact.kind is ContactKind.TWO_TOUCH


def test_table2_offsets_are_parallel_planes():
    for case in TABLE2[1:6]:
        out = galerkin_all(case.tx, case.ty)
        assert out.branch is Branch.PARALLEL_PLANES
        assert np.isfinite(out.M)


def test_table1_gradient_identities():
    for case in TABLE1:
        out = galerkin_all(case.tx, case.ty)
        assert abs(out.Lp[0]) <= GOLDEN_TOLERANCE
        assert abs(out.Lp[2] + out.M) <= GOLDEN_TOLERANCE


def test_golden_checks_pass():
    for name in golden_cases():
        result = check_golden_case(name)
        assert result["status"] == "success", result["message"]


def test_impossible_tolerance_fails():
    result = check_golden_case(TABLE1[0].name, tol=0.0)
    assert result["status"] == "failed"


def main():
    print("=" * 60)
    print("ENGINE TEST")
    print("=" * 60)
    print(format_report([check_golden_case(name) for name in golden_cases()]))
    print("=" * 60)


if __name__ == "__main__":
    main()
