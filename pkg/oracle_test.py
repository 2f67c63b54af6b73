import math

import numpy as np
import pytest

from laplace_panels import ContactKind, ToleranceNotReached, contour_flux, galerkin_all, triangle_from_vertices
from laplace_panels.oracle import (
    convergence_sweep,
    fit_slope,
    nested_quad,
    quad_reference,
    sweep_geometry,
    sweep_limits,
    sweep_slopes,
    table1_cases,
)
from validation_runner import check_oracle_pair, random_separated_pair

# Random pairs cross-checked against quadrature.
ORACLE_PAIRS = 4

SWEEP_EPS = list(np.geomspace(1e-2, 1e-6, 9))


def test_nested_quad_of_polynomial():
    result = nested_quad(lambda a, b: a * b, 2, tol=1e-10)
    assert result.value == pytest.approx(0.25, rel=1e-13)
    assert result.error_estimate >= 1e-10 * 0.25
    assert result.evaluations >= 21 * 21


def test_nested_quad_raises_when_limit_is_too_small():
    with pytest.raises(ToleranceNotReached):
        nested_quad(lambda z: abs(z - 1.0 / 3.0) ** 0.5, 1, tol=1e-14, limit=1)


def test_quadrature_reproduces_table1():
    case = table1_cases()[0]
    for which, key in (("L", "L"), ("M", "M"), ("Mp", "Mp")):
        ref = quad_reference(case.tx, case.ty, which, tol=1e-9)
        assert ref.value == pytest.approx(case.expected[key], abs=1e-8)


def test_quadrature_of_vanishing_double_layer(equilateral):
    ty = triangle_from_vertices((3.0, 0.0, 0.0), (4.0, 0.0, 0.0), (3.0, 1.0, 0.0))
    ref = quad_reference(equilateral, ty, "M", atol=1e-14)
    assert abs(ref.value) <= 1e-14


def test_quadrature_raises_when_subdivision_is_exhausted(rng):
    tx, ty = random_separated_pair(rng, separation=0.05)
    with pytest.raises(ToleranceNotReached):
        quad_reference(tx, ty, "L", tol=1e-14, limit=1)


def test_error_estimate_reflects_requested_tolerance(rng):
    tx, ty = random_separated_pair(rng)
    for tol in (1e-6, 1e-10):
        ref = quad_reference(tx, ty, "L", tol=tol)
        assert ref.error_estimate >= tol * abs(ref.value)


def test_unknown_quantity():
    case = table1_cases()[0]
    with pytest.raises(ValueError):
        quad_reference(case.tx, case.ty, "N")


@pytest.mark.parametrize("seed", range(ORACLE_PAIRS))
def test_analytic_agrees_with_quadrature(seed):
    result = check_oracle_pair(seed)
    assert result["status"] == "success", result["message"]


def test_flux_agrees_with_quadrature(rng):
    tx, ty = random_separated_pair(rng)
    flux = contour_flux(tx, ty)
    for which, value in (("Fx", flux.Fx), ("Fy", flux.Fy)):
        ref = quad_reference(tx, ty, which)
        np.testing.assert_allclose(value, ref.value, rtol=0.0, atol=10.0 * ref.error_estimate + 1e-14)


def test_tighter_tolerance_stays_within_estimate(rng):
    tx, ty = random_separated_pair(rng)
    loose = quad_reference(tx, ty, "L", tol=1e-8)
    tight = quad_reference(tx, ty, "L", tol=1e-11)
    assert abs(tight.value - loose.value) <= max(loose.error_estimate, 1e-15)


@pytest.mark.parametrize("kind", [ContactKind.ONE_TOUCH, ContactKind.TWO_TOUCH])
def test_linear_convergence_of_surface_integrals(kind):
    slopes = sweep_slopes(convergence_sweep(kind, SWEEP_EPS))
    assert slopes["L"] == pytest.approx(1.0, abs=0.1)
    assert slopes["M"] == pytest.approx(1.0, abs=0.1)
    if kind is ContactKind.ONE_TOUCH:
        # eps ln(1/eps) over this range fits to a slope near 0.88
        assert 0.8 < slopes["Mp"] < 0.95


def test_one_touch_hypersingular_follows_eps_log_model():
    eps = list(np.geomspace(1e-3, 1e-5, 5))
    records = convergence_sweep(ContactKind.ONE_TOUCH, eps)
    ratios = [r.rel_Mp / (r.eps * math.log(1.0 / r.eps)) for r in records]
    constant = ratios[len(ratios) // 2]
    for ratio in ratios:
        assert ratio == pytest.approx(constant, rel=0.2)


@pytest.mark.parametrize("kind", [ContactKind.TWO_TOUCH, ContactKind.THREE_TOUCH])
def test_hypersingular_follows_log_model(kind):
    eps = list(np.geomspace(1e-3, 1e-5, 5))
    records = convergence_sweep(kind, eps)
    ratios = [r.rel_Mp / (r.eps / math.log(1.0 / r.eps)) for r in records]
    constant = ratios[len(ratios) // 2]
    for ratio in ratios:
        assert ratio == pytest.approx(constant, rel=0.2)


def test_three_touch_limit_is_exact(equilateral):
    assert galerkin_all(equilateral, equilateral).L == pytest.approx(0.75 * math.log(3.0), rel=1e-15)


def test_sweep_geometry_offsets():
    tx, ty = sweep_geometry(ContactKind.TWO_TOUCH, 1e-3)
    np.testing.assert_allclose(ty.v1 - tx.v1, (0.0, 0.0, 1e-3))
    np.testing.assert_allclose(ty.v2 - tx.v2, (0.0, 0.0, 1e-3))
    L0, M0, Mp0 = sweep_limits(ContactKind.ONE_TOUCH, 1e-3)
    assert L0 == 0.182526568122379


def test_sweep_rejects_bad_offsets():
    with pytest.raises(ValueError):
        convergence_sweep(ContactKind.ONE_TOUCH, [1e-4, 1e-3])
    with pytest.raises(ValueError):
        convergence_sweep(ContactKind.ONE_TOUCH, [1e-3, 0.0])
    with pytest.raises(ValueError):
        sweep_geometry(ContactKind.NO_TOUCH, 1e-3)


def test_fit_slope():
    eps = [1e-2, 1e-3, 1e-4]
    assert fit_slope(eps, [3.0 * e for e in eps]) == pytest.approx(1.0, rel=1e-12)
    assert fit_slope(eps, [e * e for e in eps]) == pytest.approx(2.0, rel=1e-12)
    assert fit_slope([1e-3], [1e-3]) is None
    assert fit_slope(eps, [1e-17, 1e-17, 1e-3]) is None
