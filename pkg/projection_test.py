import numpy as np
import pytest

from laplace_panels import InvalidGapPattern, KernelFamily
from laplace_panels.projection import classify_case, decompose, orthogonalize


def test_orthogonalize_rebuilds_inputs(rng):
    a = [rng.normal(size=3) for _ in range(3)]
    ortho = orthogonalize(a)
    for i in range(3):
        for k in range(i):
            assert np.dot(ortho.u[i], ortho.u[k]) == pytest.approx(0.0, abs=1e-12)
        rebuilt = sum(ortho.c[k, i] * ortho.u[k] for k in range(3))
        np.testing.assert_allclose(rebuilt, a[i], atol=1e-12)
    assert ortho.zero == (False, False, False)


def test_four_vectors_in_three_dimensions_leave_one_zero(rng):
    a = [rng.normal(size=3) for _ in range(4)]
    ortho = orthogonalize(a)
    assert ortho.zero == (False, False, False, True)
    np.testing.assert_array_equal(ortho.u[3], np.zeros(3))


def test_decompose_full_rank(rng):
    a = [rng.normal(size=3), rng.normal(size=3)]
    e = rng.normal(size=3)
    dec = decompose(e, a)
    assert dec.rank == 2
    for vec in a:
        assert np.dot(dec.e_perp, vec) == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(dec.s0[0] * a[0] + dec.s0[1] * a[1], dec.e_par, atol=1e-14)
    np.testing.assert_allclose(dec.e_par + dec.e_perp, e, atol=1e-14)
    assert dec.h == pytest.approx(np.linalg.norm(dec.e_perp))


def test_decompose_in_span_has_zero_gap():
    a = [np.array([1.0, 0.0, 0.0]), np.array([0.0, 2.0, 0.0])]
    dec = decompose(np.array([3.0, -4.0, 0.0]), a)
    assert dec.s0 == pytest.approx((3.0, -2.0))
    assert dec.h == 0.0


def test_dependent_direction_gets_zero_coefficient():
    a1 = np.array([1.0, 2.0, 0.5])
    dec = decompose(np.array([2.0, 4.0, 1.0]), [a1, -2.0 * a1])
    assert dec.rank == 1
    assert dec.s0 == pytest.approx((2.0, 0.0))
    assert dec.h == pytest.approx(0.0, abs=1e-14)


def test_self_action_directions_lose_two_vectors():
    l1 = np.array([1.0, 0.0, 0.0])
    l3 = np.array([-0.5, -np.sqrt(3.0) / 2.0, 0.0])
    ortho = orthogonalize([l1, -l3, -l1, l3])
    assert ortho.zero == (False, False, True, True)


def test_reversed_order_gives_same_projection(rng):
    a = [rng.normal(size=3) for _ in range(3)]
    e = rng.normal(size=3)
    forward = decompose(e, a)
    backward = decompose(e, a, order=(2, 1, 0))
    np.testing.assert_allclose(forward.e_par, backward.e_par, atol=1e-12)
    assert forward.s0 == pytest.approx(backward.s0, rel=1e-10)


@pytest.mark.parametrize(
    "gaps, number",
    [
        ((1.0, 0.0, 0.0, 0.0), 1),
        ((0.0, 1.0, 0.0, 0.0), 2),
        ((1.0, 1.0, 0.0, 0.0), 3),
        ((1.0, 0.0, 1.0, 0.0), 4),
        ((0.0, 1.0, 1.0, 0.0), 5),
        ((1.0, 0.0, 0.0, 1.0), 6),
        ((0.0, 1.0, 0.0, 1.0), 7),
        ((0.0, 0.0, 0.0, 0.0), 8),
    ],
)
def test_case_table(gaps, number):
    pc = classify_case(*gaps, zero_tol=1e-10)
    assert pc.number == number
    assert pc.gaps == gaps


@pytest.mark.parametrize(
    "gaps",
    [
        (0.0, 0.0, 1.0, 0.0),
        (1.0, 1.0, 1.0, 0.0),
        (1.0, 0.0, 1.0, 1.0),
        (0.0, 0.0, 0.0, 1.0),
    ],
)
def test_inadmissible_patterns(gaps):
    with pytest.raises(InvalidGapPattern):
        classify_case(*gaps, zero_tol=1e-10)


def test_family_restrictions():
    with pytest.raises(InvalidGapPattern):
        classify_case(1.0, 0.0, 0.0, 0.0, zero_tol=1e-10, family=KernelFamily.PRIMED)
    with pytest.raises(InvalidGapPattern):
        classify_case(0.0, 0.0, 0.0, 0.0, zero_tol=1e-10, family=KernelFamily.PRIMED)
    with pytest.raises(InvalidGapPattern):
        classify_case(1.0, 0.0, 1.0, 0.0, zero_tol=1e-10, family=KernelFamily.HAT)
    assert classify_case(0.0, 0.0, 0.0, 0.0, zero_tol=1e-10, family=KernelFamily.HAT).number == 8


def test_small_gaps_snap_to_zero():
    pc = classify_case(1.0, 1e-13, 0.0, 0.0, zero_tol=1e-10)
    assert pc.number == 1
    assert pc.gaps == (1.0, 0.0, 0.0, 0.0)
    pc = classify_case(2.0, 1e-13, 0.0, 0.0, zero_tol=1e-10, scale=1e-4)
    assert pc.number == 3
