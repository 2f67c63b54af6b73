import math

import numpy as np
import pytest

from laplace_panels import (
    AmbiguousContact,
    ContactKind,
    DegenerateTriangle,
    NotParallel,
    Triangle,
    contact_classification,
    triangle_from_vertices,
)
from laplace_panels.geometry import chart, edge_between, signed_plane_distance


def test_equilateral_derived_quantities(equilateral):
    assert equilateral.area == pytest.approx(math.sqrt(3.0) / 4.0, rel=1e-15)
    assert equilateral.lengths == pytest.approx((1.0, 1.0, 1.0), rel=1e-15)
    assert equilateral.perimeter == pytest.approx(3.0)
    np.testing.assert_allclose(equilateral.normal, (0.0, 0.0, 1.0), atol=1e-15)


def test_edge_normals_point_outward(equilateral):
    centroid = sum(equilateral.vertices) / 3.0
    for i in range(3):
        n = equilateral.edge_normal(i)
        midpoint = equilateral.edge_start(i) + 0.5 * equilateral.edges[i]
        assert np.dot(n, midpoint - centroid) > 0.0
        assert np.dot(n, equilateral.normal) == pytest.approx(0.0, abs=1e-15)
        assert np.linalg.norm(n) == pytest.approx(1.0)


def test_chart_reproduces_vertices(equilateral):
    c = chart(equilateral)
    np.testing.assert_array_equal(c.origin, equilateral.v1)
    np.testing.assert_allclose(equilateral.point(1.0, 0.0), equilateral.v2)
    np.testing.assert_allclose(equilateral.point(0.0, 1.0), equilateral.v3)
    np.testing.assert_allclose(c.origin + c.s + c.t, equilateral.v2 + equilateral.v3 - equilateral.v1)


@pytest.mark.parametrize(
    "vertices",
    [
        ((0, 0, 0), (1, 0, 0), (2, 0, 0)),
        ((0, 0, 0), (0, 0, 0), (0, 1, 0)),
        ((0, 0, 0), (1, 0, 0), (float("nan"), 1, 0)),
        ((0, 0, 0), (1, 0, 0), (0.5, 1e-14, 0)),
    ],
)
def test_degenerate_triangles_are_rejected(vertices):
    with pytest.raises(DegenerateTriangle):
        triangle_from_vertices(*vertices)


def test_rotation_keeps_orientation(equilateral):
    r = equilateral.rotated(1)
    np.testing.assert_array_equal(r.v1, equilateral.v2)
    np.testing.assert_allclose(r.normal, equilateral.normal, atol=1e-15)
    assert r.area == pytest.approx(equilateral.area)
    assert equilateral.rotated(3) is equilateral


def test_vertices_are_read_only(equilateral):
    with pytest.raises(ValueError):
        equilateral.v1[0] = 5.0


def test_edge_between():
    assert edge_between(1, 2) == 1
    assert edge_between(3, 2) == 2
    assert edge_between(1, 3) == 3
    with pytest.raises(ValueError):
        edge_between(2, 2)


def test_separate_triangles_do_not_touch(equilateral):
    ty = triangle_from_vertices((0, 0, 2), (1, 0, 2), (0, 1, 2))
    contact = contact_classification(equilateral, ty)
    assert contact.kind is ContactKind.NO_TOUCH
    assert not contact.touching
    assert str(contact) == "NoTouch"


def test_shared_vertex(equilateral):
    ty = triangle_from_vertices((0, 0, 0), (-1, 0, 0), (-0.5, 0, math.sqrt(3) / 2))
    contact = contact_classification(equilateral, ty)
    assert contact.kind is ContactKind.ONE_TOUCH
    assert contact.pairs == ((1, 1),)
    assert str(contact) == "OneTouch(1,1)"


def test_shared_edge(equilateral):
    ty = triangle_from_vertices((0, 0, 0), (1, 0, 0), (0.5, 0, math.sqrt(3) / 2))
    contact = contact_classification(equilateral, ty)
    assert contact.kind is ContactKind.TWO_TOUCH
    assert contact.shared_edges == ((1, 1),)
    assert str(contact) == "TwoTouch(1,1)"


def test_shared_edge_with_other_labels(equilateral):
    # x2 = y1, x3 = y3: edge 2 of tx against edge 3 of ty
    ty = triangle_from_vertices(equilateral.v2, (1.5, 0.5, 0.3), equilateral.v3)
    contact = contact_classification(equilateral, ty)
    assert contact.pairs == ((2, 1), (3, 3))
    assert contact.shared_edges == ((2, 3),)
    assert contact.transposed().shared_edges == ((3, 2),)


def test_classification_of_swapped_pair_is_transposed(equilateral):
    receivers = [
        triangle_from_vertices((0, 0, 2), (1, 0, 2), (0, 1, 2)),
        triangle_from_vertices((0, 0, 0), (-1, 0, 0), (-0.5, 0, math.sqrt(3) / 2)),
        triangle_from_vertices(equilateral.v2, (1.5, 0.5, 0.3), equilateral.v3),
        triangle_from_vertices(equilateral.v3, (0.2, -1.0, 0.4), equilateral.v1),
        equilateral.rotated(1),
    ]
    for ty in receivers:
        forward = contact_classification(equilateral, ty)
        assert contact_classification(ty, equilateral) == forward.transposed()
        assert forward.transposed().transposed() == forward


def test_identical_triangles_touch_three_times(equilateral):
    contact = contact_classification(equilateral, equilateral)
    assert contact.kind is ContactKind.THREE_TOUCH
    assert len(contact.shared_edges) == 3


def test_touch_tolerance_is_relative(equilateral):
    ty = triangle_from_vertices((1e-13, 0, 0), (-1, 0, 0), (-0.5, 0, 1))
    assert contact_classification(equilateral, ty).kind is ContactKind.ONE_TOUCH
    assert contact_classification(equilateral, ty, tol_touch=1e-14).kind is ContactKind.NO_TOUCH


def test_vertex_matching_twice_is_ambiguous(equilateral):
    ty = Triangle((0.0, 0.0, 0.0), (1e-14, 0.0, 0.0), (0.0, 1.0, 0.0))
    with pytest.raises(AmbiguousContact):
        contact_classification(equilateral, ty)


def test_signed_plane_distance(equilateral):
    lifted = triangle_from_vertices(*(v + np.array([0.0, 0.0, 0.25]) for v in equilateral.vertices))
    assert signed_plane_distance(equilateral, lifted) == pytest.approx(0.25)
    tilted = triangle_from_vertices((0, 0, 0), (1, 0, 0), (0, 1, 1))
    with pytest.raises(NotParallel):
        signed_plane_distance(equilateral, tilted)
