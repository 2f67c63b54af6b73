"""
Independent numerical references for the analytical integrals.

quad_reference integrates the defining surface, edge-surface and edge-edge
integrals by nested adaptive Gauss-Kronrod (QUADPACK) on collapsed triangle
coordinates. pbf_oracle integrates the defining one-dimensional PBF
integral with QUADPACK. The benchmark geometries and the offset sweeps used
for validation also live here.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import InadmissibleCombination, ToleranceNotReached
from .geometry import ContactKind, triangle_from_vertices
from .pbf import case_for_pattern, kernel, level_integrand, pbf
from .potentials import common_edge_integral, galerkin_all
from .reduction import Domain

logger = logging.getLogger(__name__)

QUANTITIES = ("L", "M", "Lp", "Mp", "Fx", "Fy")


@dataclass(frozen=True, eq=False)
class QuadResult:
    value: object           # float, or 3-vector for Lp, Fx, Fy
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class SweepRecord:
    eps: float
    L: float
    M: float
    Mp: float
    rel_L: float
    rel_M: float
    rel_Mp: float


@dataclass(frozen=True, eq=False)
class BenchmarkCase:
    name: str
    tx: object
    ty: object
    expected: dict
    reference: dict = None  # second published column, when there is one


# -----------------------------------------------------------------------------
# Nested adaptive quadrature
# -----------------------------------------------------------------------------

QUAD_LIMIT = 100
# QUADPACK rejects relative tolerances below 50 eps.
_MIN_RTOL = 50.0 * np.finfo(float).eps


@lru_cache(maxsize=None)
def _unit_rule(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def nested_quad(integrand, depth, tol=1e-10, atol=0.0, limit=QUAD_LIMIT):
    """
    Iterated adaptive Gauss-Kronrod integral of integrand(z_1, ..., z_depth)
    over the unit cube, z_1 outermost.

    Every level asks QUADPACK for max(atol, tol * |I|). The error estimate is
    the sum over levels of the largest error QUADPACK reported there, and
    never less than the tolerance that was asked for.

    Raises:
        ToleranceNotReached: when any level stops short of its tolerance.
    """
    rtol = max(tol, _MIN_RTOL)
    worst = [0.0] * depth
    calls = [0]

    def leaf(args):
        calls[0] += 1
        return integrand(*args)

    def level(k, args):
        if k == depth - 1:
            f = lambda z: leaf(args + (z,))
        else:
            f = lambda z: level(k + 1, args + (z,))
        out = integrate.quad(f, 0.0, 1.0, epsabs=atol, epsrel=rtol, limit=limit, full_output=1)
        if len(out) > 3:
            raise ToleranceNotReached(f"Level {k + 1} of {depth} stopped early: {out[3]}")
        worst[k] = max(worst[k], out[1])
        return out[0]

    value = level(0, ())
    estimate = max(math.fsum(worst), atol, rtol * abs(value))
    return QuadResult(value=value, error_estimate=estimate, evaluations=calls[0])


def _chart(tri):
    """Origin, spanning edges and Jacobian 2A of the collapsed map of a triangle."""
    origin = tuple(float(c) for c in tri.v1)
    s = tuple(float(c) for c in tri.v2 - tri.v1)
    t = tuple(float(c) for c in tri.v3 - tri.v1)
    return origin, s, t, 2.0 * tri.area


def _on_chart(chart, a, b):
    # s = a, t = (1 - a) b covers the triangle once
    origin, s, t, _ = chart
    c = (1.0 - a) * b
    return tuple(origin[k] + a * s[k] + c * t[k] for k in range(3))


def _surface_integrand(tx, ty, kernel_of):
    cx, cy = _chart(tx), _chart(ty)
    jx, jy = cx[3], cy[3]

    def integrand(a, b, c, e):
        x = _on_chart(cx, a, b)
        y = _on_chart(cy, c, e)
        diff = (x[0] - y[0], x[1] - y[1], x[2] - y[2])
        r = math.sqrt(diff[0] * diff[0] + diff[1] * diff[1] + diff[2] * diff[2])
        return jx * (1.0 - a) * jy * (1.0 - c) * kernel_of(diff, r)

    return integrand


def _edge_surface_integrand(start, vector, tri):
    start = tuple(float(c) for c in start)
    vector = tuple(float(c) for c in vector)
    length = math.sqrt(sum(v * v for v in vector))
    chart = _chart(tri)
    jacobian = chart[3]

    def integrand(a, b, c):
        y = _on_chart(chart, b, c)
        r = math.dist([start[k] + a * vector[k] for k in range(3)], y)
        return length * jacobian * (1.0 - b) / r

    return integrand


def _edge_pair_integrand(sx, vx, sy, vy):
    sx, vx, sy, vy = (tuple(float(c) for c in p) for p in (sx, vx, sy, vy))
    lengths = math.sqrt(sum(v * v for v in vx)) * math.sqrt(sum(v * v for v in vy))

    def integrand(a, b):
        x = [sx[k] + a * vx[k] for k in range(3)]
        y = [sy[k] + b * vy[k] for k in range(3)]
        return lengths / math.dist(x, y)

    return integrand


def _signed_scale(tx, ty):
    """Natural size of the signed surface integrals, A_x A_y / |c_x - c_y|^2."""
    gap = float(np.linalg.norm(np.mean(tx.vertices, axis=0) - np.mean(ty.vertices, axis=0)))
    return tx.area * ty.area / (gap * gap)


def _combine(parts, coefficients):
    """Linear combination of QuadResults with a propagated error estimate."""
    value = math.fsum(c * p.value for c, p in zip(coefficients, parts))
    error = math.fsum(abs(c) * p.error_estimate for c, p in zip(coefficients, parts))
    return value, error, sum(p.evaluations for p in parts)


def _flux_reference(edge_tri, surface_tri, tol, atol, limit):
    parts = [
        nested_quad(_edge_surface_integrand(edge_tri.vertices[i], edge_tri.edges[i], surface_tri),
                    3, tol, atol, limit)
        for i in range(3)
    ]
    normals = [edge_tri.edge_normal(i) for i in range(3)]
    value = np.zeros(3)
    for part, normal in zip(parts, normals):
        value = value + part.value * normal
    error = math.fsum(p.error_estimate for p in parts)
    return QuadResult(value, max(error, tol * float(np.linalg.norm(value))),
                      sum(p.evaluations for p in parts))


def _hypersingular_reference(tx, ty, tol, atol, limit):
    parts, cosines = [], []
    for i in range(3):
        for j in range(3):
            cosines.append(-float(np.dot(tx.edges[i], ty.edges[j])) / (tx.lengths[i] * ty.lengths[j]))
            integrand = _edge_pair_integrand(tx.vertices[i], tx.edges[i], ty.vertices[j], ty.edges[j])
            parts.append(nested_quad(integrand, 2, tol, atol, limit))
    value, error, evaluations = _combine(parts, cosines)
    return QuadResult(value, error, evaluations)


def quad_reference(tx, ty, which, tol=1e-10, atol=0.0, limit=QUAD_LIMIT):
    """
    Reference value of one integral for a well-separated pair.

    The surface integrals are four-fold nested QUADPACK integrals over the
    collapsed coordinates of both triangles; Fx and Fy are edge-surface
    integrals and Mp a sum of nine edge-edge integrals. The signed
    integrands of M and Lp are converged to tol relative to their natural
    size A_x A_y / |c_x - c_y|^2 rather than to their possibly cancelled value.

    Args:
        which: One of "L", "M", "Lp", "Mp", "Fx", "Fy".
        tol: Relative tolerance requested from QUADPACK.
        atol: Absolute tolerance accepted instead, for integrals that vanish.
        limit: Subinterval limit per level.

    Returns:
        QuadResult; value is a 3-vector for Lp, Fx and Fy.

    Raises:
        ToleranceNotReached: when QUADPACK cannot meet the tolerance.
    """
    if which not in QUANTITIES:
        raise ValueError(f"Unknown quantity {which!r}; expected one of {QUANTITIES}")
    if which == "L":
        result = nested_quad(_surface_integrand(tx, ty, lambda diff, r: 1.0 / r), 4, tol, atol, limit)
    elif which == "M":
        nx = tuple(float(c) for c in tx.normal)
        kernel_of = lambda diff, r: -(diff[0] * nx[0] + diff[1] * nx[1] + diff[2] * nx[2]) / r**3
        floor = max(atol, tol * _signed_scale(tx, ty))
        result = nested_quad(_surface_integrand(tx, ty, kernel_of), 4, tol, floor, limit)
    elif which == "Lp":
        floor = max(atol, tol * _signed_scale(tx, ty))
        parts = [
            nested_quad(_surface_integrand(tx, ty, lambda diff, r, k=k: diff[k] / r**3), 4, tol, floor, limit)
            for k in range(3)
        ]
        value = np.array([p.value for p in parts])
        error = max(max(p.error_estimate for p in parts), tol * float(np.linalg.norm(value)))
        result = QuadResult(value, error, sum(p.evaluations for p in parts))
    elif which == "Fx":
        result = _flux_reference(tx, ty, tol, atol, limit)
    elif which == "Fy":
        result = _flux_reference(ty, tx, tol, atol, limit)
    else:
        result = _hypersingular_reference(tx, ty, tol, atol, limit)
    logger.debug("quad_reference %s: %r +- %.3e (%d evaluations)",
                 which, result.value, result.error_estimate, result.evaluations)
    return result


def params_reference(params, orders=(8, 16, 32), tol=1e-10, tolerances=None):
    """
    Tensor Gauss-Legendre value of a level-d reduction integral.

    The integrand is G_d(|sum a_i s_i + e|) with G_d built from the
    closed-form PBF of the level above. Only the triangle-pair, prism,
    square and standard-triangle domains are supported.
    """
    gaps = (0.0,) * params.d + tuple(params.inherited_gaps)
    nonzero = tuple(g > 0.0 for g in gaps)
    case = case_for_pattern(nonzero, start=params.d)
    family = params.family

    def integrand(R):
        if params.d == family.top_level:
            return kernel(family, R, gaps[3])
        return pbf(params.d + 1, family, case, R, gaps, tolerances)

    evaluations = 0
    previous = None
    for n in orders:
        coords, weights = _domain_rule(params.domain, n)
        a = np.stack(params.a)
        points = coords @ a + params.e
        radii = np.sqrt(np.einsum("ij,ij->i", points, points))
        values = np.fromiter((integrand(R) for R in radii), dtype=float, count=len(radii))
        value = math.fsum(weights * values)
        evaluations += len(radii)
        if previous is not None and abs(value - previous) <= tol * abs(value):
            return QuadResult(value, abs(value - previous), evaluations)
        previous = value
    raise ToleranceNotReached(f"Level-{params.d} quadrature did not converge to {tol:g}")


def _domain_rule(domain, n):

    x, w = _unit_rule(n)
    if domain is Domain.SQUARE:
        s, t = np.meshgrid(x, x, indexing="ij")
        return np.column_stack([s.ravel(), t.ravel()]), np.outer(w, w).ravel()
    xi, eta = np.meshgrid(x, x, indexing="ij")
    tri_coords = np.column_stack([xi.ravel(), ((1.0 - xi) * eta).ravel()])
    tri_weights = (np.outer(w, w) * (1.0 - xi)).ravel()
    if domain is Domain.TRIANGLE:
        return tri_coords, tri_weights
    if domain is Domain.PRISM:
        coords = np.array([[p[0], p[1], z] for p in tri_coords for z in x])
        weights = np.outer(tri_weights, w).ravel()
        return coords, weights
    if domain is Domain.TRIANGLE_PAIR:
        coords = np.array([[p[0], p[1], q[0], q[1]] for p in tri_coords for q in tri_coords])
        weights = np.outer(tri_weights, tri_weights).ravel()
        return coords, weights
    raise ValueError(f"No tensor rule for domain {domain}")


def pbf_oracle(d, family, case, P, gaps, tol=1e-12, nested=False, tolerances=None):
    """
    F_d from its defining integral

        F_d(P) = P^-d * int_0^P p^(d-1) G_d(sqrt(p^2 + h_d^2)) dp

    by adaptive Gauss-Kronrod. With nested=True, G_d is itself computed by
    this function down to the kernel level instead of by the closed form.

    Raises:
        ToleranceNotReached: when QUADPACK reports a warning.
        InadmissibleCombination: for case 8 at d = 1 (divergent definition).
    """
    if d == 1 and case == 8:
        raise InadmissibleCombination("Case 8 at level 1 has no convergent defining integral")
    gaps = tuple(float(g) for g in gaps)
    hd = gaps[d - 1]
    inner_tol = max(0.1 * tol, 1e-13)
    calls = [0]

    def upper(R):
        if nested and d < family.top_level:
            result = pbf_oracle(d + 1, family, case, R, gaps, inner_tol, True, tolerances)
            calls[0] += result.evaluations
            return result.value
        calls[0] += 1
        return level_integrand(d, family, case, R, gaps, tolerances)

    def integrand(p):
        return p ** (d - 1) * upper(math.hypot(p, hd))

    out = integrate.quad(integrand, 0.0, P, epsabs=0.0, epsrel=max(tol, 1e-13), limit=200, full_output=1)
    if len(out) == 4:
        raise ToleranceNotReached(f"PBF quadrature d={d} case={case}: {out[3]}")
    value, abserr, info = out[:3]
    scale = P**d
    return QuadResult(value=value / scale, error_estimate=abserr / scale, evaluations=calls[0] or info["neval"])


# -----------------------------------------------------------------------------
# Benchmarks
# -----------------------------------------------------------------------------

_SQRT3 = math.sqrt(3.0)
_SQRT6 = math.sqrt(6.0)

_TABLE1_SOURCE = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, _SQRT3 / 2.0, 0.0))
_TABLE1 = {
    "table1_case1": (
        (0.5, 0.0, 1.0 + _SQRT3 / 2.0),
        {"L": 0.139757030669707, "M": 0.099860729206614, "Lp_y": 0.022035244796804, "Mp": 0.046564310284965},
    ),
    "table1_case2": (
        (0.5, _SQRT6 / 4.0, 1.0 + _SQRT6 / 4.0),
        {"L": 0.149630247150535, "M": 0.114715727210190, "Lp_y": 0.010953212167802, "Mp": 0.137859073743097},
    ),
    "table1_case3": (
        (0.5, -_SQRT3 / 2.0, 1.0),
        {"L": 0.156068357679434, "M": 0.111863573921226, "Lp_y": 0.055673013677787, "Mp": -0.138417139905960},
    ),
}

_TABLE2_SOURCE = ((0.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0))
# h -> (closed form, independent code)
_TABLE2_L = (
    (0.0, 0.4154834934268203, None),
    (1e-4, 0.4154834087866360, 0.4154834087866362),
    (1e-3, 0.4154773308369882, 0.4154773308369880),
    (1e-2, 0.4150963397038614, 0.4150963397038615),
    (1e-1, 0.3986731498732936, 0.3986731498732934),
    (1.0, 0.1994877345160997, 0.1994877345160992),
)
_TABLE2_LP_RECEIVER = ((-2.0, 0.5, 0.01), (-1.0, 1.0, 0.01), (-1.0, 0.0, 0.01))
_TABLE2_LP = (0.0937210251186334, -0.0069668668016032, -0.0006289369951278)
_TABLE2_LP_REFERENCE = (0.0937210251186380, -0.0069668668015920, -0.0006289369951270)


def table1_cases():
    """Three non-touching benchmark pairs; L'_x = 0 and L'_z = -M in every case."""
    cases = []
    tx = triangle_from_vertices(*_TABLE1_SOURCE)
    for name, (y3, values) in _TABLE1.items():
        ty = triangle_from_vertices((1.0, 0.0, 1.0), (0.0, 0.0, 1.0), y3)
        expected = {
            "L": values["L"],
            "M": values["M"],
            "Lp_x": 0.0,
            "Lp_y": values["Lp_y"],
            "Lp_z": -values["M"],
            "Mp": values["Mp"],
        }
        cases.append(BenchmarkCase(name, tx, ty, expected))
    return cases


def table2_cases():
    """Parallel-plane pairs: L at six offsets h, and L' at h = 1e-2."""
    tx = triangle_from_vertices(*_TABLE2_SOURCE)
    cases = []
    for h, value, other in _TABLE2_L:
        ty = triangle_from_vertices((0.0, 0.0, h), (0.0, 1.0, h), (-1.0, 0.0, h))
        reference = None if other is None else {"L": other}
        cases.append(BenchmarkCase(f"table2_L_h={h:g}", tx, ty, {"L": value}, reference))
    ty = triangle_from_vertices(*_TABLE2_LP_RECEIVER)
    keys = ("Lp_x", "Lp_y", "Lp_z")
    cases.append(
        BenchmarkCase(
            "table2_Lp_h=0.01",
            tx,
            ty,
            dict(zip(keys, _TABLE2_LP)),
            dict(zip(keys, _TABLE2_LP_REFERENCE)),
        )
    )
    return cases


# -----------------------------------------------------------------------------
# Offset sweeps
# -----------------------------------------------------------------------------

_EQUILATERAL = ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, _SQRT3 / 2.0, 0.0))
_RECEIVER_BASE = {
    ContactKind.ONE_TOUCH: ((0.0, 0.0, 0.0), (-1.0, 0.0, 0.0), (-0.5, 0.0, _SQRT3 / 2.0)),
    ContactKind.TWO_TOUCH: ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.5, 0.0, _SQRT3 / 2.0)),
    ContactKind.THREE_TOUCH: _EQUILATERAL,
}
ONE_TOUCH_LIMITS = (0.182526568122379, 0.055671118815334, 0.063116905873345)
TWO_TOUCH_LIMITS = (0.415922738854561, 0.706739910625218, 2.857471441252689)
THREE_TOUCH_LIMITS = (0.75 * math.log(3.0), math.pi * _SQRT3 / 2.0, 6.0 * math.log(3.0))


def sweep_geometry(kind, eps):
    """Unit equilateral source and its receiver lifted by eps along z."""
    if kind not in _RECEIVER_BASE:
        raise ValueError(f"No sweep geometry for {kind}")
    tx = triangle_from_vertices(*_EQUILATERAL)
    lift = np.array([0.0, 0.0, eps])
    ty = triangle_from_vertices(*(np.asarray(v) + lift for v in _RECEIVER_BASE[kind]))
    return tx, ty


def sweep_limits(kind, eps):
    """(L0, M0, M'0) the sweep converges to; M'0 depends on eps when an edge is shared."""
    if kind is ContactKind.ONE_TOUCH:
        return ONE_TOUCH_LIMITS
    if kind is ContactKind.TWO_TOUCH:
        L0, M0, Mp00 = TWO_TOUCH_LIMITS
        return L0, M0, Mp00 - common_edge_integral(1.0, eps)
    if kind is ContactKind.THREE_TOUCH:
        L0, M0, Mp_val = THREE_TOUCH_LIMITS
        return L0, M0, Mp_val - 3.0 * common_edge_integral(1.0, eps)
    raise ValueError(f"No sweep limits for {kind}")


def convergence_sweep(kind, eps_list, tolerances=None):
    """
    Evaluate L, M, M' along a strictly decreasing list of offsets.

    Returns:
        list of SweepRecord with relative differences (F - F0) / F0.
    """
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0.0 for e in eps_list):
        raise ValueError("Sweep offsets must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("Sweep offsets must be strictly decreasing")

    records = []
    for eps in eps_list:
        tx, ty = sweep_geometry(kind, eps)
        out = galerkin_all(tx, ty, tolerances)
        L0, M0, Mp0 = sweep_limits(kind, eps)
        records.append(
            SweepRecord(
                eps=eps,
                L=out.L,
                M=out.M,
                Mp=out.Mp,
                rel_L=(out.L - L0) / L0,
                rel_M=(out.M - M0) / M0,
                rel_Mp=(out.Mp - Mp0) / Mp0,
            )
        )
        logger.debug("Sweep %s eps=%.3e: %s", kind.value, eps, records[-1])
    return records


def fit_slope(eps, rel):
    """
    Least-squares slope of log|rel| against log(eps).

    Points at or below the noise floor (1e3 machine epsilon) are dropped;
    None when fewer than two points remain.
    """
    floor = 1e3 * np.finfo(float).eps
    pairs = [(math.log(e), math.log(abs(r))) for e, r in zip(eps, rel) if abs(r) > floor]
    if len(pairs) < 2:
        return None
    x, y = np.array(pairs).T
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def sweep_slopes(records):
    eps = [r.eps for r in records]
    return {
        "L": fit_slope(eps, [r.rel_L for r in records]),
        "M": fit_slope(eps, [r.rel_M for r in records]),
        "Mp": fit_slope(eps, [r.rel_Mp for r in records]),
    }
