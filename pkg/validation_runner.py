"""
Validation runner.

Golden benchmark comparisons, analytic-versus-quadrature cross-checks on
random well-separated pairs, and offset sweeps toward touching
configurations. Every check returns a result dict.
"""

import csv
import logging
from pathlib import Path

import numpy as np

from laplace_panels import ContactKind, GalerkinError, galerkin_all, triangle_from_vertices
from laplace_panels.oracle import (
    convergence_sweep,
    quad_reference,
    sweep_slopes,
    table1_cases,
    table2_cases,
)
from pair_runner import format_float

logger = logging.getLogger(__name__)

GOLDEN_TOLERANCE = 1e-12
ORACLE_TOLERANCE = 1e-10
EPS_RANGE = (1e-10, 1e-1)
SWEEP_COLUMNS = ("eps", "L", "M", "Mp", "rel_L", "rel_M", "rel_Mp")

_KINDS = {
    "one": ContactKind.ONE_TOUCH,
    "onetouch": ContactKind.ONE_TOUCH,
    "two": ContactKind.TWO_TOUCH,
    "twotouch": ContactKind.TWO_TOUCH,
    "three": ContactKind.THREE_TOUCH,
    "threetouch": ContactKind.THREE_TOUCH,
}


def parse_kind(text):
    kind = _KINDS.get(text.lower().replace("-", "").replace("_", ""))
    if kind is None:
        raise ValueError(f"Unknown sweep kind: {text}. Use: one, two, three")
    return kind


def golden_cases():
    return {case.name: case for case in table1_cases() + table2_cases()}


def _values(out):
    return {
        "L": out.L,
        "M": out.M,
        "Lp_x": float(out.Lp[0]),
        "Lp_y": float(out.Lp[1]),
        "Lp_z": float(out.Lp[2]),
        "Mp": out.Mp,
    }


def check_golden_case(name, tol=GOLDEN_TOLERANCE, tolerances=None):
    """
    Compare one benchmark pair with its published values.

    A quantity passes when |computed - expected| < tol.

    Returns:
        dict: {"status", "message", "name", "max_deviation", "rows"}
    """
    case = golden_cases().get(name)
    if case is None:
        return {"status": "failed", "message": f"Unknown golden case: {name}", "name": name,
                "max_deviation": float("nan"), "rows": []}
    try:
        computed = _values(galerkin_all(case.tx, case.ty, tolerances))
    except GalerkinError as e:
        return {"status": "failed", "message": f"{type(e).__name__}: {e}", "name": name,
                "max_deviation": float("nan"), "rows": []}

    rows = []
    for quantity, expected in case.expected.items():
        deviation = abs(computed[quantity] - expected)
        rows.append(
            {
                "quantity": quantity,
                "expected": expected,
                "computed": computed[quantity],
                "deviation": deviation,
                "passed": deviation < tol,
            }
        )
    worst = max(r["deviation"] for r in rows)
    passed = all(r["passed"] for r in rows)
    logger.info("Golden %s: max deviation %.3e (%s)", name, worst, "pass" if passed else "FAIL")
    return {
        "status": "success" if passed else "failed",
        "message": f"{name}: max deviation {worst:.3e} (tol {tol:g})",
        "name": name,
        "max_deviation": worst,
        "rows": rows,
    }


# -----------------------------------------------------------------------------
# Random pairs and the quadrature cross-check
# -----------------------------------------------------------------------------

def random_triangle(rng, quality=0.1):
    """Random triangle in the unit cube with 2A >= quality * (longest edge)^2."""
    while True:
        v = rng.uniform(-0.5, 0.5, size=(3, 3))
        edges = [v[1] - v[0], v[2] - v[1], v[0] - v[2]]
        longest = max(np.linalg.norm(e) for e in edges)
        if np.linalg.norm(np.cross(edges[0], edges[2])) >= quality * longest**2:
            return triangle_from_vertices(*v)


def random_separated_pair(rng, separation=1.0):
    """Two random triangles whose gap is at least `separation` diameters."""
    tx = random_triangle(rng)
    ty = random_triangle(rng)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    diameter = max(tx.scale, ty.scale)
    shift = direction * (2.0 + separation) * diameter
    centroid_gap = (tx.v1 + tx.v2 + tx.v3 - ty.v1 - ty.v2 - ty.v3) / 3.0
    moved = [v + centroid_gap + shift for v in ty.vertices]
    return tx, triangle_from_vertices(*moved)


def check_oracle_pair(seed, tol=ORACLE_TOLERANCE, tolerances=None):
    """
    Compare the analytic L, M, L', M' of a random separated pair with quadrature.

    A quantity passes when the difference is within 10 times the quadrature
    error estimate (per component for L').
    """
    rng = np.random.default_rng(seed)
    tx, ty = random_separated_pair(rng)
    name = f"oracle_seed={seed}"
    try:
        out = galerkin_all(tx, ty, tolerances)
        analytic = {"L": out.L, "M": out.M, "Lp": out.Lp, "Mp": out.Mp}
        rows = []
        for quantity, value in analytic.items():
            ref = quad_reference(tx, ty, quantity, tol=tol)
            deviation = float(np.max(np.abs(np.asarray(value) - np.asarray(ref.value))))
            rows.append(
                {
                    "quantity": quantity,
                    "expected": ref.value,
                    "computed": value,
                    "deviation": deviation,
                    "passed": deviation <= 10.0 * ref.error_estimate,
                }
            )
    except GalerkinError as e:
        return {"status": "failed", "message": f"{type(e).__name__}: {e}", "name": name,
                "max_deviation": float("nan"), "rows": []}

    worst = max(r["deviation"] for r in rows)
    passed = all(r["passed"] for r in rows)
    return {
        "status": "success" if passed else "failed",
        "message": f"{name}: max deviation {worst:.3e} against quadrature",
        "name": name,
        "max_deviation": worst,
        "rows": rows,
    }


def format_report(results):
    """Plain-text pass/fail table, one line per check."""
    lines = [f"{'check':<28} {'result':<7} {'max deviation':>14}"]
    for result in results:
        if result is None:
            continue
        name = result.get("name", "?")
        status = {"success": "pass", "skipped": "skip"}.get(result["status"], "FAIL")
        deviation = result.get("max_deviation", float("nan"))
        lines.append(f"{name:<28} {status:<7} {deviation:>14.3e}")
        if status == "FAIL" and not result.get("rows"):
            lines.append(f"    {result['message']}")
    return "\n".join(lines)


# -----------------------------------------------------------------------------
# Sweeps
# -----------------------------------------------------------------------------

def sweep_offsets(eps_min, eps_max, points):
    """Log-spaced, strictly decreasing offsets from eps_max down to eps_min."""
    lo, hi = EPS_RANGE
    if not (lo <= eps_min <= eps_max <= hi):
        raise ValueError(f"Offsets must satisfy {lo:g} <= eps_min <= eps_max <= {hi:g}")
    if points < 1:
        raise ValueError("points must be >= 1")
    if points > 1 and eps_min == eps_max:
        raise ValueError("eps_min must be below eps_max when points > 1")
    return list(np.geomspace(eps_max, eps_min, points))


def run_sweep(kind, eps_min, eps_max, points, output_path, tolerances=None):
    """
    Run an offset sweep and write it as CSV with fitted slopes in '#' footer rows.

    Returns:
        dict: {"status", "message", "output_path", "records", "slopes"}
    """
    try:
        eps_list = sweep_offsets(eps_min, eps_max, points)
        records = convergence_sweep(kind, eps_list, tolerances)
    except (ValueError, GalerkinError) as e:
        return {"status": "failed", "message": f"{type(e).__name__}: {e}", "output_path": "",
                "records": [], "slopes": {}}
    slopes = sweep_slopes(records)

    output_path = Path(output_path)
    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with output_path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SWEEP_COLUMNS)
            for r in records:
                writer.writerow([format_float(getattr(r, c)) for c in SWEEP_COLUMNS])
            for quantity, slope in slopes.items():
                text = "n/a" if slope is None else f"{slope:.6f}"
                f.write(f"# slope_{quantity}: {text}\n")
    except OSError as e:
        return {"status": "failed", "message": f"Cannot write {output_path}: {e.strerror}",
                "output_path": "", "records": records, "slopes": slopes}

    logger.info("Sweep %s: %d point(s), slopes %s", kind.value, len(records), slopes)
    return {
        "status": "success",
        "message": f"Wrote {len(records)} sweep point(s) to {output_path}",
        "output_path": str(output_path),
        "records": records,
        "slopes": slopes,
    }
