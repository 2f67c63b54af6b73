"""
Orthogonal projection of the offset e onto span(a_1, ..., a_d).

Gram-Schmidt with the rank-deficient rule c_ki = (u_k . a_i) / |u_k|^2, where
the divisor is replaced by 1 whenever u_k vanishes. The resulting upper
triangular system is solved by back-substitution with s_j0 = 0 on every
zero pivot.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGapPattern
from .pbf import ADMISSIBLE_CASES, CASE_PATTERNS, KernelFamily
from .tolerances import resolve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrthoSet:
    u: tuple            # orthogonal vectors, zero vectors where a_i is dependent
    c: np.ndarray       # c[k, i], unit diagonal, upper triangular
    zero: tuple         # True where u_k was declared zero


@dataclass(frozen=True)
class ProjectionDecomposition:
    s0: tuple           # coefficients of e_par in the a_i basis
    h: float            # |e_perp|
    e_par: np.ndarray
    e_perp: np.ndarray
    rank: int


@dataclass(frozen=True)
class PbfCase:
    number: int
    gaps: tuple         # (h1, h2, h3, h4) with sub-tolerance gaps set to 0.0


def orthogonalize(a, rank_tol=None):
    """
    Args:
        a: Sequence of d vectors.
        rank_tol: u_k is zero when |u_k|^2 <= rank_tol * max |a_i|^2.

    Returns:
        OrthoSet
    """
    if rank_tol is None:
        rank_tol = resolve(None).rank_tol
    vectors = [np.asarray(v, dtype=float) for v in a]
    d = len(vectors)
    biggest = max((float(np.dot(v, v)) for v in vectors), default=0.0)
    threshold = rank_tol * biggest

    u, norms, zero = [], [], []
    c = np.eye(d)
    for i, ai in enumerate(vectors):
        residual = ai.copy()
        for k in range(i):
            divisor = 1.0 if zero[k] else norms[k]
            c[k, i] = float(np.dot(u[k], residual)) / divisor
            residual = residual - c[k, i] * u[k]
        norm2 = float(np.dot(residual, residual))
        is_zero = norm2 <= threshold
        if is_zero:
            residual = np.zeros_like(residual)
            norm2 = 0.0
        u.append(residual)
        norms.append(norm2)
        zero.append(is_zero)
    return OrthoSet(u=tuple(u), c=c, zero=tuple(zero))


def decompose(e, a, rank_tol=None, order=None):
    """
    Split e into e_par = sum s_i0 a_i and e_perp orthogonal to every a_i.

    Args:
        e: Offset vector.
        a: Sequence of d direction vectors.
        order: Optional permutation in which the a_i enter Gram-Schmidt.
            The result is reported in the original indexing.

    Returns:
        ProjectionDecomposition
    """
    e = np.asarray(e, dtype=float)
    d = len(a)
    order = tuple(range(d)) if order is None else tuple(order)
    permuted = [a[k] for k in order]
    ortho = orthogonalize(permuted, rank_tol)

    s = [0.0] * d
    for j in reversed(range(d)):
        if ortho.zero[j]:
            continue
        norm2 = float(np.dot(ortho.u[j], ortho.u[j]))
        rhs = float(np.dot(ortho.u[j], e)) / norm2
        rhs -= math.fsum(ortho.c[j, i] * s[i] for i in range(j + 1, d))
        s[j] = rhs

    s0 = [0.0] * d
    for position, k in enumerate(order):
        s0[k] = s[position]

    e_par = np.zeros_like(e)
    for coefficient, vec in zip(s0, a):
        e_par = e_par + coefficient * np.asarray(vec, dtype=float)
    e_perp = e - e_par
    return ProjectionDecomposition(
        s0=tuple(s0),
        h=float(np.linalg.norm(e_perp)),
        e_par=e_par,
        e_perp=e_perp,
        rank=d - sum(ortho.zero),
    )


def classify_case(h1, h2, h3, h4, zero_tol, family=KernelFamily.SINGLE, scale=1.0):
    """
    Map a gap tuple to its case number.

    Gaps at or below zero_tol * scale are snapped to exactly zero. The
    all-zero pattern (case 8) is accepted for every family except Primed;
    the caller must make sure the kernel zero lies outside the segment.

    Raises:
        InvalidGapPattern
    """
    limit = zero_tol * scale
    gaps = tuple(0.0 if g <= limit else float(g) for g in (h1, h2, h3, h4))
    nonzero = tuple(g > 0.0 for g in gaps)

    if nonzero[2] and nonzero[3]:
        raise InvalidGapPattern(f"h3 and h4 are both nonzero: {gaps}")
    for number, pattern in CASE_PATTERNS.items():
        if pattern == nonzero:
            break
    else:
        raise InvalidGapPattern(f"Gap pattern {gaps} matches no admissible case")

    if number not in ADMISSIBLE_CASES[family]:
        raise InvalidGapPattern(f"Case {number} cannot occur for the {family.value} family")
    return PbfCase(number=number, gaps=gaps)
