"""
Closed-form primitive basis functions (PBFs).

F_d(P; h_d, ..., h_4) solves  P F_d' + d F_d = G_d(sqrt(P^2 + h_d^2))  with
F_d bounded at P = 0, where G_d is F_{d+1} (or the kernel at the top level).
Logarithms ln((a + R) / b) are evaluated as asinh(a / b), and differences
R - h as P^2 / (R + h).

The closed forms cancel in two regimes, and there the defining integral
is used instead:
  - P small against the gap scale (relative loss ~ (h / P)^2);
  - at level 1, cases 4-7 with one gap much smaller than the other
    (terms carry (h_large / h_small)^2 and nearly cancel).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import InadmissibleCombination, InvalidGapPattern, NonPositiveP
from .tolerances import resolve

logger = logging.getLogger(__name__)


class KernelFamily(Enum):
    SINGLE = "single"   # 1/R
    PRIMED = "primed"   # 1/R^3
    TILDE = "tilde"     # 1/sqrt(R^2 + h4^2), top level 3
    HAT = "hat"         # 1/R, top level 2

    @property
    def top_level(self):
        return _TOP_LEVEL[self]


_TOP_LEVEL = {
    KernelFamily.SINGLE: 4,
    KernelFamily.PRIMED: 4,
    KernelFamily.TILDE: 3,
    KernelFamily.HAT: 2,
}

# Nonzero pattern of (h1, h2, h3, h4) for each case.
CASE_PATTERNS = {
    1: (True, False, False, False),
    2: (False, True, False, False),
    3: (True, True, False, False),
    4: (True, False, True, False),
    5: (False, True, True, False),
    6: (True, False, False, True),
    7: (False, True, False, True),
    8: (False, False, False, False),
}

ADMISSIBLE_CASES = {
    KernelFamily.SINGLE: frozenset(range(1, 9)),
    KernelFamily.PRIMED: frozenset({6, 7}),
    KernelFamily.TILDE: frozenset(range(1, 9)),
    KernelFamily.HAT: frozenset({1, 2, 3, 8}),
}

_TILDE_CASE = {6: 4, 7: 5}

# Level-1 cases whose closed form is scaled by (gaps[large] / gaps[small])^2.
_AMPLIFIED_GAPS = {4: (0, 2), 5: (1, 2), 6: (0, 3), 7: (1, 3)}

_MAX_NODES = 256


def case_for_pattern(nonzero, start=0):
    """
    First case number whose pattern agrees with `nonzero` at indices >= start.

    Cases that differ only below `start` give the same F_{start+1}, so any
    match is a valid representative. Case 8 is only picked at start 0.
    """
    for number, pattern in CASE_PATTERNS.items():
        if number == 8 and start > 0:
            continue
        if pattern[start:] == tuple(nonzero[start:]):
            return number
    raise InvalidGapPattern(f"No case matches gap pattern {tuple(nonzero)} from level {start + 1}")


# -----------------------------------------------------------------------------
# Auxiliary functions
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiValues:
    phi1: float
    phi2: float
    phi3: float
    phi4: float


def _phi1(P, h):
    return math.asinh(P / h) / P


def _phi2(P, h, R4, eta):
    if eta == 0.0:
        return 0.0
    rest = math.sqrt(max(h * h - eta * eta, 0.0))
    return math.atan(eta * P / (h * h + R4 * rest)) / P


def _phi3(P, h, h1, log_floor):
    R1 = math.hypot(P, h1)
    rest = math.sqrt(max(h * h - h1 * h1, log_floor))
    return math.asinh(R1 / rest) / R1


def _phi4(P, h2, R2, eta):
    if eta == 0.0:
        return 0.0
    return (eta * eta / (P * P * h2)) * (R2 / h2 * math.asinh(R2 / eta) - math.asinh(h2 / eta))


def phi(P, gaps, eta, tolerances=None):
    """
    Auxiliary functions at level 1.

    Args:
        P: In-plane distance P1 > 0.
        gaps: (h1, h2, h3, h4).
        eta: Argument of phi2 and phi4.

    Returns:
        PhiValues; phi4 is NaN when h2 = 0.
    """
    tol = resolve(tolerances)
    h1, h2, h3, h4 = gaps
    h = math.sqrt(h1 * h1 + h2 * h2 + h3 * h3 + h4 * h4)
    R4 = math.hypot(P, h)
    R2 = math.hypot(P, h2)
    return PhiValues(
        phi1=_phi1(P, h) if h > 0.0 else float("inf"),
        phi2=_phi2(P, h, R4, eta),
        phi3=_phi3(P, h, h1, tol.log_floor),
        phi4=_phi4(P, h2, R2, eta) if h2 > 0.0 else float("nan"),
    )


# -----------------------------------------------------------------------------
# Single family (kernel 1/R)
# -----------------------------------------------------------------------------

def _single_f4(P, h4):
    R = math.hypot(P, h4)
    return (R + 2.0 * h4) / (3.0 * (R + h4) ** 2)


def _single_f3(case, P, h3, h4):
    if case in (4, 5):
        R = math.hypot(P, h3)
        return (P * R - h3 * h3 * math.asinh(P / h3)) / (6.0 * P**3)
    if case in (6, 7):
        R = math.hypot(P, h4)
        return (
            P * R - 3.0 * h4 * h4 * math.asinh(P / h4) + 4.0 * h4 * h4 * P / (R + h4)
        ) / (6.0 * P**3)
    return 1.0 / (6.0 * P)


def _single_f2(case, P, h2, h3, h4):
    if case in (1, 8):
        return 1.0 / (6.0 * P)
    if case in (2, 3):
        return 1.0 / (6.0 * (math.hypot(P, h2) + h2))
    if case == 4:
        R3 = math.hypot(P, h3)
        return (R3 - 2.0 * h3 + h3 * h3 * math.asinh(P / h3) / P) / (6.0 * P * P)
    if case == 5:
        h = math.hypot(h2, h3)
        R2 = math.hypot(P, h2)
        R3 = math.hypot(R2, h3)
        at_zero = h + h3 * h3 * math.asinh(h2 / h3) / h2
        return (R3 - at_zero + h3 * h3 * math.asinh(R2 / h3) / R2) / (6.0 * P * P)
    if case == 6:
        R4 = math.hypot(P, h4)
        return (
            R4 - 3.0 * h4 + h4 * h4 * (3.0 * math.asinh(P / h4) / P - 2.0 / (R4 + h4))
        ) / (6.0 * P * P)
    # case 7
    h = math.hypot(h2, h4)
    R2 = math.hypot(P, h2)
    R4 = math.hypot(R2, h4)
    at_zero = h + h4 * h4 * (3.0 * math.asinh(h2 / h4) / h2 - 2.0 / (h + h4))
    return (
        R4 - at_zero + h4 * h4 * (3.0 * math.asinh(R2 / h4) / R2 - 2.0 / (R4 + h4))
    ) / (6.0 * P * P)


def _single_f1(case, P, gaps, tol):
    if case == 8:
        return math.log(max(P, tol.log_floor)) / (6.0 * P)
    h1, h2, h3, h4 = gaps
    h = math.sqrt(h1 * h1 + h2 * h2 + h3 * h3 + h4 * h4)
    R4 = math.hypot(P, h)
    phi1 = _phi1(P, h)
    if case == 1:
        return phi1 / 6.0
    if case == 2:
        return (phi1 - 1.0 / (math.hypot(P, h2) + h2)) / 6.0
    if case == 3:
        return (phi1 - (h2 / h1) * _phi2(P, h, R4, h1)) / 6.0
    if case == 4:
        r = (h3 / h1) ** 2
        return (
            (1.0 - r) * phi1
            - 2.0 * (h3 / h1) * _phi2(P, h, R4, h1)
            + r * _phi3(P, h, h1, tol.log_floor)
        ) / 6.0
    R2 = math.hypot(P, h2)
    if case == 5:
        return (
            (h / h2) ** 2 * phi1 - 1.0 / (R4 + h) - _phi4(P, h2, R2, h3)
        ) / 6.0
    if case == 6:
        r = (h4 / h1) ** 2
        return (
            (1.0 - 3.0 * r) * phi1
            - (3.0 - r) * (h4 / h1) * _phi2(P, h, R4, h1)
            + 3.0 * r * _phi3(P, h, h1, tol.log_floor)
            - r / (R4 + h4)
        ) / 6.0
    # case 7
    r = (h4 / h2) ** 2
    return (
        (1.0 + 3.0 * r) * phi1
        - 2.0 * (h4 / h2) ** 3 * _phi2(P, h, R4, h2)
        - 3.0 * _phi4(P, h2, R2, h4)
        + (2.0 * h4 * h4 - h2 * h2) / (h2 * h2 * (R4 + h))
    ) / 6.0


# -----------------------------------------------------------------------------
# Primed family (kernel 1/R^3), cases 6 and 7 only
# -----------------------------------------------------------------------------

def _primed_f4(P, h4):
    R = math.hypot(P, h4)
    return 1.0 / (R * (R + h4) ** 2)


def _primed_f3(P, h4):
    R = math.hypot(P, h4)
    return (math.asinh(P / h4) - 2.0 * P / (R + h4)) / P**3


def _primed_f2(case, P, h2, h4):
    if case == 6:
        R = math.hypot(P, h4)
        return (1.0 / (R + h4) - math.asinh(P / h4) / P + 0.5 / h4) / (P * P)
    h = math.hypot(h2, h4)
    R2 = math.hypot(P, h2)
    R4 = math.hypot(R2, h4)
    return (
        1.0 / (R4 + h4) - 1.0 / (h + h4)
        - math.asinh(R2 / h4) / R2 + math.asinh(h2 / h4) / h2
    ) / (P * P)


def _primed_f1(case, P, gaps, tol):
    h1, h2, _, h4 = gaps
    h = math.sqrt(h1 * h1 + h2 * h2 + h4 * h4)
    R4 = math.hypot(P, h)
    phi1 = _phi1(P, h)
    if case == 6:
        return (
            phi1
            + (h1 * h1 - h4 * h4) / (2.0 * h1 * h4) * _phi2(P, h, R4, h1)
            - _phi3(P, h, h1, tol.log_floor)
            + 0.5 / (R4 + h4)
        ) / (h1 * h1)
    R2 = math.hypot(P, h2)
    return -(
        phi1
        - (h4 / h2) * _phi2(P, h, R4, h2)
        - (h2 / h4) ** 2 * _phi4(P, h2, R2, h4)
        + (R2 * R2 / (R4 + h4) - h2 * h2 / (h + h4)) / (P * P)
    ) / (h2 * h2)


# -----------------------------------------------------------------------------
# Dispatch
# -----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss_legendre(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return tuple(nodes), tuple(weights)


def _gap_scale(d, gaps):
    return math.sqrt(math.fsum(g * g for g in gaps[d - 1:]))


def _closed_form(d, family, case, P, gaps, tol):
    if family is KernelFamily.SINGLE:
        if d == 4:
            return _single_f4(P, gaps[3])
        if d == 3:
            return _single_f3(case, P, gaps[2], gaps[3])
        if d == 2:
            return _single_f2(case, P, gaps[1], gaps[2], gaps[3])
        return _single_f1(case, P, gaps, tol)
    if d == 4:
        return _primed_f4(P, gaps[3])
    if d == 3:
        return _primed_f3(P, gaps[3])
    if d == 2:
        return _primed_f2(case, P, gaps[1], gaps[3])
    return _primed_f1(case, P, gaps, tol)


def gap_amplification(case, gaps):
    """Factor by which the level-1 closed form of `case` magnifies round-off."""
    pair = _AMPLIFIED_GAPS.get(case)
    if pair is None:
        return 1.0
    small, large = gaps[pair[0]], gaps[pair[1]]
    return (large / small) ** 2


def _evaluate(d, family, case, P, gaps, tol):
    """Single or Primed F_d, switching to the defining integral where the closed form cancels."""
    if d < 4 and case != 8:
        scale = _gap_scale(d, gaps)
        if scale > 0.0:
            if P < tol.small_p_ratio * scale:
                return _from_definition(d, family, case, P, gaps, tol)
            if d == 1 and gap_amplification(case, gaps) > tol.max_gap_amplification:
                return _from_definition(d, family, case, P, gaps, tol)
    return _closed_form(d, family, case, P, gaps, tol)


def _node_count(S, tol):
    # In sigma the integrand is analytic in the strip |Im sigma| < pi/2.
    ratio = math.pi / S
    rho = ratio + math.sqrt(1.0 + ratio * ratio)
    return min(max(tol.small_p_nodes, math.ceil(22.0 / math.log(rho))), _MAX_NODES)


def _from_definition(d, family, case, P, gaps, tol):
    # F_d = P^-d * int_0^P p^(d-1) F_{d+1}(sqrt(p^2 + h_d^2)) dp  with  p = H sinh(sigma),
    # H the gap scale at level d; the integrand's singularities sit at p = +-iH.
    H = _gap_scale(d, gaps)
    S = math.asinh(P / H)
    nodes, weights = _gauss_legendre(_node_count(S, tol))
    hd = gaps[d - 1]
    half = 0.5 * S
    terms = []
    for x, w in zip(nodes, weights):
        sigma = half * (x + 1.0)
        p = H * math.sinh(sigma)
        upper = _evaluate(d + 1, family, case, math.hypot(p, hd), gaps, tol)
        terms.append(w * H * math.cosh(sigma) * p ** (d - 1) * upper)
    return half * math.fsum(terms) / P**d


def _check_gaps(d, case, gaps, tol):
    pattern = CASE_PATTERNS[case]
    for k in range(d - 1, 4):
        if (gaps[k] > 0.0) != pattern[k]:
            raise InvalidGapPattern(
                f"Gaps {gaps} do not match case {case} at level {k + 1}"
            )


def pbf(d, family, case, P, gaps, tolerances=None):
    """
    Evaluate F_d(P; h_d, ..., h_4) for a kernel family.

    Args:
        d: Level, 1 <= d <= family.top_level.
        family: KernelFamily.
        case: Case number 1..8 for the gap pattern.
        P: In-plane distance, P > 0.
        gaps: (h1, h2, h3, h4); entries below level d are ignored.

    Returns:
        float

    Raises:
        NonPositiveP, InadmissibleCombination, InvalidGapPattern
    """
    tol = resolve(tolerances)
    if not (P > 0.0 and math.isfinite(P)):
        raise NonPositiveP(f"PBF argument must be positive and finite, got P={P!r}")
    if not 1 <= d <= family.top_level:
        raise InadmissibleCombination(f"Level {d} is not defined for the {family.value} family")
    if case not in ADMISSIBLE_CASES[family]:
        raise InadmissibleCombination(f"Case {case} has no closed form for the {family.value} family")
    gaps = tuple(float(g) for g in gaps)
    if len(gaps) != 4:
        raise InvalidGapPattern(f"Expected four gaps, got {len(gaps)}")

    if family is KernelFamily.TILDE:
        mapped = (gaps[0], gaps[1], math.hypot(gaps[2], gaps[3]), 0.0)
        case = _TILDE_CASE.get(case, case)
        _check_gaps(d, case, mapped, tol)
        return 3.0 * _evaluate(d, KernelFamily.SINGLE, case, P, mapped, tol)

    _check_gaps(d, case, gaps, tol)
    if family is KernelFamily.HAT:
        return 6.0 * _evaluate(d, KernelFamily.SINGLE, case, P, gaps, tol)
    return _evaluate(d, family, case, P, gaps, tol)


def kernel(family, R, h4=0.0):
    """Kernel applied at the family's top level."""
    if family is KernelFamily.PRIMED:
        return 1.0 / R**3
    if family is KernelFamily.TILDE:
        return 1.0 / math.hypot(R, h4)
    return 1.0 / R


def level_integrand(d, family, case, R, gaps, tolerances=None):
    """
    G_d(R): the level-(d+1) PBF, or the kernel when d is the top level.
    """
    if d == family.top_level:
        return kernel(family, R, gaps[3])
    return pbf(d + 1, family, case, R, gaps, tolerances)


def ode_residual(d, family, case, P, gaps, step=1e-5, tolerances=None):
    """
    Relative residual of P F' + d F - G_d(sqrt(P^2 + h_d^2)), F' by central difference.
    """
    lo = pbf(d, family, case, P * (1.0 - step), gaps, tolerances)
    hi = pbf(d, family, case, P * (1.0 + step), gaps, tolerances)
    value = pbf(d, family, case, P, gaps, tolerances)
    derivative = (hi - lo) / (2.0 * P * step)
    rhs = level_integrand(d, family, case, math.hypot(P, gaps[d - 1]), gaps, tolerances)
    lhs = P * derivative + d * value
    return abs(lhs - rhs) / max(abs(rhs), abs(d * value), 1e-300)
