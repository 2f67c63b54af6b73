"""
Recursive dimensionality reduction of the Galerkin integral.

A level-d integral over a d-dimensional domain D_d,

    I_d = int_{D_d} F_{d+1}(|sum a_i s_i + e|; inherited gaps) ds,

is rewritten with the divergence theorem as a weighted sum of level-(d-1)
integrals over the faces of D_d. Every face is mapped back onto a standard
domain by a parameter substitution. At d = 1 the two segment endpoints are
evaluated with closed-form PBFs.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DivergentEdgeIntegral, InvalidGapPattern
from .geometry import chart
from .pbf import KernelFamily, pbf
from .projection import classify_case, decompose
from .tolerances import resolve

logger = logging.getLogger(__name__)


class Domain(Enum):
    TRIANGLE_PAIR = "triangle x triangle"
    PRISM = "triangle x segment"
    SQUARE = "square"
    TRIANGLE = "triangle"
    SEGMENT = "segment"


_DEFAULT_DOMAIN = {
    4: Domain.TRIANGLE_PAIR,
    3: Domain.PRISM,
    2: Domain.SQUARE,
    1: Domain.SEGMENT,
}


@dataclass(frozen=True, eq=False)
class ReductionParams:
    d: int
    a: tuple
    e: np.ndarray
    inherited_gaps: tuple = ()
    family: KernelFamily = KernelFamily.SINGLE
    domain: Domain = None

    def __post_init__(self):
        if len(self.a) != self.d:
            raise ValueError(f"Level {self.d} needs {self.d} direction vectors, got {len(self.a)}")
        if self.d + len(self.inherited_gaps) != 4:
            raise ValueError(
                f"Level {self.d} needs {4 - self.d} inherited gaps, got {len(self.inherited_gaps)}"
            )
        if self.domain is None:
            object.__setattr__(self, "domain", _DEFAULT_DOMAIN[self.d])


@dataclass(frozen=True)
class FaceExpansion:
    children: tuple     # (weight, ReductionParams) per face
    gap: float          # h_d after snapping
    s0: tuple


class ReductionWorkspace:
    """
    Per-pair memo of decompositions and reduced values.

    Paths must identify a geometry uniquely within one workspace; values
    are additionally keyed by kernel family.
    """

    def __init__(self, scale=1.0, tolerances=None, reverse_projection=False):
        self.scale = float(scale)
        self.tolerances = resolve(tolerances)
        self.reverse_projection = reverse_projection
        self.gap_log = []
        self.pbf_calls = 0
        self.leaves = 0
        self._decompositions = {}
        self._values = {}

    @property
    def zero_gap(self):
        return self.tolerances.zero_tol * self.scale

    def decomposition(self, path, params):
        found = self._decompositions.get(path)
        if found is None:
            order = tuple(reversed(range(params.d))) if self.reverse_projection else None
            found = decompose(params.e, params.a, self.tolerances.rank_tol, order)
            self._decompositions[path] = found
        return found

    def snapped(self, h):
        return 0.0 if h <= self.zero_gap else h


def init_4d(tx, ty, family=KernelFamily.SINGLE):
    """Top-level parameters a = (Xs, Xt, -Yu, -Yv), e = X0 - Y0."""
    cx, cy = chart(tx), chart(ty)
    return ReductionParams(
        d=4,
        a=(cx.s, cx.t, -cy.s, -cy.t),
        e=cx.origin - cy.origin,
        inherited_gaps=(),
        family=family,
    )


def _child(parent, weight, a, e, gap, domain=None):
    return weight, ReductionParams(
        d=parent.d - 1,
        a=tuple(a),
        e=e,
        inherited_gaps=(gap,) + parent.inherited_gaps,
        family=parent.family,
        domain=domain,
    )


def _prepare(params, workspace, path):
    ws = workspace if workspace is not None else ReductionWorkspace()
    dec = ws.decomposition(path, params)
    return ws, dec, ws.snapped(dec.h)


def expand_4d(params, workspace=None, path=()):
    """Six prism faces of triangle x triangle; faces 1-3 are C_y1..C_y3, 4-6 are C_x1..C_x3."""
    _, dec, gap = _prepare(params, workspace, path)
    a1, a2, a3, a4 = params.a
    s1, s2, s3, s4 = dec.s0
    ep = dec.e_par
    children = (
        _child(params, -s4, (a1, a2, a3), ep, gap),
        _child(params, 1.0 + s3 + s4, (a1, a2, a4 - a3), ep + a3, gap),
        _child(params, -s3, (a1, a2, a4), ep, gap),
        _child(params, -s2, (a3, a4, a1), ep, gap),
        _child(params, 1.0 + s1 + s2, (a3, a4, a2 - a1), ep + a1, gap),
        _child(params, -s1, (a3, a4, a2), ep, gap),
    )
    return FaceExpansion(children=children, gap=gap, s0=dec.s0)


def expand_3d(params, workspace=None, path=()):
    """Prism (triangle in s1, s2; segment in s3): three squares and two triangles."""
    _, dec, gap = _prepare(params, workspace, path)
    a1, a2, a3 = params.a
    s1, s2, s3 = dec.s0
    ep = dec.e_par
    square, triangle = Domain.SQUARE, Domain.TRIANGLE
    children = (
        _child(params, 1.0 + s1 + s2, (a1 - a2, a3), ep + a2, gap, square),
        _child(params, -s1, (a2, a3), ep, gap, square),
        _child(params, -s2, (a1, a3), ep, gap, square),
        _child(params, 1.0 + s3, (a1, a2), ep + a3, gap, triangle),
        _child(params, -s3, (a1, a2), ep, gap, triangle),
    )
    return FaceExpansion(children=children, gap=gap, s0=dec.s0)


def expand_2d(params, workspace=None, path=()):
    """Unit square (four edges) or standard triangle (three edges)."""
    _, dec, gap = _prepare(params, workspace, path)
    a1, a2 = params.a
    s1, s2 = dec.s0
    ep = dec.e_par
    if params.domain is Domain.SQUARE:
        children = (
            _child(params, 1.0 + s1, (a2,), ep + a1, gap),
            _child(params, -s1, (a2,), ep, gap),
            _child(params, 1.0 + s2, (a1,), ep + a2, gap),
            _child(params, -s2, (a1,), ep, gap),
        )
    elif params.domain is Domain.TRIANGLE:
        children = (
            _child(params, -s1, (a2,), ep, gap),
            _child(params, -s2, (a1,), ep, gap),
            _child(params, 1.0 + s1 + s2, (a1 - a2,), ep + a2, gap),
        )
    else:
        raise ValueError(f"Level 2 domain must be a square or triangle, got {params.domain}")
    return FaceExpansion(children=children, gap=gap, s0=dec.s0)


_EXPANDERS = {4: expand_4d, 3: expand_3d, 2: expand_2d}


def eval_1d(params, workspace=None, path=()):
    """
    Segment integral from its two endpoints:

        I_1 = (1 + s10) F_1(|1 + s10| |a1|) - s10 F_1(|s10| |a1|).
    """
    ws, dec, gap = _prepare(params, workspace, path)
    tol = ws.tolerances
    gaps = (gap,) + params.inherited_gaps
    pc = classify_case(*gaps, zero_tol=0.0, family=params.family)
    ws.gap_log.append((params.family, pc.gaps))
    ws.leaves += 1

    length = float(np.linalg.norm(params.a[0]))
    s = dec.s0[0]
    if pc.number == 8:
        if abs(s) * length <= ws.zero_gap:
            s = 0.0
        elif abs(1.0 + s) * length <= ws.zero_gap:
            s = -1.0
        elif -1.0 < s < 0.0:
            message = f"Kernel singularity inside a segment (s10={s:.17g}, path={path})"
            if params.family is KernelFamily.HAT:
                raise DivergentEdgeIntegral(message)
            raise InvalidGapPattern(message)

    terms = []
    for weight, offset in ((1.0 + s, 1.0 + s), (-s, s)):
        if abs(weight) < tol.prune_tol:
            continue
        ws.pbf_calls += 1
        terms.append(weight * pbf(1, params.family, pc.number, abs(offset) * length, pc.gaps, tol))
    return math.fsum(terms)


def reduce(params, workspace=None, path=()):
    """
    Value of the level-d integral, depth first with compensated summation.

    Args:
        params: ReductionParams of the root.
        workspace: Shared ReductionWorkspace; a fresh one when None.
        path: Key of the root inside the workspace.

    Returns:
        float
    """
    ws = workspace if workspace is not None else ReductionWorkspace()
    key = (params.family, path)
    if key in ws._values:
        return ws._values[key]

    if params.d == 1:
        value = eval_1d(params, ws, path)
    else:
        expansion = _EXPANDERS[params.d](params, ws, path)
        terms = [
            weight * reduce(child, ws, path + (index,))
            for index, (weight, child) in enumerate(expansion.children)
            if abs(weight) >= ws.tolerances.prune_tol
        ]
        value = math.fsum(terms)
    ws._values[key] = value
    return value


def with_family(params, family):
    return replace(params, family=family)
