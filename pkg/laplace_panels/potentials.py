"""
Galerkin integrals of the Laplace kernel over a pair of flat triangles.

    L  = int_Sx int_Sy G dS dS
    M  = int_Sx int_Sy dG/dn_y dS dS
    L' = int_Sx int_Sy grad_x G dS dS
    M' = int_Sx int_Sy d2G/dn_x dn_y dS dS

with G = 1/|x - y|. There is NO 1/(4 pi) factor.

Both triangles must be positively oriented with respect to their intended
normals; vertices are never reordered to fix orientation.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .geometry import ContactClass, ContactKind, plane_alignment
from .geometry import contact_classification
from .pbf import KernelFamily
from .reduction import (
    Domain,
    ReductionParams,
    ReductionWorkspace,
    expand_4d,
    init_4d,
    reduce,
    with_family,
)
from .tolerances import resolve

logger = logging.getLogger(__name__)

# Pairs this close to the parallel threshold are logged.
_NEAR_PARALLEL_FACTOR = 1e3


class Branch(Enum):
    NON_DEGENERATE = "NonDegenerate"
    PARALLEL_PLANES = "ParallelPlanes"
    COPLANAR = "Coplanar"


@dataclass(frozen=True, eq=False)
class ContourFlux:
    Fx: np.ndarray
    Fy: np.ndarray
    fx: tuple           # F_x1..F_x3
    fy: tuple
    nx_edges: tuple     # outward contour normals n_cx1..n_cx3
    ny_edges: tuple


@dataclass(frozen=True, eq=False)
class EdgePairIntegrals:
    H: np.ndarray       # H[i, j] pairs edge i of tx with edge j of ty
    mask: np.ndarray    # True where a shared edge was zeroed


@dataclass(frozen=True, eq=False)
class GalerkinOutput:
    L: float
    M: float
    Lp: np.ndarray
    Mp: float
    contact: ContactClass
    branch: Branch
    Mp_is_regularized: bool
    flux: ContourFlux = None
    pbf_calls: int = 0


# -----------------------------------------------------------------------------
# Shared per-pair state
# -----------------------------------------------------------------------------

class _PairContext:
    """
    Contact, branch and reduction workspace for one (tx, ty) evaluation.

    Touching vertices of ty are snapped onto tx, then both triangles are
    relabeled cyclically so that the first matched pair becomes x1 = y1.
    """

    def __init__(self, tx, ty, tolerances=None):
        self.tol = resolve(tolerances)
        self.contact = contact_classification(tx, ty, self.tol.tol_touch)
        for i, j in self.contact.pairs:
            ty = ty.with_vertex(j - 1, tx.vertices[i - 1])
        self.tx, self.ty = tx, ty

        if self.contact.touching:
            i, j = self.contact.pairs[0]
            self.shift_x, self.shift_y = i - 1, j - 1
        else:
            self.shift_x = self.shift_y = 0
        self.rx = tx.rotated(self.shift_x)
        self.ry = ty.rotated(self.shift_y)

        self.scale = max(tx.scale, ty.scale)
        self.workspace = ReductionWorkspace(self.scale, self.tol)
        self.root = init_4d(self.rx, self.ry, KernelFamily.SINGLE)
        self.cosine = plane_alignment(tx, ty)
        self.branch = self._branch()
        self._prisms = None
        self._flux = None

    def _branch(self):
        misalignment = abs(1.0 - abs(self.cosine))
        if misalignment >= self.tol.tol_parallel:
            if misalignment < _NEAR_PARALLEL_FACTOR * self.tol.tol_parallel:
                logger.warning(
                    "Nearly parallel pair treated as non-degenerate: |1 - |nx.ny|| = %.3e",
                    misalignment,
                )
            return Branch.NON_DEGENERATE
        self.delta = float(np.dot(self.tx.normal, self.ty.v1 - self.tx.v1))
        if abs(self.delta) <= self.tol.zero_tol * self.scale:
            return Branch.COPLANAR
        return Branch.PARALLEL_PLANES

    @property
    def area_factor(self):
        return 4.0 * self.tx.area * self.ty.area

    def single_value(self):
        return reduce(self.root, self.workspace, ())

    def prism_values(self):
        """Tilde-family prism integrals, faces 1-3 on C_y and 4-6 on C_x."""
        if self._prisms is None:
            expansion = expand_4d(self.root, self.workspace, ())
            values = []
            for index, (_, child) in enumerate(expansion.children):
                if expansion.gap == 0.0:
                    values.append(3.0 * reduce(child, self.workspace, (index,)))
                else:
                    tilde = with_family(child, KernelFamily.TILDE)
                    values.append(reduce(tilde, self.workspace, (index,)))
            self._prisms = tuple(values)
        return self._prisms

    def flux(self):
        if self._flux is None:
            prisms = self.prism_values()
            fy_rot = [2.0 * self.ry.lengths[i] * self.rx.area * prisms[i] for i in range(3)]
            fx_rot = [2.0 * self.rx.lengths[i] * self.ry.area * prisms[3 + i] for i in range(3)]
            fx = _unrotate(fx_rot, self.shift_x)
            fy = _unrotate(fy_rot, self.shift_y)
            nx_edges = tuple(self.tx.edge_normal(i) for i in range(3))
            ny_edges = tuple(self.ty.edge_normal(i) for i in range(3))
            self._flux = ContourFlux(
                Fx=_combine(nx_edges, fx),
                Fy=_combine(ny_edges, fy),
                fx=tuple(fx),
                fy=tuple(fy),
                nx_edges=nx_edges,
                ny_edges=ny_edges,
            )
        return self._flux

    def double_layer(self):
        if self.branch is Branch.COPLANAR:
            return 0.0
        if self.branch is Branch.PARALLEL_PLANES:
            primed = with_family(self.root, KernelFamily.PRIMED)
            return self.area_factor * self.delta * reduce(primed, self.workspace, ())
        flux = self.flux()
        c = self.cosine
        normal_x = (
            float(np.dot(self.tx.normal, flux.Fy)) - c * float(np.dot(self.ty.normal, flux.Fx))
        ) / (1.0 - c * c)
        return -normal_x

    def grad_single_layer(self, M):
        return -self.flux().Fx - self.tx.normal * M

    def edge_pairs(self):
        H = np.zeros((3, 3))
        mask = np.zeros((3, 3), dtype=bool)
        for ex, ey in self.contact.shared_edges:
            mask[ex - 1, ey - 1] = True
        for i in range(3):
            for j in range(3):
                if mask[i, j]:
                    continue
                lx, ly = self.tx.edges[i], self.ty.edges[j]
                params = ReductionParams(
                    d=2,
                    a=(lx, -ly),
                    e=self.tx.vertices[i] - self.ty.vertices[j],
                    inherited_gaps=(0.0, 0.0),
                    family=KernelFamily.HAT,
                    domain=Domain.SQUARE,
                )
                value = reduce(params, self.workspace, ("edge", i, j))
                H[i, j] = self.tx.lengths[i] * self.ty.lengths[j] * value
        return EdgePairIntegrals(H=H, mask=mask)

    def hypersingular(self):
        pairs = self.edge_pairs()
        terms = []
        for i in range(3):
            for j in range(3):
                if pairs.H[i, j] == 0.0:
                    continue
                cosine = float(np.dot(self.tx.edges[i], self.ty.edges[j])) / (
                    self.tx.lengths[i] * self.ty.lengths[j]
                )
                terms.append(cosine * pairs.H[i, j])
        return -math.fsum(terms)


def _unrotate(values, shift):
    # rotated edge m is original edge (m + shift) % 3
    out = [0.0] * 3
    for m, value in enumerate(values):
        out[(m + shift) % 3] = value
    return out


def _combine(normals, weights):
    return np.array(
        [math.fsum(n[k] * w for n, w in zip(normals, weights)) for k in range(3)]
    )


def _regularized(contact):
    return contact.kind in (ContactKind.TWO_TOUCH, ContactKind.THREE_TOUCH)


# -----------------------------------------------------------------------------
# Public operations
# -----------------------------------------------------------------------------

def single_layer(tx, ty, tolerances=None):
    """L = 4 Ax Ay U, U the reduced Single-family integral."""
    ctx = _PairContext(tx, ty, tolerances)
    return ctx.area_factor * ctx.single_value()


def contour_flux(tx, ty, tolerances=None):
    """
    Per-edge flux integrals F_xi = 2 l_xi Ay I3 and F_yi = 2 l_yi Ax I3.

    Returns:
        ContourFlux in the caller's vertex labeling.
    """
    return _PairContext(tx, ty, tolerances).flux()


def double_layer(tx, ty, tolerances=None):
    """M; zero for coplanar pairs (principal value at exact coincidence)."""
    return _PairContext(tx, ty, tolerances).double_layer()


def grad_single_layer(tx, ty, tolerances=None):
    """L' = -Fx - n_x M."""
    ctx = _PairContext(tx, ty, tolerances)
    return ctx.grad_single_layer(ctx.double_layer())


def edge_pair_integrals(tx, ty, tolerances=None):
    """
    H_ij = int_Cxi int_Cyj G dC dC, with shared edges masked to 0.

    Raises:
        DivergentEdgeIntegral: for overlapping collinear edges that are not shared.
    """
    return _PairContext(tx, ty, tolerances).edge_pairs()


def hypersingular(tx, ty, tolerances=None):
    """
    M' = -sum_ij (l_xi . l_yj) / (l_xi l_yj) H_ij.

    For pairs sharing an edge the result is the finite part left after
    masking the shared edges.
    """
    return _PairContext(tx, ty, tolerances).hypersingular()


def self_action(tri, tolerances=None):
    """
    Closed forms for tx = ty, with p the half perimeter:

        L  = (4 A^2 / 3) sum_j ln(p / (p - l_j)) / l_j
        M' = 2 sum_j l_j ln(p / (p - l_j))
        F_i = 3 l_i L / (4 A)
    """
    p = 0.5 * tri.perimeter
    logs = [math.log(p / (p - l)) for l in tri.lengths]
    L = 4.0 * tri.area**2 / 3.0 * math.fsum(g / l for g, l in zip(logs, tri.lengths))
    Mp = 2.0 * math.fsum(l * g for l, g in zip(tri.lengths, logs))
    fluxes = tuple(3.0 * l * L / (4.0 * tri.area) for l in tri.lengths)
    normals = tuple(tri.edge_normal(i) for i in range(3))
    total = _combine(normals, fluxes)
    identity = tuple((k, k) for k in (1, 2, 3))
    return GalerkinOutput(
        L=L,
        M=0.0,
        Lp=np.zeros(3),
        Mp=Mp,
        contact=ContactClass(ContactKind.THREE_TOUCH, identity, identity),
        branch=Branch.COPLANAR,
        Mp_is_regularized=True,
        flux=ContourFlux(total, total.copy(), fluxes, fluxes, normals, normals),
    )


def galerkin_all(tx, ty, tolerances=None):
    """
    All four integrals for one pair, sharing decomposition work.

    Identical triangles (up to relabeling) go to self_action; a reversed
    receiver flips the sign of M'.

    Returns:
        GalerkinOutput
    """
    ctx = _PairContext(tx, ty, tolerances)
    if ctx.contact.kind is ContactKind.THREE_TOUCH:
        out = self_action(ctx.tx, tolerances)
        sign = math.copysign(1.0, ctx.cosine)
        logger.debug("Self-action pair, orientation sign %+.0f", sign)
        return replace(out, Mp=sign * out.Mp, contact=ctx.contact)

    L = ctx.area_factor * ctx.single_value()
    M = ctx.double_layer()
    flux = ctx.flux()
    Lp = ctx.grad_single_layer(M)
    Mp = ctx.hypersingular()
    logger.debug(
        "Pair %s, branch %s: %d leaves, %d PBF calls",
        ctx.contact, ctx.branch.value, ctx.workspace.leaves, ctx.workspace.pbf_calls,
    )
    return GalerkinOutput(
        L=L,
        M=M,
        Lp=Lp,
        Mp=Mp,
        contact=ctx.contact,
        branch=ctx.branch,
        Mp_is_regularized=_regularized(ctx.contact),
        flux=flux,
        pbf_calls=ctx.workspace.pbf_calls,
    )


def common_edge_integral(length, eps):
    """
    H11 for two parallel copies of a segment of given length offset by eps:

        2 l asinh(l / eps) - 2 (sqrt(l^2 + eps^2) - eps)
    """
    return 2.0 * length * math.asinh(length / eps) - 2.0 * length * length / (
        math.hypot(length, eps) + eps
    )
