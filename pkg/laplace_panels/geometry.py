"""
Flat triangles, their standard-triangle charts, and contact detection.

A triangle with vertices v1, v2, v3 is parametrized over the standard
triangle {(s, t): s, t >= 0, s + t <= 1} as

    x(s, t) = X0 + s * Xs + t * Xt,   X0 = v1, Xs = v2 - v1, Xt = v3 - v1.

Edges are l1 = v2 - v1, l2 = v3 - v2, l3 = v1 - v3; edge i starts at
vertex i. Indices in ContactClass are 1-based.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from .errors import AmbiguousContact, DegenerateTriangle, NotParallel
from .tolerances import resolve


def _point(v):
    p = np.array(v, dtype=float).reshape(3)
    p.setflags(write=False)
    return p


@dataclass(frozen=True, eq=False)
class Triangle:
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    edges: tuple = field(init=False, repr=False)
    lengths: tuple = field(init=False, repr=False)
    area: float = field(init=False, repr=False)
    normal: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("v1", "v2", "v3"):
            object.__setattr__(self, name, _point(getattr(self, name)))
        l1 = self.v2 - self.v1
        l2 = self.v3 - self.v2
        l3 = self.v1 - self.v3
        cross = np.cross(l1, l3)
        twice_area = float(np.linalg.norm(cross))
        if twice_area == 0.0:
            raise DegenerateTriangle("Triangle vertices are collinear")
        normal = -cross / twice_area
        normal.setflags(write=False)
        for vec in (l1, l2, l3):
            vec.setflags(write=False)
        object.__setattr__(self, "edges", (l1, l2, l3))
        object.__setattr__(
            self, "lengths", tuple(float(np.linalg.norm(v)) for v in (l1, l2, l3))
        )
        object.__setattr__(self, "area", 0.5 * twice_area)
        object.__setattr__(self, "normal", normal)

    @property
    def vertices(self):
        return (self.v1, self.v2, self.v3)

    @property
    def perimeter(self):
        return sum(self.lengths)

    @property
    def scale(self):
        """Longest edge length."""
        return max(self.lengths)

    def point(self, s, t):
        """Chart evaluation x(s, t)."""
        return self.v1 + s * (self.v2 - self.v1) + t * (self.v3 - self.v1)

    def edge_start(self, i):
        """Start vertex of 0-based edge i."""
        return self.vertices[i]

    def edge_normal(self, i):
        """Outward in-plane unit normal of 0-based edge i: (l_i x n) / |l_i|."""
        return np.cross(self.edges[i], self.normal) / self.lengths[i]

    def rotated(self, k):
        """Cyclic relabeling v_i -> v_{i+k}; orientation is preserved."""
        k %= 3
        if k == 0:
            return self
        verts = self.vertices
        return Triangle(verts[k], verts[(k + 1) % 3], verts[(k + 2) % 3])

    def with_vertex(self, i, point):
        """Copy with 0-based vertex i replaced."""
        verts = list(self.vertices)
        verts[i] = point
        return Triangle(*verts)


def triangle_from_vertices(v1, v2, v3, tol_geom=None):
    """
    Build a Triangle, rejecting degenerate input.

    Args:
        v1, v2, v3: Vertex coordinates (any length-3 sequence).
        tol_geom: Relative degeneracy threshold; defaults to Tolerances().tol_geom.

    Returns:
        Triangle

    Raises:
        DegenerateTriangle: when 2A < tol_geom * (longest edge)^2 or a coordinate is not finite.
    """
    if tol_geom is None:
        tol_geom = resolve(None).tol_geom
    pts = [np.asarray(v, dtype=float).reshape(3) for v in (v1, v2, v3)]
    if not all(np.all(np.isfinite(p)) for p in pts):
        raise DegenerateTriangle("Triangle vertices must be finite")
    l1 = pts[1] - pts[0]
    l3 = pts[0] - pts[2]
    longest = max(np.linalg.norm(l1), np.linalg.norm(pts[2] - pts[1]), np.linalg.norm(l3))
    twice_area = np.linalg.norm(np.cross(l1, l3))
    if longest == 0.0 or twice_area < tol_geom * longest**2:
        raise DegenerateTriangle(
            f"Degenerate triangle: 2A={twice_area:.3e}, longest edge={longest:.3e}"
        )
    return Triangle(*pts)


@dataclass(frozen=True)
class ChartVectors:
    origin: np.ndarray
    s: np.ndarray
    t: np.ndarray


def chart(tri):
    """X0 = v1, Xs = v2 - v1 (= l1), Xt = v3 - v1 (= -l3)."""
    return ChartVectors(origin=tri.v1, s=tri.v2 - tri.v1, t=tri.v3 - tri.v1)


def plane_alignment(tx, ty):
    """n_x . n_y"""
    return float(np.dot(tx.normal, ty.normal))


def are_parallel(tx, ty, tol_parallel=None):
    if tol_parallel is None:
        tol_parallel = resolve(None).tol_parallel
    return abs(1.0 - abs(plane_alignment(tx, ty))) < tol_parallel


def signed_plane_distance(tx, ty, tol_parallel=None):
    """
    Signed distance delta = n_x . (y1 - x1) between parallel planes.

    Raises:
        NotParallel: when |1 - |n_x . n_y|| >= tol_parallel.
    """
    if not are_parallel(tx, ty, tol_parallel):
        raise NotParallel(
            f"Planes are not parallel: n_x . n_y = {plane_alignment(tx, ty):.17g}"
        )
    return float(np.dot(tx.normal, ty.v1 - tx.v1))


# -----------------------------------------------------------------------------
# Contact classification
# -----------------------------------------------------------------------------

class ContactKind(Enum):
    NO_TOUCH = "NoTouch"
    ONE_TOUCH = "OneTouch"
    TWO_TOUCH = "TwoTouch"
    THREE_TOUCH = "ThreeTouch"


_KIND_BY_MATCHES = {
    0: ContactKind.NO_TOUCH,
    1: ContactKind.ONE_TOUCH,
    2: ContactKind.TWO_TOUCH,
    3: ContactKind.THREE_TOUCH,
}


def edge_between(a, b):
    """1-based edge index joining 1-based vertices a and b."""
    pair = frozenset((a, b))
    for index, ends in ((1, (1, 2)), (2, (2, 3)), (3, (3, 1))):
        if pair == frozenset(ends):
            return index
    raise ValueError(f"Vertices {a} and {b} do not form an edge")


@dataclass(frozen=True)
class ContactClass:
    kind: ContactKind
    pairs: tuple = ()          # matched (i, j), vertex x_i coincides with y_j
    shared_edges: tuple = ()   # (edge of tx, edge of ty)

    @property
    def touching(self):
        return self.kind is not ContactKind.NO_TOUCH

    def transposed(self):
        return ContactClass(
            self.kind,
            tuple(sorted((j, i) for i, j in self.pairs)),
            tuple(sorted((ey, ex) for ex, ey in self.shared_edges)),
        )

    def __str__(self):
        if self.kind is ContactKind.ONE_TOUCH:
            i, j = self.pairs[0]
            return f"OneTouch({i},{j})"
        if self.kind is ContactKind.TWO_TOUCH:
            ex, ey = self.shared_edges[0]
            return f"TwoTouch({ex},{ey})"
        return self.kind.value


def contact_classification(tx, ty, tol_touch=None):
    """
    Match vertices of tx and ty closer than tol_touch * (mean edge length).

    Returns:
        ContactClass with 1-based matched vertex pairs and shared edges.

    Raises:
        AmbiguousContact: when a vertex matches two vertices of the other triangle.
    """
    if tol_touch is None:
        tol_touch = resolve(None).tol_touch
    mean_edge = (sum(tx.lengths) + sum(ty.lengths)) / 6.0
    limit = tol_touch * mean_edge

    pairs = []
    for i, x in enumerate(tx.vertices, start=1):
        for j, y in enumerate(ty.vertices, start=1):
            if np.linalg.norm(x - y) <= limit:
                pairs.append((i, j))

    xs = [i for i, _ in pairs]
    ys = [j for _, j in pairs]
    if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
        raise AmbiguousContact(f"Vertex matched more than once: {pairs}")

    shared = tuple(
        sorted(
            (edge_between(i1, i2), edge_between(j1, j2))
            for (i1, j1), (i2, j2) in combinations(pairs, 2)
        )
    )
    return ContactClass(_KIND_BY_MATCHES[len(pairs)], tuple(pairs), shared)
