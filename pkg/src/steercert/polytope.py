"""Inner and outer polytope approximations of the qubit state space.

The Bloch ball is sandwiched between the convex hull of a finite vertex
set on the sphere (inner) and the same vertex set inflated by one over
the cosine of its covering angle (outer): every unit direction lies
within the covering angle of some vertex, so the inflated hull's support
function is at least 1 everywhere.  Feasibility against the inner
polytope proves a genuine model exists; infeasibility against the outer
polytope proves none does; the band between them is the discretization
gap, not a physics statement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InputError

# standard vertex-count ladder used by the command line and the tests
MESH_SIZES = (12, 42, 162, 642)
DEFAULT_MESH = 162

# relative padding on the inflate factor so roundoff in the hull
# computation can never make the outer hull fail to contain the ball
_SAFETY = 1e-9


@dataclass(frozen=True, eq=False)
class BlochPolytope:
    """A vertex set on the unit sphere with a scale factor.

    kind "inner" has scale 1.0 and its hull sits inside the ball; kind
    "outer" scales the same vertices so the hull contains the ball.
    """

    vertices: np.ndarray
    kind: str
    scale: float

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InputError(f"vertices must be (n, 3), got shape {v.shape}")
        norms = np.linalg.norm(v, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise InputError("polytope vertices must be unit vectors")
        if self.kind not in ("inner", "outer"):
            raise InputError(f"kind must be 'inner' or 'outer', got {self.kind!r}")
        if self.kind == "inner" and self.scale != 1.0:
            raise InputError("inner polytopes are not scaled")
        if self.kind == "outer" and self.scale < 1.0:
            raise InputError("outer polytopes need scale >= 1")
        object.__setattr__(self, "vertices", v)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    def bloch_columns(self) -> np.ndarray:
        """Scaled Bloch vectors, one row per vertex."""
        return self.scale * self.vertices


def fibonacci_sphere(n: int) -> np.ndarray:
    """n nearly uniform unit vectors from the golden-angle spiral."""
    if n < 4:
        raise InputError(f"need at least 4 vertices, got {n}")
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    pts = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def covering_angle(vertices: np.ndarray) -> float:
    """Largest angular distance from any unit direction to the vertex set.

    For points on the sphere the farthest direction from the set is a
    circumcenter of a hull facet, whose angular radius is the arccosine
    of the facet plane's distance from the origin.
    """
    v = np.asarray(vertices, dtype=float)
    hull = ConvexHull(v)
    # equations rows are (normal, offset) with normal . x + offset <= 0 inside
    dist = -hull.equations[:, 3]
    if np.any(dist <= 0.0):
        raise InputError("vertex set does not enclose the origin")
    return float(np.arccos(np.clip(dist.min(), -1.0, 1.0)))


def mesh_pair(n: int = DEFAULT_MESH) -> tuple:
    """Matched (inner, outer) polytopes on the same n-vertex mesh."""
    verts = fibonacci_sphere(n)
    theta = covering_angle(verts)
    if theta >= np.pi / 2:
        raise InputError(f"mesh of {n} vertices is too coarse to bound the ball")
    inflate = (1.0 + _SAFETY) / np.cos(theta)
    inner = BlochPolytope(vertices=verts, kind="inner", scale=1.0)
    outer = BlochPolytope(vertices=verts, kind="outer", scale=float(inflate))
    return inner, outer
