"""Sphere geometry primitives: circumspheres, chord/angle conversions,
regular-simplex edge lengths, the separation lower bound, and smallest
enclosing angular balls.

Conventions: points are rows of float64 arrays; spheres in R^m are
(center, radius) with radius >= 0; angular quantities are radians on the
unit sphere S^n embedded in R^{n+1}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "Sphere",
    "NotInHemisphereError",
    "circumsphere",
    "fit_sphere",
    "chord_from_angle",
    "angle_from_chord",
    "regular_edge_lengths",
    "separation_bound",
    "dekster_lhs",
    "regular_simplex_vertices",
    "min_enclosing_ball_angular",
    "angular_diameter",
]

# Relative tolerances for rank decisions, on-sphere residuals and unit-norm
# validation.  Callers may override per call; these are the documented defaults.
TAU_RANK = 1e-9
TAU_SPHERE = 1e-9
TAU_UNIT = 1e-9


class NotInHemisphereError(ValueError):
    """Raised when a point set does not fit in a closed hemisphere."""


@dataclass(frozen=True)
class Sphere:
    """A sphere in R^m given by center and radius (radius >= 0)."""

    center: np.ndarray
    radius: float

    def margins(self, points: np.ndarray) -> np.ndarray:
        """Signed clearance |y - center| - radius for each row y.

        Positive means strictly outside the closed ball, zero on the sphere,
        negative strictly inside.
        """
        d = np.linalg.norm(np.atleast_2d(points) - self.center, axis=1)
        return d - self.radius

    def to_json(self) -> dict:
        return {"center": [float(v) for v in self.center], "radius": float(self.radius)}


def circumsphere(points: np.ndarray, tau_rank: float = TAU_RANK) -> Sphere | None:
    """Smallest sphere passing through all k given points, 2 <= k <= m+1.

    The center is found in the affine hull of the points: translate so the
    first point is the origin and solve the Gram system G beta = d/2 with
    G = U U^T, U the matrix of difference vectors.  Returns None when the
    Gram system is singular at relative tolerance tau_rank (affinely
    dependent input, e.g. collinear triples).

    Two coincident points are allowed and give the degenerate radius-0 sphere.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two points")
    if pts.shape[0] > pts.shape[1] + 1:
        raise ValueError("at most m+1 points in R^m")
    p0 = pts[0]
    u = pts[1:] - p0
    if pts.shape[0] == 2 and np.all(u == 0.0):
        return Sphere(center=p0.copy(), radius=0.0)
    g = u @ u.T
    d = 0.5 * np.einsum("ij,ij->i", u, u)
    sv = np.linalg.svd(g, compute_uv=False)
    if sv[-1] <= tau_rank * max(sv[0], 1e-300):
        return None
    beta = np.linalg.solve(g, d)
    center = p0 + beta @ u
    radii = np.linalg.norm(pts - center, axis=1)
    radius = float(radii.mean())
    return Sphere(center=center, radius=radius)


def fit_sphere(points: np.ndarray) -> tuple[Sphere | None, float]:
    """Least-squares sphere through a point cloud of any size.

    Linearizes |y - c|^2 = r^2 into 2<y, c> + (r^2 - |c|^2) = |y|^2 and
    solves in the least-squares sense.  Returns (sphere, worst absolute
    on-sphere residual); (None, inf) when the fitted squared radius is not
    positive (e.g. all points coincident).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, m = pts.shape
    a = np.hstack([2.0 * pts, np.ones((n, 1))])
    b = (pts ** 2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    center = sol[:m]
    r2 = sol[m] + center @ center
    if r2 <= 0.0:
        return None, math.inf
    r = math.sqrt(r2)
    resid = np.abs(np.linalg.norm(pts - center, axis=1) - r)
    return Sphere(center=center, radius=float(r)), float(resid.max())


def chord_from_angle(theta: float) -> float:
    """Euclidean chord length subtended by angle theta on the unit sphere."""
    return 2.0 * math.sin(0.5 * theta)


def angle_from_chord(c: float) -> float:
    """Inverse of chord_from_angle on [0, pi]; rejects chords outside [0, 2]."""
    if c < 0.0 or c > 2.0 + 1e-12:
        raise ValueError(f"chord {c} outside [0, 2]")
    return 2.0 * math.asin(min(1.0, 0.5 * c))


def regular_edge_lengths(n: int) -> tuple[float, float]:
    """Edge lengths (Euclidean, angular) of the regular (n+1)-simplex
    inscribed in the unit n-sphere.

    The Euclidean value is sqrt(2(n+2)/(n+1)); the angular value is
    2*arcsin(sqrt((n+2)/(2(n+1)))), and chord_from_angle maps one to the
    other exactly.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    d_eu = math.sqrt(2.0 * (n + 2) / (n + 1))
    d_ang = 2.0 * math.asin(math.sqrt((n + 2) / (2.0 * (n + 1))))
    return d_eu, d_ang


def separation_bound(n: int) -> float:
    """Guaranteed lower bound sqrt((n+2)/n) on the largest intrinsic
    separation among neighbor pairs of a map defined on S^n."""
    if n < 1:
        raise ValueError("n >= 1 required")
    return math.sqrt((n + 2) / n)


def dekster_lhs(n: int, circ_a: float) -> float:
    """Left side 2*arcsin(sqrt((n+1)/(2n)) * sin(circ_a)) of the
    circumradius/diameter inequality on S^n, n >= 2.

    circ_a is the angular circumradius of a compact set contained in an
    open hemisphere, so circ_a in [0, pi/2).
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    if not 0.0 <= circ_a <= 0.5 * math.pi:
        raise ValueError("circ_a must lie in [0, pi/2]")
    arg = math.sqrt((n + 1) / (2.0 * n)) * math.sin(circ_a)
    if arg > 1.0 + 1e-12:
        raise ValueError("arcsin argument exceeds 1")
    return 2.0 * math.asin(min(1.0, arg))


def regular_simplex_vertices(n: int) -> np.ndarray:
    """Vertices of the regular (n+1)-simplex inscribed in S^n, as an
    (n+2, n+1) array of unit rows with the first vertex at the north pole
    (0, ..., 0, 1).  Pairwise dot products are -1/(n+1); construction is
    the standard recursion and fully deterministic.
    """
    if n == 0:
        return np.array([[1.0], [-1.0]])
    sub = regular_simplex_vertices(n - 1)  # (n+1, n), pairwise dots -1/n
    c = -1.0 / (n + 1)
    s = math.sqrt(1.0 - c * c)
    top = np.zeros(n + 1)
    top[-1] = 1.0
    rest = np.hstack([s * sub, np.full((n + 1, 1), c)])
    return np.vstack([top[None, :], rest])


def _equal_dot_directions(subset: np.ndarray, tau_rank: float) -> list[np.ndarray]:
    """Unit directions u with all <u, p> equal over the rows p of subset.

    Solves the Gram system; for singular subsets (linearly dependent points,
    e.g. a great-circle triangle) the nullspace directions of the point
    matrix are returned instead, since those satisfy <u, p> = 0 for all p.
    """
    g = subset @ subset.T
    ones = np.ones(subset.shape[0])
    sv = np.linalg.svd(g, compute_uv=False)
    out = []
    if sv[-1] > tau_rank * max(sv[0], 1e-300):
        alpha = np.linalg.solve(g, ones)
        u = alpha @ subset
        nu = np.linalg.norm(u)
        if nu > 1e-14:
            out.append(u / nu)
    # nullspace of the row space: directions orthogonal to every point
    _, s_full, vt = np.linalg.svd(subset, full_matrices=True)
    rank = int(np.sum(s_full > tau_rank * max(s_full[0], 1e-300))) if s_full.size else 0
    for row in vt[rank:]:
        out.append(row)
        out.append(-row)
    return out


def _max_angle(u: np.ndarray, pts: np.ndarray) -> float:
    dots = np.clip(pts @ u, -1.0, 1.0)
    return float(np.arccos(dots.min()))


def min_enclosing_ball_angular(
    points: np.ndarray,
    tau_unit: float = TAU_UNIT,
    tau_rank: float = TAU_RANK,
) -> tuple[np.ndarray, float]:
    """Smallest angular ball enclosing unit vectors on S^n.

    Returns (center, circ_a) with center a unit vector and circ_a the
    angular radius.  The optimum direction maximizes the minimum dot
    product; candidates are enumerated over support subsets of size
    <= n+1 (their equal-dot directions) and the best one is polished by a
    direct simplex search.  Raises NotInHemisphereError when the points do
    not fit in a closed hemisphere (best min-dot strictly negative).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty 2-d point array")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(np.abs(norms - 1.0) > 10 * tau_unit * np.maximum(norms, 1.0)):
        raise ValueError("points must be unit vectors")
    npts, d = pts.shape
    if npts == 1:
        return pts[0].copy(), 0.0

    candidates: list[np.ndarray] = [p for p in pts]
    max_size = min(d, npts)
    n_subsets = sum(math.comb(npts, s) for s in range(2, max_size + 1))
    if npts <= 40 and n_subsets <= 20000:
        for size in range(2, max_size + 1):
            for idx in itertools.combinations(range(npts), size):
                candidates.extend(_equal_dot_directions(pts[list(idx)], tau_rank))
    else:
        # large instance: subgradient walk toward the farthest point
        u = pts.mean(axis=0)
        nu = np.linalg.norm(u)
        u = pts[0] if nu < 1e-12 else u / nu
        for it in range(300):
            far = pts[np.argmin(pts @ u)]
            step = 1.0 / (it + 2.0)
            u = u + step * (far - (far @ u) * u)
            u /= np.linalg.norm(u)
        candidates.append(u)

    best_u, best_r = None, math.inf
    for u in candidates:
        r = _max_angle(u, pts)
        if r < best_r - 1e-15:
            best_u, best_r = u, r

    # local polish: minimize the max angle over the sphere of directions
    def objective(v: np.ndarray) -> float:
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            return math.pi
        return _max_angle(v / nv, pts)

    res = minimize(objective, best_u, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxfev": 5000})
    if res.fun < best_r:
        best_u, best_r = res.x / np.linalg.norm(res.x), float(res.fun)

    if math.cos(best_r) < -1e-9:
        raise NotInHemisphereError("point set does not fit in a closed hemisphere")
    return best_u, best_r


def angular_diameter(points: np.ndarray) -> float:
    """Largest pairwise angle among unit vectors (brute force)."""
    pts = np.asarray(points, dtype=float)
    dots = np.clip(pts @ pts.T, -1.0, 1.0)
    return float(np.arccos(dots.min()))
