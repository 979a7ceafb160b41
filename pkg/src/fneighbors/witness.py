"""Witness-point search over a covered domain.

Given a cover C_1..C_k of the sampled domain and the image points, a
witness point w is a target-space location whose distance to every
element's image equals its distance to the whole image set: the ball
B_R(w) with R = d(w, f(X)) then touches each f(C_j) without containing
any image, so the touching samples form a certified f-neighbor tuple.

The search minimizes slack(x) = max_j d(x, f(C_j)) - d(x, f(X)), which is
nonnegative everywhere and zero exactly at witness points.  Nelder-Mead
from several structured starts gets close; a recentering polish step
(circumcenter of the per-element nearest images) then drives the residual
to solver precision whenever the sampled configuration admits an exact
witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .domains import CoverAssignment, SampledDomain, cube_max_faces
from .geometry import Sphere, circumsphere, fit_sphere

__all__ = [
    "WitnessConfig",
    "WitnessReport",
    "WitnessNotFoundError",
    "witness_slack",
    "witness_point",
    "disjoint_faces_check",
    "DisjointFacesResult",
]


@dataclass(frozen=True)
class WitnessConfig:
    """Search budget and acceptance tolerance for witness_point."""

    budget: int = 2000
    n_probes: int = 32
    n_random_starts: int = 4
    polish_rounds: int = 8
    eps_witness_rel: float = 1e-3
    seed: int = 0


DEFAULT_WITNESS_CONFIG = WitnessConfig()


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of the witness search.

    chosen holds one sample index per cover element: the member whose image
    is closest to the sphere of radius `radius` around `point` (ties go to
    the lowest index).  status is "ok" when the residual passes the
    relative acceptance gate, else "no-witness-found".
    """

    status: str
    point: np.ndarray
    radius: float
    residual: float
    chosen: tuple[int, ...]
    element_names: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "point": [float(v) for v in self.point],
            "radius": float(self.radius),
            "residual": float(self.residual),
            "chosen": [int(i) for i in self.chosen],
            "element_names": list(self.element_names),
        }


class WitnessNotFoundError(RuntimeError):
    """Raised by consumers that cannot proceed without a witness."""

    def __init__(self, report: WitnessReport):
        super().__init__(f"witness search residual {report.residual:.3e} "
                         "exceeded the acceptance gate")
        self.report = report


def witness_slack(x: np.ndarray, images: np.ndarray,
                  cover: CoverAssignment) -> float:
    """max_j d(x, images of C_j) - d(x, all images); zero exactly at
    witness points.  Convenience form for tests; the search itself uses
    prebuilt KD-trees."""
    x = np.asarray(x, dtype=float)
    d = np.linalg.norm(images - x, axis=1)
    worst = max(float(d[cover.membership[:, j]].min())
                for j in range(cover.element_count))
    return worst - float(d.min())


def _nearest_members(dists: np.ndarray, cover: CoverAssignment,
                     radius: float) -> tuple[int, ...]:
    """Per element, the member index minimizing |d_i - radius| (lowest
    index on ties: np.argmin picks the first, and element indices ascend)."""
    out = []
    for j in range(cover.element_count):
        members = np.flatnonzero(cover.membership[:, j])
        out.append(int(members[np.argmin(np.abs(dists[members] - radius))]))
    return tuple(out)


def witness_point(domain: SampledDomain, cover: CoverAssignment,
                  images: np.ndarray,
                  cfg: WitnessConfig = DEFAULT_WITNESS_CONFIG) -> WitnessReport:
    """Minimize the witness slack by multi-start Nelder-Mead plus
    recentering polish.

    Starts: the image centroid, the circumcenter of one representative
    image per element (the member nearest its element's image centroid),
    and the best of cfg.n_probes seeded random probes in the image
    bounding box.  All-coincident images short-circuit to the radius-0
    witness.  The residual gate is relative to the image diameter.
    """
    images = np.asarray(images, dtype=float)
    if len(images) != len(domain):
        raise ValueError("images must align with domain samples")
    names = tuple(cover.names)
    spread = float(np.linalg.norm(images.max(axis=0) - images.min(axis=0)))
    if spread <= 1e-12 * (1.0 + float(np.abs(images).max(initial=0.0))):
        chosen = tuple(int(np.flatnonzero(cover.membership[:, j])[0])
                       for j in range(cover.element_count))
        return WitnessReport(status="ok", point=images[0].copy(), radius=0.0,
                             residual=0.0, chosen=chosen, element_names=names)

    member_idx = [np.flatnonzero(cover.membership[:, j])
                  for j in range(cover.element_count)]
    trees = [cKDTree(images[idx]) for idx in member_idx]
    tree_all = cKDTree(images)

    def slack(x: np.ndarray) -> float:
        worst = max(float(t.query(x)[0]) for t in trees)
        return worst - float(tree_all.query(x)[0])

    def polish(x: np.ndarray) -> np.ndarray:
        best = x
        best_val = slack(x)
        for _ in range(cfg.polish_rounds):
            contacts = np.array([int(idx[t.query(best)[1]])
                                 for t, idx in zip(trees, member_idx)])
            pts = images[contacts]
            if len(pts) <= pts.shape[1] + 1:
                sph = circumsphere(pts)
            else:
                sph, _ = fit_sphere(pts)
            if sph is None:
                break
            val = slack(sph.center)
            if val < best_val:
                best, best_val = sph.center, val
            else:
                break
        return best

    starts = [images.mean(axis=0)]
    reps = []
    for idx in member_idx:
        centroid = images[idx].mean(axis=0)
        reps.append(int(idx[np.argmin(np.linalg.norm(images[idx] - centroid,
                                                     axis=1))]))
    rep_pts = images[reps]
    if len(rep_pts) <= rep_pts.shape[1] + 1:
        sph = circumsphere(rep_pts)
    else:
        sph, _ = fit_sphere(rep_pts)
    if sph is not None:
        starts.append(sph.center)
    rng = np.random.default_rng([cfg.seed, 101])
    lo, hi = images.min(axis=0), images.max(axis=0)
    probes = rng.uniform(lo - 0.25 * spread, hi + 0.25 * spread,
                         size=(cfg.n_probes, images.shape[1]))
    probe_vals = [slack(p) for p in probes]
    for k in np.argsort(probe_vals, kind="stable")[: cfg.n_random_starts]:
        starts.append(probes[k])

    best_x = starts[0]
    best_val = np.inf
    for x0 in starts:
        res = minimize(slack, x0, method="Nelder-Mead",
                       options={"maxfev": cfg.budget, "xatol": 1e-12,
                                "fatol": 1e-14})
        cand = polish(res.x)
        val = slack(cand)
        if val < best_val:
            best_x, best_val = cand, val

    radius = float(tree_all.query(best_x)[0])
    dists = np.linalg.norm(images - best_x, axis=1)
    chosen = _nearest_members(dists, cover, radius)
    status = "ok" if best_val <= cfg.eps_witness_rel * spread else "no-witness-found"
    return WitnessReport(status=status, point=np.asarray(best_x, dtype=float),
                         radius=radius, residual=float(best_val),
                         chosen=chosen, element_names=names)


@dataclass(frozen=True)
class DisjointFacesResult:
    """A neighbor pair straddling two disjoint cube faces.

    pair = (sample on the min-face, sample on the opposite max-face);
    faces names the two faces; report is the underlying witness report.
    """

    pair: tuple[int, int]
    faces: tuple[str, str]
    report: WitnessReport

    def to_json(self) -> dict:
        return {"pair": [int(self.pair[0]), int(self.pair[1])],
                "faces": list(self.faces),
                "report": self.report.to_json()}


def disjoint_faces_check(domain: SampledDomain, cover: CoverAssignment,
                         images: np.ndarray,
                         cfg: WitnessConfig = DEFAULT_WITNESS_CONFIG) -> DisjointFacesResult:
    """Extract a neighbor pair on opposite cube faces from the witness tuple.

    Expects the cube-boundary cover (m min-face elements plus the max-face
    union).  The point chosen from the union element lies on some max face
    {x_axis = 1}; the lowest such axis selects the min-face partner, giving
    a pair on the two disjoint faces of that axis.  Raises
    WitnessNotFoundError when the witness search does not converge.
    """
    if domain.kind != "cube_boundary":
        raise ValueError("expects a cube_boundary domain")
    if cover.names[-1] != "max-union":
        raise ValueError("expects the cube-boundary cover (max-union last)")
    report = witness_point(domain, cover, images, cfg)
    if report.status != "ok":
        raise WitnessNotFoundError(report)
    p_last = report.chosen[-1]
    axes = cube_max_faces(domain.samples[p_last][None, :])[0]
    axis = int(axes[0])
    pair = (report.chosen[axis], p_last)
    return DisjointFacesResult(pair=pair,
                               faces=(f"min-face-{axis}", f"max-face-{axis}"),
                               report=report)
