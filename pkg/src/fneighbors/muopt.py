"""Map-family optimization and randomized bound verification.

The neighbor span D_f of a sampled map is the largest intrinsic distance
over certified neighbor tuples.  Minimizing it over a parametric family
brackets the family-relative infimum from above, while the separation
bound sqrt((n+2)/n) (maps off the n-sphere into a strictly higher
dimension) bounds it from below.  Everything here is derivative-free and
seeded: the objective is piecewise smooth at best, and reports must be
bit-reproducible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np
from scipy.optimize import minimize

from .domains import SampledDomain, cube_boundary_cover, sample_sphere
from .geometry import separation_bound
from .maps import (
    MapSpec,
    continuity_modulus,
    discretization_allowance,
    evaluate,
    map_to_json,
    param_count,
    random_map,
)
from .neighbors import (
    DEFAULT_CONFIG,
    NeighborConfig,
    compute_df,
    extremal_pair,
    neighbor_graph,
    pair_is_neighbor_fast,
)
from .witness import DEFAULT_WITNESS_CONFIG, WitnessConfig, disjoint_faces_check

__all__ = [
    "OptimizerConfig",
    "MuEstimate",
    "BoundViolationError",
    "df_objective",
    "estimate_mu",
    "verify_sphere_bound",
    "verify_borsuk_ulam",
    "verify_cube_faces",
    "delta_sweep",
    "DeltaHistogram",
]


def _run_trials(fn, trials: int, threads: int) -> list[dict]:
    """Trial rows in index order.  Each trial seeds its own PRNG stream, so
    the rows are identical for any worker count; executor.map preserves
    submission order, which keeps reports byte-reproducible."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, range(trials)))
    return [fn(t) for t in range(trials)]


@dataclass(frozen=True)
class OptimizerConfig:
    """Restarted Nelder-Mead settings for estimate_mu.

    budget is the evaluation cap per restart; n_samples the sampling
    density during the search (the incumbent is re-certified at twice this
    density); scale the half-width of the uniform start box in parameter
    space; degree the truncation order passed to the map family.
    """

    n_restarts: int = 8
    budget: int = 2000
    n_samples: int = 512
    scale: float = 1.0
    degree: int = 3
    seed: int = 0
    n_probes: int = 64
    perturb: float = 0.35
    check_lower_bound: bool = True


DEFAULT_OPT_CONFIG = OptimizerConfig()


class BoundViolationError(RuntimeError):
    """A certified D_f fell below the proven lower bound minus the
    sampling allowance: either a tolerance bug or broken sampling.  Carries
    everything needed to replay the offending evaluation."""

    def __init__(self, message: str, reproducer: dict):
        super().__init__(message)
        self.reproducer = reproducer


@dataclass(frozen=True)
class MuEstimate:
    """Family-relative bracket for the infimum of D_f.

    best_df is certified at doubled sampling density; lower_bound is the
    theorem value for the regime (separation bound when m_out exceeds the
    domain dimension, otherwise 2); trace records (evaluation index,
    running best) at each improvement during the search.
    """

    best_df: float
    best_map: MapSpec
    lower_bound: float
    trace: tuple[tuple[int, float], ...]
    settings: dict

    def to_json(self) -> dict:
        return {"best_df": float(self.best_df),
                "best_map": map_to_json(self.best_map),
                "lower_bound": float(self.lower_bound),
                "trace": [[int(i), float(v)] for i, v in self.trace],
                "settings": dict(self.settings)}


def df_objective(domain: SampledDomain, family: str, m_out: int,
                 neighbor_cfg: NeighborConfig = DEFAULT_CONFIG,
                 check_bound: bool = True):
    """Returns params -> certified D_f on the given sampled domain.

    When check_bound is set and the map leaves the Borsuk-Ulam regime
    (m_out > domain dimension), every evaluation is tested against the
    separation bound minus the per-map sampling allowance; a violation
    raises BoundViolationError with a reproducer instead of returning.
    """
    bound = separation_bound(domain.dim) if m_out > domain.dim else None

    def objective(params: np.ndarray) -> float:
        spec = MapSpec(family=family, m_out=m_out,
                       params=tuple(float(p) for p in params))
        images = evaluate(spec, domain)
        df = compute_df(neighbor_graph(images, domain, neighbor_cfg), domain)
        if check_bound and bound is not None:
            allowance = discretization_allowance(images, domain)
            if df < bound - allowance:
                raise BoundViolationError(
                    f"certified D_f={df:.6f} below {bound:.6f} - {allowance:.6f}",
                    reproducer={"map": map_to_json(spec), "df": df,
                                "bound": bound, "allowance": allowance,
                                "kind": domain.kind, "dim": domain.dim,
                                "n_samples": len(domain),
                                "domain_seed": domain.seed,
                                "scheme": domain.scheme})
        return df

    return objective


def estimate_mu(domain: SampledDomain, family: str, m_out: int,
                cfg: OptimizerConfig = DEFAULT_OPT_CONFIG,
                neighbor_cfg: NeighborConfig = DEFAULT_CONFIG) -> MuEstimate:
    """Bracket inf D_f over the family by restarted Nelder-Mead.

    Start points: the best of cfg.n_probes uniform probes, then fresh
    uniform draws alternating with perturbations of the incumbent; each
    restart owns the PRNG stream (cfg.seed, restart index).  The trace
    carries every improvement of the running minimum.  The incumbent is
    re-certified on a domain of twice the sampling density before being
    returned (same seed and scheme), keeping reported values conservative.
    """
    n_params = param_count(family, m_out, d_in=domain.samples.shape[1],
                           degree=cfg.degree)
    objective = df_objective(domain, family, m_out, neighbor_cfg,
                             check_bound=cfg.check_lower_bound)
    lower = separation_bound(domain.dim) if m_out > domain.dim else 2.0

    evals = 0
    best_val = math.inf
    best_params: np.ndarray | None = None
    trace: list[tuple[int, float]] = []

    def tracked(params: np.ndarray) -> float:
        nonlocal evals, best_val, best_params
        val = objective(params)
        evals += 1
        if val < best_val:
            best_val = val
            best_params = np.array(params, dtype=float)
            trace.append((evals, float(val)))
        return val

    probe_rng = np.random.default_rng([cfg.seed, 0])
    probes = probe_rng.uniform(-cfg.scale, cfg.scale,
                               size=(cfg.n_probes, n_params))
    probe_vals = [tracked(p) for p in probes]
    order = np.argsort(probe_vals, kind="stable")

    for restart in range(cfg.n_restarts):
        rng = np.random.default_rng([cfg.seed, restart + 1])
        if restart == 0:
            x0 = probes[order[0]]
        elif restart % 2 == 1 and best_params is not None:
            x0 = best_params + cfg.perturb * cfg.scale * rng.standard_normal(n_params)
        else:
            x0 = rng.uniform(-cfg.scale, cfg.scale, size=n_params)
        minimize(tracked, x0, method="Nelder-Mead",
                 options={"maxfev": cfg.budget, "xatol": 1e-4,
                          "fatol": 1e-4, "adaptive": False})

    assert best_params is not None
    best_map = MapSpec(family=family, m_out=m_out,
                       params=tuple(float(p) for p in best_params))
    dense = sample_sphere(domain.dim, 2 * len(domain), seed=domain.seed,
                          scheme=domain.scheme)
    dense_images = evaluate(best_map, dense)
    final_df = compute_df(neighbor_graph(dense_images, dense, neighbor_cfg),
                          dense)
    settings = asdict(cfg)
    settings.update({"family": family, "m_out": m_out,
                     "n_samples": len(domain), "evals": evals})
    return MuEstimate(best_df=float(final_df), best_map=best_map,
                      lower_bound=float(lower), trace=tuple(trace),
                      settings=settings)


def verify_sphere_bound(n: int, m_out: int, trials: int, n_samples: int,
                        seed: int = 0, family: str | None = None,
                        scheme: str = "quasi_uniform",
                        neighbor_cfg: NeighborConfig = DEFAULT_CONFIG,
                        threads: int = 1) -> dict:
    """Randomized check of D_f >= sqrt((n+2)/n) on the n-sphere.

    Requires m_out > n (below that the Borsuk-Ulam coincidence regime
    applies and the separation bound is not the statement being tested).
    Each trial draws a fresh map, certifies the neighbor graph, and
    compares D_f against the bound minus that map's sampling allowance; a
    violating trial raises BoundViolationError rather than being recorded.
    """
    if m_out <= n:
        raise ValueError("the separation bound needs m_out > n")
    if family is None:
        family = "circle_fourier" if n == 1 else "sphere_harmonic"
    bound = separation_bound(n)
    domain = sample_sphere(n, n_samples, seed=seed, scheme=scheme)

    def one(t: int) -> dict:
        spec = random_map(family, m_out=m_out, seed=[seed, 1000 + t],
                          d_in=n + 1)
        images = evaluate(spec, domain)
        certs = neighbor_graph(images, domain, neighbor_cfg)
        pair, df = extremal_pair(certs, domain)
        allowance = discretization_allowance(images, domain)
        if df < bound - allowance:
            raise BoundViolationError(
                f"trial {t}: D_f={df:.6f} below {bound:.6f} - {allowance:.6f}",
                reproducer={"trial": t, "map": map_to_json(spec), "df": df,
                            "bound": bound, "allowance": allowance,
                            "n": n, "m_out": m_out, "n_samples": n_samples,
                            "seed": seed, "scheme": scheme})
        return {"trial": t, "map": map_to_json(spec), "df": float(df),
                "allowance": float(allowance), "margin": float(df - bound),
                "extremal_pair": list(pair) if pair else None,
                "n_certificates": len(certs)}

    rows = _run_trials(one, trials, threads)
    return {"n": n, "m_out": m_out, "bound": float(bound),
            "n_samples": len(domain), "trials": rows,
            "min_margin": float(min(r["margin"] for r in rows)) if rows else 0.0,
            "all_ok": True}


def verify_borsuk_ulam(trials: int, n_samples: int = 2048, seed: int = 0,
                       m_out: int = 1, degree: int = 3,
                       threads: int = 1) -> dict:
    """Coincidence search for circle maps into R^(m_out <= 1 dims).

    With exact antipodal sampling, g(x) = f(x) - f(-x) satisfies
    g(-x) = -g(x), so along the sample loop some adjacent antipodal pair
    changes sign and the gap |f(x) - f(-x)| at the best sample is bounded
    by the sampling allowance.  The reported pair is antipodal, hence at
    intrinsic distance exactly 2.
    """
    domain = sample_sphere(1, n_samples, seed=seed, scheme="quasi_uniform")
    anti = domain.antipode
    assert anti is not None

    def one(t: int) -> dict:
        spec = random_map("circle_fourier", m_out=m_out, seed=[seed, 500 + t],
                          degree=degree)
        images = evaluate(spec, domain)
        gaps = np.linalg.norm(images - images[anti], axis=1)
        k = int(np.argmin(gaps))
        allowance = discretization_allowance(images, domain)
        return {"trial": t, "map": map_to_json(spec),
                "pair": [min(k, int(anti[k])), max(k, int(anti[k]))],
                "rho": float(domain.rho(k, int(anti[k]))),
                "image_gap": float(gaps[k]),
                "allowance": float(allowance),
                "ok": bool(gaps[k] <= allowance)}

    rows = _run_trials(one, trials, threads)
    return {"n": 1, "m_out": m_out, "n_samples": len(domain),
            "trials": rows, "all_ok": bool(all(r["ok"] for r in rows))}


def verify_cube_faces(m: int, trials: int, n_samples: int, seed: int = 0,
                      witness_cfg: WitnessConfig = DEFAULT_WITNESS_CONFIG,
                      neighbor_cfg: NeighborConfig = DEFAULT_CONFIG,
                      threads: int = 1) -> dict:
    """Disjoint-faces sweep on the boundary of [0,1]^m.

    Each trial draws a quadratic map into R^m, runs the witness search on
    the cover by min-faces plus the max-face union, and extracts a
    neighbor pair on the two opposite faces of one axis.  The pair is then
    cross-checked with the LP predicate on the full image set; a trial is
    ok only when both routes agree.  A witness search that fails to
    converge raises WitnessNotFoundError with its best report attached.
    """
    domain, cover = cube_boundary_cover(m, n_samples, seed=seed)

    def one(t: int) -> dict:
        spec = random_map("poly_quadratic", m_out=m, seed=[seed, 2000 + t],
                          d_in=m)
        images = evaluate(spec, domain)
        result = disjoint_faces_check(domain, cover, images, witness_cfg)
        i, j = result.pair
        lp_verdict, _ = pair_is_neighbor_fast(i, j, images, neighbor_cfg)
        return {"trial": t, "map": map_to_json(spec),
                "pair": [int(i), int(j)], "faces": list(result.faces),
                "residual": float(result.report.residual),
                "radius": float(result.report.radius),
                "lp_verdict": lp_verdict,
                "ok": lp_verdict == "yes"}

    rows = _run_trials(one, trials, threads)
    return {"m": m, "n_samples": len(domain), "trials": rows,
            "all_ok": bool(all(r["ok"] for r in rows))}


@dataclass(frozen=True)
class DeltaHistogram:
    """Empirical distribution of certified pair distances: exploratory
    output, nothing asserted."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    d_min: float
    d_max: float
    n_pairs: int

    def to_json(self) -> dict:
        return {"bin_edges": [float(v) for v in self.bin_edges],
                "counts": [int(c) for c in self.counts],
                "d_min": float(self.d_min), "d_max": float(self.d_max),
                "n_pairs": int(self.n_pairs)}


def delta_sweep(domain: SampledDomain, spec: MapSpec, bins: int = 40,
                neighbor_cfg: NeighborConfig = DEFAULT_CONFIG) -> DeltaHistogram:
    """Histogram of intrinsic distances over all certified neighbor pairs.

    Tuple certificates contribute every internal pair, accumulated in
    chunks so the all-samples tuple (constant or cospherical maps) stays
    in memory bounds.
    """
    images = evaluate(spec, domain)
    certs = neighbor_graph(images, domain, neighbor_cfg)
    edges = np.linspace(0.0, 2.0 + 1e-9, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    d_min, d_max = math.inf, 0.0
    n_pairs = 0
    pair_d = [domain.rho(*c.indices) for c in certs if len(c.indices) == 2]
    if pair_d:
        h, _ = np.histogram(pair_d, bins=edges)
        counts += h
        d_min = min(d_min, min(pair_d))
        d_max = max(d_max, max(pair_d))
        n_pairs += len(pair_d)
    for cert in certs:
        if len(cert.indices) == 2:
            continue
        idx = np.asarray(cert.indices)
        pts = domain.samples[idx]
        chunk = max(1, int(2e6 // max(len(idx), 1)))
        for start in range(0, len(idx), chunk):
            block = pts[start:start + chunk]
            d = np.sqrt(((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
            # keep only pairs (global_row < col) to count each pair once
            rows_g = np.arange(start, start + d.shape[0])[:, None]
            cols_g = np.arange(d.shape[1])[None, :]
            mask = rows_g < cols_g
            vals = d[mask]
            h, _ = np.histogram(vals, bins=edges)
            counts += h
            if vals.size:
                d_min = min(d_min, float(vals.min()))
                d_max = max(d_max, float(vals.max()))
                n_pairs += int(vals.size)
    if not math.isfinite(d_min):
        d_min = 0.0
    return DeltaHistogram(bin_edges=tuple(float(v) for v in edges),
                          counts=tuple(int(c) for c in counts),
                          d_min=d_min, d_max=d_max, n_pairs=n_pairs)
