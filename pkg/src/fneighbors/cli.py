"""Command-line front end: reproducible experiment runs with JSON reports.

Settings resolve in three layers: built-in defaults, then a JSON config
file (--config) whose keys mirror the flag names, then explicit flags;
later layers win.  Each report embeds the resolved result-affecting
settings and the effective tolerance set, carries no timestamps, and
renders with sorted keys, so identical (command, config, seed) invocations
produce byte-identical output for any --threads value.

Exit codes: 0 clean pass, 1 property violation (the report is still
written and carries a reproducer), 2 usage or config error, 3 internal
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import traceback
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from .domains import (
    CoverAssignment,
    SampledDomain,
    cube_boundary_cover,
    regular_triangulation_cover,
    sample_sphere,
    simplex_boundary_cover,
)
from .geometry import separation_bound
from .homotopy import certify_cover
from .maps import MapSpec, evaluate, map_from_json, map_to_json, random_map
from .muopt import (
    BoundViolationError,
    OptimizerConfig,
    delta_sweep,
    estimate_mu,
    verify_borsuk_ulam,
    verify_cube_faces,
    verify_sphere_bound,
)
from .neighbors import (
    DEFAULT_CONFIG,
    NeighborConfig,
    extremal_pair,
    neighbor_graph,
)
from .witness import (
    DEFAULT_WITNESS_CONFIG,
    WitnessNotFoundError,
    witness_point,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

# plumbing keys: they never change computed results, so they stay out of
# the embedded config (reports must match across --threads and out paths)
_EXECUTION_KEYS = frozenset({"threads", "out", "csv", "svg", "config"})


class UsageError(Exception):
    """Bad flag/config combination; maps to exit code 2."""


# ---------------------------------------------------------------------------
# config resolution

_DOMAIN_DEFAULTS = {
    "domain": "sphere",
    "n": 1,
    "samples": 512,
    "seed": 0,
    "scheme": "quasi_uniform",
}

_MAP_DEFAULTS = {
    "map": None,
    "family": None,
    "m_out": 2,
    "degree": 3,
    "scale": 1.0,
}

DEFAULTS: dict[str, dict] = {
    "neighbors": {**_DOMAIN_DEFAULTS, **_MAP_DEFAULTS,
                  "eps_inside": None, "dump_certs": False,
                  "out": None, "svg": None},
    "verify-sphere": {"n": 1, "m_out": 2, "trials": 10, "samples": 2048,
                      "seed": 0, "scheme": "quasi_uniform", "family": None,
                      "degree": 3, "eps_inside": None, "threads": 1,
                      "out": None, "csv": None},
    "verify-cube": {"n": 2, "trials": 10, "samples": 2048, "seed": 0,
                    "eps_inside": None, "eps_witness": None, "threads": 1,
                    "out": None, "csv": None},
    "mu": {"n": 1, "m_out": None, "family": None, "samples": 512,
           "restarts": 8, "budget": 2000, "probes": 64, "seed": 0,
           "scheme": "quasi_uniform", "scale": 1.0, "degree": 3,
           "eps_inside": None, "out": None, "svg": None},
    "witness": {**_DOMAIN_DEFAULTS, **_MAP_DEFAULTS,
                "eps_witness": None, "out": None},
    "degree": {**_DOMAIN_DEFAULTS, "r_thick": None, "out": None},
    "delta-sweep": {**_DOMAIN_DEFAULTS, **_MAP_DEFAULTS, "bins": 40,
                    "eps_inside": None, "out": None, "csv": None},
}


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    cfg = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            doc = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}")
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in doc.items():
            norm = key.replace("-", "_")
            if norm == "command":
                continue
            if norm not in defaults:
                raise UsageError(f"unknown config key {key!r}")
            cfg[norm] = value
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _audit(command: str, cfg: dict) -> dict:
    kept = {k: v for k, v in cfg.items() if k not in _EXECUTION_KEYS}
    return {"command": command, **kept}


# ---------------------------------------------------------------------------
# shared builders

def _build_domain(cfg: dict) -> tuple[SampledDomain, CoverAssignment | None]:
    kind = cfg["domain"]
    n = int(cfg["n"])
    n_samples = int(cfg["samples"])
    seed = int(cfg["seed"])
    if kind == "sphere":
        return sample_sphere(n, n_samples, seed=seed,
                             scheme=cfg.get("scheme") or "quasi_uniform"), None
    if kind == "simplex":
        return simplex_boundary_cover(n, n_samples, seed=seed)
    if kind == "cube":
        return cube_boundary_cover(n, n_samples, seed=seed)
    raise UsageError(f"unknown domain {kind!r} (expected sphere, simplex or cube)")


def _domain_cover(cfg: dict) -> tuple[SampledDomain, CoverAssignment]:
    domain, cover = _build_domain(cfg)
    if cover is None:
        cover = regular_triangulation_cover(domain)
    return domain, cover


def _default_family(domain: SampledDomain) -> str:
    if domain.kind == "sphere" and domain.dim == 1:
        return "circle_fourier"
    if domain.kind == "sphere" and domain.dim == 2:
        return "sphere_harmonic"
    return "poly_quadratic"


def _build_map(cfg: dict, domain: SampledDomain) -> MapSpec:
    if cfg.get("map"):
        text = str(cfg["map"])
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise UsageError(f"cannot read map file: {exc}")
        try:
            return map_from_json(text)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad map JSON: {exc}")
    family = cfg.get("family") or _default_family(domain)
    try:
        return random_map(family, m_out=int(cfg["m_out"]),
                          seed=[int(cfg["seed"]), 11],
                          scale=float(cfg["scale"]),
                          d_in=domain.samples.shape[1],
                          degree=int(cfg["degree"]))
    except ValueError as exc:
        raise UsageError(str(exc))


def _neighbor_cfg(cfg: dict) -> NeighborConfig:
    if cfg.get("eps_inside") is None:
        return DEFAULT_CONFIG
    return NeighborConfig(eps_inside_rel=float(cfg["eps_inside"]))


def _witness_cfg(cfg: dict):
    wcfg = replace(DEFAULT_WITNESS_CONFIG, seed=int(cfg["seed"]))
    if cfg.get("eps_witness") is not None:
        wcfg = replace(wcfg, eps_witness_rel=float(cfg["eps_witness"]))
    return wcfg


# ---------------------------------------------------------------------------
# output

def _render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _write_report(report: dict, out: str | None) -> None:
    text = _render(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, fieldnames: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return s.rstrip("0").rstrip(".") if "." in s else s


def _svg_doc(width: float, height: float, body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def _neighbors_svg(domain: SampledDomain, images: np.ndarray,
                   witness_sphere, pair, df: float) -> str:
    """Two panels: the domain circle with the extremal pair marked, and the
    image curve with the certifying sphere."""
    panel, margin = 360.0, 24.0
    body = ['<rect width="100%" height="100%" fill="white"/>']

    def dom_xy(p):
        s = panel / 2.4
        return (margin + panel / 2 + p[0] * s,
                margin + panel / 2 - p[1] * s)

    cx, cy = dom_xy(np.zeros(2))
    body.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                f'r="{_fmt(panel / 2.4)}" fill="none" stroke="#999"/>')

    order = np.argsort(np.arctan2(domain.samples[:, 1], domain.samples[:, 0]),
                       kind="stable")
    loop = np.append(order, order[0])

    ext = [images]
    if witness_sphere is not None:
        c = np.asarray(witness_sphere.center, dtype=float)
        r = float(witness_sphere.radius)
        ext.append((c + r)[None, :])
        ext.append((c - r)[None, :])
    pts = np.vstack(ext)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo))
    span = span if span > 0 else 1.0
    scale = panel / (1.15 * span)
    mid = (lo + hi) / 2.0
    x_right = margin * 2 + panel

    def img_xy(p):
        return (x_right + panel / 2 + (p[0] - mid[0]) * scale,
                margin + panel / 2 - (p[1] - mid[1]) * scale)

    curve = " ".join("{},{}".format(*map(_fmt, img_xy(q)))
                     for q in images[loop])
    body.append(f'<polyline points="{curve}" fill="none" '
                f'stroke="#1f77b4" stroke-width="1.2"/>')

    if witness_sphere is not None:
        wx, wy = img_xy(np.asarray(witness_sphere.center, dtype=float))
        body.append(f'<circle cx="{_fmt(wx)}" cy="{_fmt(wy)}" '
                    f'r="{_fmt(float(witness_sphere.radius) * scale)}" '
                    f'fill="none" stroke="#2ca02c" stroke-width="1.5" '
                    f'stroke-dasharray="6 3"/>')

    if pair is not None:
        a, b = pair
        ax, ay = dom_xy(domain.samples[a])
        bx, by = dom_xy(domain.samples[b])
        body.append(f'<line x1="{_fmt(ax)}" y1="{_fmt(ay)}" '
                    f'x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                    f'stroke="#d62728" stroke-dasharray="4 3"/>')
        for x, y in ((ax, ay), (bx, by)):
            body.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="5" '
                        f'fill="#d62728"/>')
        for q in (images[a], images[b]):
            qx, qy = img_xy(q)
            body.append(f'<circle cx="{_fmt(qx)}" cy="{_fmt(qy)}" r="4" '
                        f'fill="#d62728"/>')

    body.append(f'<text x="{_fmt(margin)}" y="{_fmt(margin * 0.7)}" '
                f'font-family="monospace" font-size="13">'
                f'domain pair, D_f = {_fmt(df)}</text>')
    body.append(f'<text x="{_fmt(x_right)}" y="{_fmt(margin * 0.7)}" '
                f'font-family="monospace" font-size="13">'
                f'image curve + witness sphere</text>')
    return _svg_doc(margin * 3 + panel * 2, margin * 2 + panel, body)


def _trace_svg(trace, lower_bound: float) -> str:
    """Running-best objective against evaluation count, with the proven
    lower bound as a dashed reference line."""
    width, height, margin = 480.0, 260.0, 32.0
    body = ['<rect width="100%" height="100%" fill="white"/>']
    if trace:
        xs = [i for i, _ in trace]
        ys = [v for _, v in trace]
        x_max = max(xs[-1], 1)
        y_lo = min(min(ys), lower_bound)
        y_hi = max(ys)
        y_span = (y_hi - y_lo) or 1.0

        def to_xy(e, v):
            return (margin + (width - 2 * margin) * e / x_max,
                    height - margin - (height - 2 * margin) * (v - y_lo) / y_span)

        # running best is a step function: hold each level until the next drop
        pts = []
        prev = None
        for e, v in trace:
            if prev is not None:
                pts.append(to_xy(e, prev))
            pts.append(to_xy(e, v))
            prev = v
        pts.append(to_xy(x_max, prev))
        line = " ".join("{},{}".format(*map(_fmt, p)) for p in pts)
        body.append(f'<polyline points="{line}" fill="none" '
                    f'stroke="#1f77b4" stroke-width="1.5"/>')
        _, by = to_xy(0, lower_bound)
        body.append(f'<line x1="{_fmt(margin)}" y1="{_fmt(by)}" '
                    f'x2="{_fmt(width - margin)}" y2="{_fmt(by)}" '
                    f'stroke="#d62728" stroke-dasharray="5 4"/>')
        body.append(f'<text x="{_fmt(margin)}" y="{_fmt(by - 5)}" '
                    f'font-family="monospace" font-size="12" fill="#d62728">'
                    f'lower bound {_fmt(lower_bound)}</text>')
    body.append(f'<text x="{_fmt(margin)}" y="{_fmt(margin * 0.6)}" '
                f'font-family="monospace" font-size="13">'
                f'best certified span vs evaluations</text>')
    return _svg_doc(width, height, body)


# ---------------------------------------------------------------------------
# command handlers; each returns (exit_code, report)

def cmd_neighbors(cfg: dict) -> tuple[int, dict]:
    domain, _ = _build_domain(cfg)
    spec = _build_map(cfg, domain)
    ncfg = _neighbor_cfg(cfg)
    images = evaluate(spec, domain)
    certs = neighbor_graph(images, domain, ncfg)
    pair, df = extremal_pair(certs, domain)

    extremal_cert = None
    if pair is not None:
        for cert in certs:
            if pair[0] in cert.indices and pair[1] in cert.indices:
                extremal_cert = cert
                break

    report = {
        "command": "neighbors",
        "config": _audit("neighbors", cfg),
        "tolerances": asdict(ncfg),
        "map": json.loads(map_to_json(spec)),
        "n_samples": len(domain),
        "n_certificates": len(certs),
        "df": float(df),
        "extremal_pair": list(pair) if pair is not None else None,
        "extremal_certificate": (extremal_cert.to_json()
                                 if extremal_cert is not None else None),
    }
    if cfg.get("dump_certs"):
        report["certificates"] = [c.to_json() for c in certs]

    if cfg.get("svg"):
        if not (domain.kind == "sphere" and domain.dim == 1 and spec.m_out == 2):
            raise UsageError("--svg needs the circle domain and m_out=2")
        sphere = None
        if extremal_cert is not None and not isinstance(extremal_cert.witness, str):
            sphere = extremal_cert.witness
        Path(cfg["svg"]).write_text(
            _neighbors_svg(domain, images, sphere, pair, df))

    print(f"D_f = {df:.9g}  extremal pair = {report['extremal_pair']}  "
          f"certificates = {len(certs)}")
    return EXIT_OK, report


def cmd_verify_sphere(cfg: dict) -> tuple[int, dict]:
    n, m_out = int(cfg["n"]), int(cfg["m_out"])
    ncfg = _neighbor_cfg(cfg)
    base = {"command": "verify-sphere",
            "config": _audit("verify-sphere", cfg),
            "tolerances": asdict(ncfg)}
    if m_out > n:
        try:
            result = verify_sphere_bound(
                n, m_out, trials=int(cfg["trials"]),
                n_samples=int(cfg["samples"]), seed=int(cfg["seed"]),
                family=cfg.get("family"), scheme=cfg["scheme"],
                neighbor_cfg=ncfg, threads=int(cfg["threads"]))
        except BoundViolationError as exc:
            report = {**base, "result": None, "all_ok": False,
                      "violation": str(exc), "reproducer": exc.reproducer}
            print(f"FAIL: {exc}")
            return EXIT_VIOLATION, report
        report = {**base, "result": result, "all_ok": result["all_ok"]}
        print(f"separation bound {result['bound']:.6f} (n={n}, m_out={m_out}); "
              f"{len(result['trials'])} trials at N={result['n_samples']}")
        print(f"min margin over bound = {result['min_margin']:.6f}; "
              f"all consistent: {result['all_ok']}")
        if cfg.get("csv"):
            _write_csv(cfg["csv"],
                       ["trial", "df", "allowance", "margin", "n_certificates"],
                       result["trials"])
        return (EXIT_OK if result["all_ok"] else EXIT_VIOLATION), report
    # coincidence regime: antipodal sweep, circle domains only
    if n != 1:
        raise UsageError("the coincidence sweep (m_out <= n) is implemented "
                         "for n=1 only")
    result = verify_borsuk_ulam(trials=int(cfg["trials"]),
                                n_samples=int(cfg["samples"]),
                                seed=int(cfg["seed"]), m_out=m_out,
                                degree=int(cfg["degree"]),
                                threads=int(cfg["threads"]))
    report = {**base, "result": result, "all_ok": result["all_ok"]}
    worst = max(r["image_gap"] for r in result["trials"])
    print(f"coincidence sweep (m_out={m_out} <= n=1): "
          f"{len(result['trials'])} trials, max image gap {worst:.3e}; "
          f"all within allowance: {result['all_ok']}")
    if cfg.get("csv"):
        _write_csv(cfg["csv"],
                   ["trial", "rho", "image_gap", "allowance", "ok"],
                   result["trials"])
    return (EXIT_OK if result["all_ok"] else EXIT_VIOLATION), report


def cmd_verify_cube(cfg: dict) -> tuple[int, dict]:
    ncfg = _neighbor_cfg(cfg)
    wcfg = _witness_cfg(cfg)
    base = {"command": "verify-cube",
            "config": _audit("verify-cube", cfg),
            "tolerances": {**asdict(ncfg), "eps_witness_rel": wcfg.eps_witness_rel}}
    try:
        result = verify_cube_faces(int(cfg["n"]), trials=int(cfg["trials"]),
                                   n_samples=int(cfg["samples"]),
                                   seed=int(cfg["seed"]), witness_cfg=wcfg,
                                   neighbor_cfg=ncfg,
                                   threads=int(cfg["threads"]))
    except WitnessNotFoundError as exc:
        report = {**base, "result": None, "all_ok": False,
                  "violation": "witness search did not converge",
                  "best_report": exc.report.to_json()}
        print("FAIL: witness search did not converge")
        return EXIT_VIOLATION, report
    report = {**base, "result": result, "all_ok": result["all_ok"]}
    worst = max(r["residual"] for r in result["trials"])
    print(f"disjoint-faces sweep on the {int(cfg['n'])}-cube boundary: "
          f"{len(result['trials'])} trials, max residual {worst:.3e}; "
          f"all certified: {result['all_ok']}")
    if cfg.get("csv"):
        _write_csv(cfg["csv"],
                   ["trial", "pair", "faces", "residual", "lp_verdict", "ok"],
                   result["trials"])
    return (EXIT_OK if result["all_ok"] else EXIT_VIOLATION), report


def cmd_mu(cfg: dict) -> tuple[int, dict]:
    n = int(cfg["n"])
    m_out = int(cfg["m_out"]) if cfg.get("m_out") is not None else n + 1
    family = cfg.get("family") or ("circle_fourier" if n == 1
                                   else "sphere_harmonic")
    ncfg = _neighbor_cfg(cfg)
    ocfg = OptimizerConfig(n_restarts=int(cfg["restarts"]),
                           budget=int(cfg["budget"]),
                           n_samples=int(cfg["samples"]),
                           scale=float(cfg["scale"]),
                           degree=int(cfg["degree"]),
                           seed=int(cfg["seed"]),
                           n_probes=int(cfg["probes"]))
    domain = sample_sphere(n, int(cfg["samples"]), seed=int(cfg["seed"]),
                           scheme=cfg["scheme"])
    base = {"command": "mu", "config": _audit("mu", cfg),
            "tolerances": asdict(ncfg)}
    try:
        est = estimate_mu(domain, family, m_out, ocfg, neighbor_cfg=ncfg)
    except BoundViolationError as exc:
        report = {**base, "result": None,
                  "violation": str(exc), "reproducer": exc.reproducer}
        print(f"FAIL: {exc}")
        return EXIT_VIOLATION, report
    report = {**base, "result": est.to_json()}
    print(f"bracket [{est.lower_bound:.6f}, {est.best_df:.6f}] "
          f"(proven lower bound, best certified span)")
    print(f"family {family} -> R^{m_out}, {len(est.trace)} improvements, "
          f"{est.settings['evals']} evaluations")
    if cfg.get("svg"):
        Path(cfg["svg"]).write_text(_trace_svg(est.trace, est.lower_bound))
    return EXIT_OK, report


def cmd_witness(cfg: dict) -> tuple[int, dict]:
    domain, cover = _domain_cover(cfg)
    spec = _build_map(cfg, domain)
    wcfg = _witness_cfg(cfg)
    images = evaluate(spec, domain)
    base = {"command": "witness", "config": _audit("witness", cfg),
            "tolerances": {"eps_witness_rel": wcfg.eps_witness_rel},
            "map": json.loads(map_to_json(spec)),
            "elements": list(cover.names)}
    try:
        rep = witness_point(domain, cover, images, wcfg)
    except WitnessNotFoundError as exc:
        report = {**base, "result": exc.report.to_json(), "ok": False}
        print(f"FAIL: residual {exc.report.residual:.3e} above gate")
        return EXIT_VIOLATION, report
    report = {**base, "result": rep.to_json(), "ok": True}
    point = np.array2string(np.asarray(rep.point), precision=6,
                            separator=", ")
    print(f"witness point {point}  radius {rep.radius:.6g}  "
          f"residual {rep.residual:.3e}")
    print(f"contacts {list(rep.chosen)} across {len(cover.names)} elements")
    return EXIT_OK, report


def cmd_degree(cfg: dict) -> tuple[int, dict]:
    domain, cover = _domain_cover(cfg)
    r_thick = cfg.get("r_thick")
    cert = certify_cover(domain, cover,
                         r_thick=float(r_thick) if r_thick is not None else None)
    report = {"command": "degree", "config": _audit("degree", cfg),
              "elements": list(cover.names), "result": cert.to_json()}
    shown = "n/a" if cert.degree is None else cert.degree
    print(f"degree = {shown}  confidence = {cert.confidence:.3f}  "
          f"verdict = {cert.verdict}")
    return EXIT_OK, report


def cmd_delta_sweep(cfg: dict) -> tuple[int, dict]:
    domain, _ = _build_domain(cfg)
    spec = _build_map(cfg, domain)
    ncfg = _neighbor_cfg(cfg)
    hist = delta_sweep(domain, spec, bins=int(cfg["bins"]), neighbor_cfg=ncfg)
    report = {"command": "delta-sweep", "config": _audit("delta-sweep", cfg),
              "tolerances": asdict(ncfg),
              "map": json.loads(map_to_json(spec)),
              "result": hist.to_json()}
    print(f"{hist.n_pairs} certified pairs, intrinsic distances in "
          f"[{hist.d_min:.6g}, {hist.d_max:.6g}]")
    if cfg.get("csv"):
        rows = [{"bin_lo": hist.bin_edges[i], "bin_hi": hist.bin_edges[i + 1],
                 "count": hist.counts[i]} for i in range(len(hist.counts))]
        _write_csv(cfg["csv"], ["bin_lo", "bin_hi", "count"], rows)
    return EXIT_OK, report


HANDLERS = {
    "neighbors": cmd_neighbors,
    "verify-sphere": cmd_verify_sphere,
    "verify-cube": cmd_verify_cube,
    "mu": cmd_mu,
    "witness": cmd_witness,
    "degree": cmd_degree,
    "delta-sweep": cmd_delta_sweep,
}


# ---------------------------------------------------------------------------
# parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="PRNG stream key (default 0)")
    p.add_argument("--config", help="JSON file whose keys mirror the flags; "
                                    "explicit flags win")
    p.add_argument("--out", help="write the JSON report here instead of stdout")


def _add_domain(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", choices=["sphere", "simplex", "cube"],
                   help="domain kind (default sphere)")
    p.add_argument("--n", type=int,
                   help="sphere dimension / simplex n / cube dimension")
    p.add_argument("--samples", type=int, help="sample count")
    p.add_argument("--scheme", choices=["quasi_uniform", "uniform_random"],
                   help="sphere sampling scheme")


def _add_map(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", help="map as inline JSON or a path to a JSON file")
    p.add_argument("--family",
                   help="map family for a seeded random draw (used when "
                        "--map is absent)")
    p.add_argument("--m-out", type=int, help="target dimension")
    p.add_argument("--degree", type=int, help="family truncation order")
    p.add_argument("--scale", type=float, help="random parameter amplitude")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fneighbors",
        description="certified neighbor-pair experiments with reproducible "
                    "JSON reports")
    sub = parser.add_subparsers(dest="cmd")

    p = sub.add_parser("neighbors",
                       help="certify the neighbor graph of one map and "
                            "report the extremal span")
    _add_domain(p)
    _add_map(p)
    p.add_argument("--eps-inside", type=float,
                   help="relative emptiness tolerance override")
    p.add_argument("--dump-certs", action="store_true", default=None,
                   help="embed every certificate in the report")
    p.add_argument("--svg", help="write a two-panel SVG (circle domain, "
                                 "m_out=2 only)")
    _add_common(p)

    p = sub.add_parser("verify-sphere",
                       help="randomized sweep of the sphere lower bound "
                            "(or the coincidence sweep when m_out <= n)")
    p.add_argument("--n", type=int, help="sphere dimension (default 1)")
    p.add_argument("--m-out", type=int, help="target dimension (default 2)")
    p.add_argument("--trials", type=int, help="number of random maps")
    p.add_argument("--samples", type=int, help="sample count")
    p.add_argument("--scheme", choices=["quasi_uniform", "uniform_random"])
    p.add_argument("--family", help="map family override")
    p.add_argument("--degree", type=int, help="family truncation order")
    p.add_argument("--eps-inside", type=float)
    p.add_argument("--threads", type=int, help="worker cap; results do not "
                                               "depend on it")
    p.add_argument("--csv", help="write one CSV row per trial")
    _add_common(p)

    p = sub.add_parser("verify-cube",
                       help="disjoint-faces sweep on the cube boundary")
    p.add_argument("--n", type=int, help="cube dimension (default 2)")
    p.add_argument("--trials", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--eps-inside", type=float)
    p.add_argument("--eps-witness", type=float)
    p.add_argument("--threads", type=int)
    p.add_argument("--csv", help="write one CSV row per trial")
    _add_common(p)

    p = sub.add_parser("mu", help="minimize the certified span over a map "
                                  "family and report the bracket")
    p.add_argument("--n", type=int, help="sphere dimension (default 1)")
    p.add_argument("--m-out", type=int, help="target dimension (default n+1)")
    p.add_argument("--family")
    p.add_argument("--samples", type=int, help="search sampling density")
    p.add_argument("--restarts", type=int)
    p.add_argument("--budget", type=int, help="evaluations per restart")
    p.add_argument("--probes", type=int, help="uniform probes before restarts")
    p.add_argument("--scheme", choices=["quasi_uniform", "uniform_random"])
    p.add_argument("--scale", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--eps-inside", type=float)
    p.add_argument("--svg", help="write the running-best trace as SVG")
    _add_common(p)

    p = sub.add_parser("witness", help="search for a common witness sphere "
                                       "over the domain's standard cover")
    _add_domain(p)
    _add_map(p)
    p.add_argument("--eps-witness", type=float,
                   help="relative residual gate override")
    _add_common(p)

    p = sub.add_parser("degree", help="classify the standard cover by the "
                                      "degree of its nerve map")
    _add_domain(p)
    p.add_argument("--r-thick", type=float,
                   help="fixed thickening radius (default: three-point scan)")
    _add_common(p)

    p = sub.add_parser("delta-sweep",
                       help="histogram of intrinsic distances over all "
                            "certified pairs")
    _add_domain(p)
    _add_map(p)
    p.add_argument("--bins", type=int)
    p.add_argument("--eps-inside", type=float)
    p.add_argument("--csv", help="write the histogram as CSV")
    _add_common(p)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.cmd is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        cfg = _resolve(args, DEFAULTS[args.cmd])
        code, report = HANDLERS[args.cmd](cfg)
        _write_report(report, cfg.get("out"))
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
