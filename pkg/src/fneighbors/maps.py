"""Parametric map families from sampled domains into R^m.

A MapSpec is pure data (family name, output dimension, flat parameter
tuple); evaluation is deterministic and vectorized over the sample set.
Parameter layouts are documented per family below; where a family needs a
shape hint (input dimension, trig degree), it is inferred from the
parameter count so that specs serialize as plain JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .domains import SampledDomain

__all__ = [
    "MapSpec",
    "evaluate",
    "random_map",
    "param_count",
    "continuity_modulus",
    "map_to_json",
    "map_from_json",
    "FAMILIES",
]

FAMILIES = (
    "constant",
    "affine",
    "identity_embed",
    "circle_fourier",
    "sphere_harmonic",
    "poly_quadratic",
    "radial_warp",
)


@dataclass(frozen=True)
class MapSpec:
    """family name, target dimension, flat float parameters."""

    family: str
    m_out: int
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.m_out < 1:
            raise ValueError("m_out >= 1 required")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))


def _quad_basis(x: np.ndarray) -> np.ndarray:
    """[1, x_i, x_i*x_j (i<=j)] monomials per row; deterministic order."""
    n, d = x.shape
    cols = [np.ones(n)]
    cols.extend(x[:, i] for i in range(d))
    for i in range(d):
        for j in range(i, d):
            cols.append(x[:, i] * x[:, j])
    return np.column_stack(cols)


def _quad_basis_size(d: int) -> int:
    return 1 + d + d * (d + 1) // 2


def param_count(family: str, m_out: int, d_in: int, degree: int = 3) -> int:
    """Number of parameters the family expects.

    Layouts (all row-major, output coordinate varying slowest):
      constant        m_out                      the constant point
      affine          m_out*d_in + m_out          matrix rows then offset
      identity_embed  0
      circle_fourier  m_out*(2*degree+1)          per coord: a0, a1, b1, ..., aK, bK
      sphere_harmonic m_out*(1+d_in+d_in(d_in+1)/2)  quadratic monomial weights
      poly_quadratic  same as sphere_harmonic
      radial_warp     (1+d_in) + m_out*d_in       radial log-factor, then matrix
    """
    if family == "constant":
        return m_out
    if family == "affine":
        return m_out * d_in + m_out
    if family == "identity_embed":
        return 0
    if family == "circle_fourier":
        return m_out * (2 * degree + 1)
    if family in ("sphere_harmonic", "poly_quadratic"):
        return m_out * _quad_basis_size(d_in)
    if family == "radial_warp":
        return 1 + d_in + m_out * d_in
    raise ValueError(f"unknown family {family!r}")


def evaluate(spec: MapSpec, domain: SampledDomain) -> np.ndarray:
    """Images of every domain sample under the map, as an (N, m_out) array."""
    x = domain.samples
    n, d = x.shape
    m = spec.m_out
    p = np.asarray(spec.params, dtype=float)

    if spec.family == "constant":
        if len(p) != m:
            raise ValueError("constant expects m_out parameters")
        return np.tile(p, (n, 1))

    if spec.family == "affine":
        if len(p) != m * d + m:
            raise ValueError("affine expects m_out*d + m_out parameters")
        a = p[: m * d].reshape(m, d)
        b = p[m * d:]
        return x @ a.T + b

    if spec.family == "identity_embed":
        if m < d:
            raise ValueError("identity_embed needs m_out >= ambient dimension")
        out = np.zeros((n, m))
        out[:, :d] = x
        return out

    if spec.family == "circle_fourier":
        if domain.kind != "sphere" or domain.dim != 1:
            raise ValueError("circle_fourier is defined on sphere(1) domains")
        if len(p) % m != 0 or (len(p) // m) % 2 == 0:
            raise ValueError("circle_fourier expects m_out*(2K+1) parameters")
        k_deg = (len(p) // m - 1) // 2
        theta = np.arctan2(x[:, 1], x[:, 0])
        harmonics = [np.ones(n)]
        for k in range(1, k_deg + 1):
            harmonics.append(np.cos(k * theta))
            harmonics.append(np.sin(k * theta))
        basis = np.column_stack(harmonics)  # (n, 2K+1)
        coeff = p.reshape(m, 2 * k_deg + 1)
        return basis @ coeff.T

    if spec.family in ("sphere_harmonic", "poly_quadratic"):
        if spec.family == "sphere_harmonic" and not (
            domain.kind == "sphere" and domain.dim == 2
        ):
            raise ValueError("sphere_harmonic is defined on sphere(2) domains")
        size = _quad_basis_size(d)
        if len(p) != m * size:
            raise ValueError("quadratic family expects m_out*basis parameters")
        basis = _quad_basis(x)
        coeff = p.reshape(m, size)
        return basis @ coeff.T

    if spec.family == "radial_warp":
        if len(p) != 1 + d + m * d:
            raise ValueError("radial_warp expects 1 + d + m_out*d parameters")
        # positive radial factor exp(c0 + <c, x>); the exponent is clipped so
        # optimizer excursions cannot overflow
        t = p[0] + x @ p[1: 1 + d]
        g = np.exp(np.clip(t, -8.0, 8.0))
        a = p[1 + d:].reshape(m, d)
        return g[:, None] * (x @ a.T)

    raise ValueError(f"unknown family {spec.family!r}")


def random_map(family: str, m_out: int, seed, scale: float = 1.0,
               d_in: int = 2, degree: int = 3) -> MapSpec:
    """MapSpec with parameters drawn i.i.d. uniform in [-scale, scale] from
    a named PCG64 stream.  seed may be an int or a sequence of ints (stream
    key); identical seeds give identical specs.  scale=0 gives the zero map.
    """
    count = param_count(family, m_out, d_in, degree)
    rng = np.random.default_rng(seed)
    params = rng.uniform(-scale, scale, size=count) if count else np.empty(0)
    return MapSpec(family=family, m_out=m_out, params=tuple(params))


def continuity_modulus(images: np.ndarray, domain: SampledDomain) -> float:
    """Finite-difference modulus max |f(x)-f(y)| / rho(x,y) over
    nearest-neighbor sample pairs; 0 for constant maps."""
    tree = cKDTree(domain.samples)
    dist, idx = tree.query(domain.samples, k=2)
    nn_dist = dist[:, 1]
    nn_idx = idx[:, 1]
    img_dist = np.linalg.norm(images - images[nn_idx], axis=1)
    good = nn_dist > 1e-15
    if not good.any():
        return 0.0
    return float((img_dist[good] / nn_dist[good]).max())


def discretization_allowance(images: np.ndarray, domain: SampledDomain) -> float:
    """delta_N = 2 * modulus * mesh: the distance slack a sample-level
    certificate inherits from discretizing the continuous domain."""
    return 2.0 * continuity_modulus(images, domain) * domain.mesh_size()


def map_to_json(spec: MapSpec) -> str:
    return json.dumps({"family": spec.family, "m_out": spec.m_out,
                       "params": list(spec.params)}, sort_keys=True)


def map_from_json(text: str) -> MapSpec:
    doc = json.loads(text)
    return MapSpec(family=doc["family"], m_out=int(doc["m_out"]),
                   params=tuple(doc["params"]))


def identity_fourier_params(m_out: int = 2, degree: int = 1) -> tuple[float, ...]:
    """circle_fourier parameters reproducing identity_embed on S^1."""
    per = 2 * degree + 1
    p = np.zeros(m_out * per)
    p[1] = 1.0          # cos(theta) into coordinate 0
    if m_out >= 2:
        p[per + 2] = 1.0  # sin(theta) into coordinate 1
    return tuple(p)
