"""Darboux III surface: metric factor, curvature and embedding heights.

The metric ds^2 = (1 + lam r^2)(dr^2 + r^2 dtheta^2) is realised as a surface of
revolution in a space with signature (+, +, -): a point at coordinate radius r
sits at ambient radius S(r) = r sqrt(1 + lam r^2) and height h(r), with
h'(r)^2 = S'(r)^2 - mu(r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ParameterError


@dataclass(frozen=True)
class SurfaceParams:
    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not (lam > 0 and math.isfinite(lam)):
            raise ParameterError(f"surface needs lam > 0, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class EmbeddedPoint:
    X: float
    Y: float
    Z: float


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ParameterError("r must be finite and >= 0")
    return r


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def conformal_factor(r, sp: SurfaceParams):
    r = _check_r(r)
    return _out(1.0 + sp.lam * r * r)


def scalar_curvature(r, sp: SurfaceParams):
    r = _check_r(r)
    mu = 1.0 + sp.lam * r * r
    return _out(-4.0 * sp.lam / mu ** 3)


def ambient_radius(r, sp: SurfaceParams):
    r = _check_r(r)
    return _out(r * np.sqrt(1.0 + sp.lam * r * r))


def _asinh(x):
    # log(x + sqrt(x^2 + 1)) with the square root factored out for large x
    x = np.asarray(x, dtype=float)
    big = x > 1e8
    small = np.log(x + np.sqrt(x * x + 1.0))
    large = np.log(2.0 * np.where(big, x, 1.0)) + 0.25 / np.where(big, x * x, 1.0)
    return np.where(big, large, small)


def _h_raw(r, lam):
    q = 2.0 + 3.0 * lam * r * r
    return (3.0 * np.sqrt((1.0 + lam * r * r) * q) - math.sqrt(3.0) * _asinh(np.sqrt(q))) / (6.0 * math.sqrt(lam))


def _h_series(r, lam):
    # Taylor series at the origin, x = lam r^2
    x = lam * r * r
    return math.sqrt(lam / 2.0) * r * r * (1.0 + x / 8.0 - 3.0 * x * x / 32.0 + 41.0 * x ** 3 / 512.0)


def embedding_height(r, sp: SurfaceParams):
    """Height h(r) of the embedded surface, normalised to h(0) = 0.

    For lam r^2 < 1e-4 the closed form loses digits to cancellation against
    its value at the origin, so a four-term Taylor series is used there.
    """
    r = _check_r(r)
    lam = sp.lam
    x = lam * r * r
    h = _h_raw(r, lam) - _h_raw(0.0, lam)
    return _out(np.where(x < 1e-4, _h_series(r, lam), h))


def embedding_slope(r, sp: SurfaceParams):
    """dh/dr = sqrt(S'(r)^2 - mu(r))."""
    r = _check_r(r)
    lam = sp.lam
    mu = 1.0 + lam * r * r
    # S' = (1 + 2 lam r^2)/sqrt(mu), so S'^2 - mu = lam r^2 (2 + 3 lam r^2)/mu
    return _out(r * np.sqrt(lam * (2.0 + 3.0 * lam * r * r) / mu))


def embed(r: float, theta: float, sp: SurfaceParams) -> EmbeddedPoint:
    s = ambient_radius(r, sp)
    return EmbeddedPoint(s * math.cos(theta), s * math.sin(theta), embedding_height(r, sp))


def comparison_heights(r, sp: SurfaceParams):
    """Heights over ambient radius S(r) of the paraboloid, hyperboloid and cone.

    paraboloid: Z = sqrt(lam/2) S^2
    hyperboloid: S^2 - Z^2 = -1/(2 lam), upper sheet shifted to start at 0
    cone: S^2 = (2Z/sqrt(3))^2
    """
    lam = sp.lam
    s = np.asarray(ambient_radius(r, sp), dtype=float)
    a2 = 1.0 / (2.0 * lam)
    parab = math.sqrt(lam / 2.0) * s * s
    # sqrt(S^2 + a^2) - a without cancellation
    hyper = s * s / (np.sqrt(s * s + a2) + math.sqrt(a2))
    cone = math.sqrt(3.0) / 2.0 * s
    return _out(parab), _out(hyper), _out(cone)
