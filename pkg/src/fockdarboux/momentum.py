"""Momentum-space wavefunctions and densities of the FDD system.

The radial momentum function is the order-m Hankel transform
F(p) = int_0^inf R(r) J_m(r p) r dr, with int F^2 p dp = 1.  The density on
the momentum plane is gamma(p) = F(p)^2 / (2 pi), the 1/(2 pi) coming from the
angular factor e^{i m phi}/sqrt(2 pi).  The phase i^{-l} is never formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .numerics import (QuadratureResult, hankel_transform, oscillatory_hankel_integrate,
                       radial_support)
from .params import (DEFAULT_TOL, ConvergenceError, NumericError, ParameterError,
                     QuantumNumbers, SystemParams, Tolerance)
from .spectra import effective_frequency
from .states import fdd_radial_wavefunction

TWO_PI = 2.0 * math.pi


class CoverageError(NumericError):
    """The momentum grid stops before the density has decayed."""

    def __init__(self, message, suggested_p_max):
        super().__init__(message)
        self.suggested_p_max = suggested_p_max


def _radial_fn(qn, sp):
    return lambda r: fdd_radial_wavefunction(qn, sp, r)


def _support(qn, sp):
    om = effective_frequency(qn, sp)
    scale = 1.0 / math.sqrt(om)
    return scale, radial_support(_radial_fn(qn, sp), scale)


def hankel_values(qn: QuantumNumbers, sp: SystemParams, p, tol: Tolerance = DEFAULT_TOL,
                  support: tuple[float, float] | None = None):
    """Signed F(p) on an array of p >= 0, with per-point error estimates.

    ``support`` is the (scale, r_max) pair from a previous call, if any.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(p < 0):
        raise ParameterError("p must be >= 0")
    scale, r_max = support if support is not None else _support(qn, sp)
    g = _radial_fn(qn, sp)
    vals = np.zeros_like(p)
    errs = np.zeros_like(p)
    pos = p > 0
    if np.any(pos):
        v, e, _ = hankel_transform(g, qn.l, p[pos], tol, r_max=r_max, scale=scale)
        vals[pos], errs[pos] = v, e
    if np.any(~pos):
        res = oscillatory_hankel_integrate(g, qn.l, 0.0, tol, scale=scale, r_max=r_max)
        vals[~pos], errs[~pos] = res.value, res.abs_error_estimate
    return vals, errs


def fdd_momentum_wavefunction(qn: QuantumNumbers, sp: SystemParams, p: float,
                              tol: Tolerance = DEFAULT_TOL) -> QuadratureResult:
    """|int R(r) J_m(r p) r dr| at a single momentum (J_{|m|} up to sign)."""
    scale, r_max = _support(qn, sp)
    res = oscillatory_hankel_integrate(_radial_fn(qn, sp), qn.l, float(p), tol,
                                       scale=scale, r_max=r_max)
    return QuadratureResult(abs(res.value), res.abs_error_estimate, res.evaluations)


def default_p_max(qn: QuantumNumbers, sp: SystemParams) -> float:
    return 6.0 * math.sqrt(sp.omega_t * qn.c)


def covering_p_max(qn: QuantumNumbers, sp: SystemParams, tail: float = 1e-14,
                   tol: Tolerance = DEFAULT_TOL, max_extensions: int = 6) -> float:
    """Smallest p_max = default * 1.5^k with gamma(p_max) <= tail * peak.

    Curvature makes the momentum tail exponential rather than Gaussian, so the
    default radius is often too short for lam of order one.
    """
    p_max = default_p_max(qn, sp)
    om = effective_frequency(qn, sp)
    support = _support(qn, sp)
    probe = np.linspace(0.0, 6.0 * math.sqrt(om * qn.c), 64)
    F, _ = hankel_values(qn, sp, probe, tol, support)
    peak = float(np.max(F * F))
    for _ in range(max_extensions + 1):
        # several probes so that a node of F near p_max cannot fake decay
        F, _ = hankel_values(qn, sp, np.linspace(0.8 * p_max, p_max, 5), tol, support)
        if float(np.max(F * F)) <= tail * peak:
            return p_max
        p_max *= 1.5
    raise CoverageError("momentum density did not decay within the extended range",
                        suggested_p_max=p_max)


def default_p_grid(qn: QuantumNumbers, sp: SystemParams, points: int = 2048,
                   p_max: float | None = None) -> np.ndarray:
    """Hybrid grid: geometric near the origin, then two uniform stretches.

    The dense uniform stretch covers the bulk of the density, whose width is
    set by sqrt(Omega c) rather than sqrt(omega_t c); the sparser one reaches
    out to p_max through the tail.
    """
    if p_max is None:
        p_max = default_p_max(qn, sp)
    om = effective_frequency(qn, sp)
    core = min(6.0 * math.sqrt(om * qn.c), p_max)
    knee = 0.02 * core
    n_geo = points // 16
    n_tail = points // 4 if core < p_max else 0
    n_core = points - n_geo - n_tail - 1
    parts = [[0.0], np.geomspace(1e-4 * knee, knee, n_geo, endpoint=False),
             np.linspace(knee, core, n_core, endpoint=n_tail == 0)]
    if n_tail:
        parts.append(np.linspace(core, p_max, n_tail))
    return np.concatenate(parts)


@dataclass(frozen=True)
class MomentumTable:
    qn: QuantumNumbers
    sp: SystemParams
    p_grid: np.ndarray
    psi_tilde_magnitude: np.ndarray
    gamma: np.ndarray
    norm_residual: float
    max_abs_error: float

    def spline(self, power: int = 1) -> CubicSpline:
        """Cubic spline through gamma * 2 pi p * p^power."""
        return CubicSpline(self.p_grid, self.gamma * TWO_PI * self.p_grid ** (1 + power))

    def moment(self, k: int) -> float:
        """<p^k> from the tabulated density."""
        return float(self.spline(k).integrate(self.p_grid[0], self.p_grid[-1]))


def fdd_momentum_density_table(qn: QuantumNumbers, sp: SystemParams, p_grid=None,
                               tol: Tolerance = DEFAULT_TOL, tail: float = 1e-14,
                               max_extensions: int = 4) -> MomentumTable:
    """Tabulate gamma(p) = F(p)^2/(2 pi) and check its normalisation.

    Without an explicit grid the default p_max is extended by half until the
    density at the last node falls below ``tail`` times its peak.
    """
    explicit = p_grid is not None
    p_max = default_p_max(qn, sp)
    for _ in range(max_extensions + 1):
        grid = np.asarray(p_grid, dtype=float) if explicit else default_p_grid(qn, sp, p_max=p_max)
        if np.any(np.diff(grid) <= 0) or grid[0] < 0:
            raise ParameterError("p_grid must be increasing and start at p >= 0")
        F, err = hankel_values(qn, sp, grid, tol)
        gam = F * F / TWO_PI
        peak = float(np.max(gam))
        if gam[-1] <= tail * peak:
            break
        if explicit:
            raise CoverageError(
                f"gamma(p_max)/peak = {gam[-1] / peak:.3g} exceeds {tail:g}; extend the grid",
                suggested_p_max=1.5 * float(grid[-1]))
        p_max *= 1.5
    else:
        raise CoverageError("momentum density did not decay within the extended grid",
                            suggested_p_max=p_max)
    psi = np.abs(F) / math.sqrt(TWO_PI)
    norm = float(CubicSpline(grid, gam * TWO_PI * grid).integrate(grid[0], grid[-1]))
    return MomentumTable(qn, sp, grid, psi, psi * psi, abs(norm - 1.0), float(np.max(err)))


def momentum_nodes(qn: QuantumNumbers, sp: SystemParams, p_max: float,
                   tol: Tolerance = DEFAULT_TOL, probes: int = 512) -> list[float]:
    """Zeros of F on (0, p_max), located by sign changes and refined by brentq."""
    from scipy.optimize import brentq

    support = _support(qn, sp)
    grid = np.linspace(0.0, p_max, probes + 1)[1:]
    F, _ = hankel_values(qn, sp, grid, tol, support)
    # sign flips deep in the tail are rounding noise, not nodes
    big = np.abs(F) > 1e-9 * float(np.max(np.abs(F)))
    flips = (np.sign(F[:-1]) * np.sign(F[1:]) < 0) & (big[:-1] | big[1:])
    out = []
    for i in np.nonzero(flips)[0]:
        f = lambda x: float(hankel_values(qn, sp, [x], tol, support)[0][0])
        out.append(brentq(f, grid[i], grid[i + 1], xtol=1e-14 * p_max, rtol=1e-14))
    return out


def _legendre_panels(edges, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _panel_edges(p_max: float, panels: int, breaks, grade: int = 4):
    """Uniform panels plus breakpoints, with geometric refinement towards each break."""
    edges = set(np.linspace(0.0, p_max, panels + 1).tolist())
    width = p_max / panels
    for b in breaks:
        edges.add(b)
        for k in range(1, grade + 1):
            d = width * 0.5 ** k
            for e in (b - d, b + d):
                if 0 < e < p_max:
                    edges.add(e)
    return sorted(edges)


def momentum_functional(qn: QuantumNumbers, sp: SystemParams, fn, tol: Tolerance = DEFAULT_TOL,
                        p_max: float | None = None, panels: int = 48,
                        orders: tuple[int, int] = (20, 14)) -> QuadratureResult:
    """int fn(gamma(p)) 2 pi p dp by composite Gauss-Legendre on [0, p_max].

    F is evaluated directly at the quadrature nodes.  Panels break at the
    zeros of F, where functionals such as gamma log gamma are not smooth.  Two
    rule orders are run on the same panels and their difference is the error
    estimate.
    """
    if p_max is None:
        p_max = covering_p_max(qn, sp, tol=tol)
    edges = _panel_edges(p_max, panels, momentum_nodes(qn, sp, p_max, tol))
    hi_n, hi_w = _legendre_panels(edges, orders[0])
    lo_n, lo_w = _legendre_panels(edges, orders[1])
    F, err = hankel_values(qn, sp, np.concatenate([hi_n, lo_n]), tol, _support(qn, sp))
    gam = F * F / TWO_PI
    k = len(hi_n)
    v_hi = float(np.sum(hi_w * fn(gam[:k]) * TWO_PI * hi_n))
    v_lo = float(np.sum(lo_w * fn(gam[k:]) * TWO_PI * lo_n))
    if not (math.isfinite(v_hi) and math.isfinite(v_lo)):
        raise NumericError("momentum functional is not finite")
    e = abs(v_hi - v_lo)
    if e > 1e-6 * max(1.0, abs(v_hi)):
        raise ConvergenceError(f"momentum functional unsettled: {v_hi:.17g} vs {v_lo:.17g}",
                               estimate=v_hi, abs_error=e)
    return QuadratureResult(v_hi, e, len(F))


def momentum_entropic_moment(qn: QuantumNumbers, sp: SystemParams, beta: float,
                             tol: Tolerance = DEFAULT_TOL) -> QuadratureResult:
    if not beta > 0:
        raise ParameterError("beta must be positive")
    return momentum_functional(qn, sp, lambda g: np.power(g, beta), tol)


def _xlogx(g):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(g > 0, g * np.log(np.where(g > 0, g, 1.0)), 0.0)


def momentum_shannon(qn: QuantumNumbers, sp: SystemParams, tol: Tolerance = DEFAULT_TOL) -> QuadratureResult:
    res = momentum_functional(qn, sp, _xlogx, tol)
    return QuadratureResult(-res.value, res.abs_error_estimate, res.evaluations)
