"""Position-space wavefunctions and densities of the FD and FDD systems.

Radial functions are normalised with the curved measure,
int R(r)^2 r dr = 1 on the flat plane for the FDD state, where the FDD radial
function carries the sqrt(1 + lam r^2) factor of the metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import NonNormalizableError, ParameterError, QuantumNumbers, SystemParams
from .spectra import effective_frequency
from .specfun import generalized_laguerre, laguerre_roots, log_gamma

POSITION = "position"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class DensityProfile:
    space: str
    system: str
    qn: QuantumNumbers
    sp: SystemParams
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.space not in (POSITION, MOMENTUM):
            raise ParameterError(f"unknown space {self.space!r}")
        if self.system not in ("FD", "FDD"):
            raise ParameterError(f"unknown system {self.system!r}")
        if len(self.grid) != len(self.values):
            raise ParameterError("grid and values differ in length")
        if np.any(np.diff(self.grid) <= 0) or np.any(self.grid < 0):
            raise ParameterError("grid must be strictly increasing and >= 0")
        if np.any(self.values < 0):
            raise ParameterError("density values must be >= 0")

    def norm(self) -> float:
        """Trapezoid estimate of int value * 2 pi x dx over the grid."""
        return float(np.trapezoid(self.values * 2 * np.pi * self.grid, self.grid))


def _omega_or_raise(qn, sp):
    sp.require_bound()
    return effective_frequency(qn, sp)


def log_fd_normalization(qn: QuantumNumbers, sp: SystemParams) -> float:
    sp.require_flat()
    wt = sp.omega_t
    if not wt > 0:
        raise NonNormalizableError("omega_t = 0 has no bound state")
    n, l = qn.n, qn.l
    return 0.5 * (math.log(2.0) + log_gamma(n + 1) - log_gamma(n + l + 1) + (l + 1) * math.log(wt))


def fd_normalization(qn: QuantumNumbers, sp: SystemParams) -> float:
    return math.exp(log_fd_normalization(qn, sp))


def fd_momentum_normalization(qn: QuantumNumbers, sp: SystemParams) -> float:
    return fd_normalization(qn, sp) / sp.omega_t ** (qn.l + 1)


def log_fdd_normalization(qn: QuantumNumbers, sp: SystemParams) -> float:
    om = _omega_or_raise(qn, sp)
    n, l = qn.n, qn.l
    return 0.5 * (math.log(2.0) + log_gamma(n + 1) - log_gamma(n + l + 1) + (l + 1) * math.log(om)
                  - math.log1p(qn.c * sp.lam / om))


def fdd_normalization(qn: QuantumNumbers, sp: SystemParams) -> float:
    return math.exp(log_fdd_normalization(qn, sp))


def _radial(qn, om, lam, log_norm, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ParameterError("r must be >= 0")
    u = om * r * r
    lag = generalized_laguerre(qn.n, qn.l, u)
    with np.errstate(divide="ignore"):
        lr = np.where(r > 0, np.log(np.where(r > 0, r, 1.0)), -np.inf)
    logmag = log_norm + 0.5 * np.log1p(lam * r * r) - 0.5 * u
    if qn.l > 0:
        logmag = logmag + qn.l * lr
    out = np.exp(logmag) * lag
    if qn.l == 0:
        out = np.where(r == 0, math.exp(log_norm) * lag, out)
    return out


def fd_radial_wavefunction(qn: QuantumNumbers, sp: SystemParams, r):
    out = _radial(qn, sp.omega_t, 0.0, log_fd_normalization(qn, sp), r)
    return float(out) if np.ndim(out) == 0 else out


def fdd_radial_wavefunction(qn: QuantumNumbers, sp: SystemParams, r):
    """N sqrt(1 + lam r^2) r^l exp(-Omega r^2/2) L_n^l(Omega r^2)."""
    om = _omega_or_raise(qn, sp)
    out = _radial(qn, om, sp.lam, log_fdd_normalization(qn, sp), r)
    return float(out) if np.ndim(out) == 0 else out


def fdd_radial_derivative(qn: QuantumNumbers, sp: SystemParams, r):
    """dR/dr of the FDD radial function, evaluated analytically."""
    om = _omega_or_raise(qn, sp)
    lam, n, l = sp.lam, qn.n, qn.l
    r = np.asarray(r, dtype=float)
    u = om * r * r
    g = generalized_laguerre(n, l, u)
    dg = -generalized_laguerre(n - 1, l + 1, u) if n > 0 else np.zeros_like(u)
    mu = 1.0 + lam * r * r
    norm = math.exp(log_fdd_normalization(qn, sp))
    # d/dr [sqrt(mu) r^l e^{-u/2} g] = sqrt(mu) r^{l-1} e^{-u/2} *
    #   [ (l - u) g + lam r^2 g / mu + 2 u g' ]
    bracket = (l - u) * g + lam * r * r * g / mu + 2.0 * u * dg
    with np.errstate(divide="ignore", invalid="ignore"):
        rl1 = np.where(r > 0, np.power(np.where(r > 0, r, 1.0), l - 1), 0.0 if l != 1 else 1.0)
    if l == 0:
        # bracket/r is finite at r = 0 since bracket ~ r^2 there
        return norm * np.sqrt(mu) * np.exp(-u / 2) * np.where(
            r > 0, bracket / np.where(r > 0, r, 1.0), 0.0)
    return norm * np.sqrt(mu) * np.exp(-u / 2) * rl1 * bracket


def _density(qn, om, lam, log_norm, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ParameterError("r must be >= 0")
    u = om * r * r
    lag = generalized_laguerre(qn.n, qn.l, u)
    with np.errstate(divide="ignore"):
        log_l2 = np.log(lag * lag)
        lr = np.log(r)
    logd = 2 * log_norm - math.log(2 * math.pi) + np.log1p(lam * r * r) - u + log_l2
    if qn.l > 0:
        logd = logd + 2 * qn.l * lr
    out = np.exp(logd)
    return float(out) if np.ndim(out) == 0 else out


def fd_position_density(qn: QuantumNumbers, sp: SystemParams, r):
    return _density(qn, sp.omega_t, 0.0, log_fd_normalization(qn, sp), r)


def fdd_position_density(qn: QuantumNumbers, sp: SystemParams, r):
    """rho(r) = N^2/(2 pi) (1 + lam r^2) r^{2l} e^{-Omega r^2} L_n^l(Omega r^2)^2."""
    om = _omega_or_raise(qn, sp)
    return _density(qn, om, sp.lam, log_fdd_normalization(qn, sp), r)


def fd_momentum_density(qn: QuantumNumbers, sp: SystemParams, p):
    """gamma(p): the position density with omega_t replaced by 1/omega_t."""
    sp.require_flat()
    if not sp.omega_t > 0:
        raise NonNormalizableError("omega_t = 0 has no bound state")
    dual = SystemParams(omega=1.0 / sp.omega_t)
    return _density(qn, dual.omega_t, 0.0, log_fd_normalization(qn, dual), p)


def fd_momentum_wavefunction(qn: QuantumNumbers, sp: SystemParams, p):
    """Magnitude of the radial Hankel transform int R J_m(rp) r dr of the FD state."""
    sp.require_flat()
    dual = SystemParams(omega=1.0 / sp.omega_t)
    out = np.abs(_radial(qn, dual.omega_t, 0.0, log_fd_normalization(qn, dual), p))
    return float(out) if np.ndim(out) == 0 else out


def density_grid(qn: QuantumNumbers, om: float, points: int = 2048, r_min_factor: float = 1e-4):
    """Geometric grid from 1e-4/sqrt(Omega) to 4 sqrt(2n + l + 10)/sqrt(Omega)."""
    a = r_min_factor / math.sqrt(om)
    b = 4.0 * math.sqrt(2 * qn.n + qn.l + 10) / math.sqrt(om)
    return np.geomspace(a, b, points)


def fdd_density_profile(qn: QuantumNumbers, sp: SystemParams, points: int = 2048) -> DensityProfile:
    om = _omega_or_raise(qn, sp)
    grid = density_grid(qn, om, points)
    system = "FD" if sp.lam == 0 else "FDD"
    return DensityProfile(POSITION, system, qn, sp, grid, np.asarray(fdd_position_density(qn, sp, grid)))


def radial_breakpoints(qn: QuantumNumbers, om: float) -> list[float]:
    """Radii of the Laguerre nodes of a state with frequency om."""
    if qn.n == 0:
        return []
    return [float(math.sqrt(t / om)) for t in laguerre_roots(qn.n, qn.l)]


def radial_scale(qn: QuantumNumbers, om: float) -> float:
    return math.sqrt(qn.c / om)
