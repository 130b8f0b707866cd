"""Entropic moments and Shannon, Renyi and Tsallis entropies.

Position-space quantities have closed forms (integer alpha for the curved
system); momentum-space quantities of the curved system are numerical.  Every
closed form here has a quadrature twin used as its oracle.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .momentum import momentum_entropic_moment, momentum_shannon
from .numerics import adaptive_semi_infinite
from .params import (DEFAULT_TOL, NumericError, ParameterError, QuantumNumbers,
                     SystemParams, Tolerance)
from .spectra import effective_frequency
from .specfun import (SymmetricLauricellaSpec, laguerre_roots,
                      lauricella_fa_symmetric, log_binomial, log_gamma, generalized_laguerre)
from .states import (DensityProfile, fd_momentum_density, fdd_position_density,
                     radial_breakpoints)

log = logging.getLogger(__name__)

POSITION = "position"
MOMENTUM = "momentum"

# entropic moments of excited states can be 1e-6 or smaller, so the
# quadrature default is effectively relative
QUAD_TOL = Tolerance(abs_tol=1e-16, rel_tol=1e-12)


def _check_integer_alpha(alpha):
    if int(alpha) != alpha or alpha < 2:
        raise ParameterError(f"closed form needs integer alpha >= 2, got {alpha}")
    return int(alpha)


def _check_alpha(alpha):
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")


# ---------------------------------------------------------------------------
# closed-form entropic moments


def _log_lauricella_term(l, n, alpha, k):
    """log of Gamma(l alpha + k + 1) F_A^{2 alpha}(l alpha + k + 1; -n; l + 1; 1/alpha)."""
    a = l * alpha + k + 1
    fa = lauricella_fa_symmetric(SymmetricLauricellaSpec(a, n, l + 1, Fraction(1, alpha), 2 * alpha))
    if not fa > 0:
        raise NumericError(f"Lauricella factor {fa} is not positive")
    return log_gamma(a) + math.log(fa)


def log_eta(qn: QuantumNumbers, a: float, alpha: int) -> float:
    """log of sum_k C(alpha,k) (a/alpha)^k Gamma(l alpha+k+1) F_A(...)/alpha^{l alpha+1}, a = lam/Omega."""
    n, l = qn.n, qn.l
    logs = []
    for k in range(alpha + 1):
        if k > 0 and a == 0:
            break
        t = log_binomial(alpha, k) + _log_lauricella_term(l, n, alpha, k)
        if k:
            t += k * math.log(a / alpha)
        logs.append(t)
    top = max(logs)
    return top + math.log(math.fsum(math.exp(t - top) for t in logs)) - (l * alpha + 1) * math.log(alpha)


def log_entropic_moment_fdd_closed(qn: QuantumNumbers, sp: SystemParams, alpha: int) -> float:
    alpha = _check_integer_alpha(alpha)
    n, l, c = qn.n, qn.l, qn.c
    om = effective_frequency(qn, sp)
    a = sp.lam / om
    ratio = log_gamma(n + 1) - log_gamma(n + l + 1) - math.log1p(c * a)
    return ((1 - alpha) * math.log(math.pi / om) + alpha * ratio
            + 2 * alpha * log_binomial(n + l, n) + log_eta(qn, a, alpha))


def entropic_moment_fdd_closed(qn: QuantumNumbers, sp: SystemParams, alpha: int) -> float:
    """W = int rho^alpha over the plane for the curved system, integer alpha >= 2."""
    return math.exp(log_entropic_moment_fdd_closed(qn, sp, alpha))


def entropic_moment_fd_closed(qn: QuantumNumbers, sp: SystemParams, alpha: int,
                              space: str = POSITION) -> float:
    """Flat entropic moment; the momentum one swaps omega_t for 1/omega_t."""
    sp.require_flat()
    if space == MOMENTUM:
        sp = SystemParams(omega=1.0 / sp.omega_t)
    elif space != POSITION:
        raise ParameterError(f"unknown space {space!r}")
    return entropic_moment_fdd_closed(qn, sp, alpha)


def renyi_fdd_expanded(qn: QuantumNumbers, sp: SystemParams, alpha: int) -> float:
    """Renyi entropy of the curved position density written term by term.

    log(pi/Omega) + alpha/(1-alpha) log(n!/Gamma(n+l+1) C(n+l,n)^2)
    + alpha/(1-alpha) log(1/(1 + c lam/Omega)) + log(eta)/(1-alpha)
    """
    alpha = _check_integer_alpha(alpha)
    n, l = qn.n, qn.l
    om = effective_frequency(qn, sp)
    a = sp.lam / om
    f = alpha / (1 - alpha)
    return (math.log(math.pi / om)
            + f * (log_gamma(n + 1) - log_gamma(n + l + 1) + 2 * log_binomial(n + l, n))
            - f * math.log1p(qn.c * a)
            + log_eta(qn, a, alpha) / (1 - alpha))


# ---------------------------------------------------------------------------
# quadrature


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def _profile_integral(fn, profile: DensityProfile) -> float:
    """2 pi int fn(values) x dx over a tabulated profile, via a monotone cubic."""
    from scipy.interpolate import PchipInterpolator

    vals = fn(profile.values) * 2 * np.pi * profile.grid
    return float(PchipInterpolator(profile.grid, vals).integrate(profile.grid[0], profile.grid[-1]))


def entropic_moment_quadrature(density, alpha: float, space: str = POSITION,
                               breakpoints=(), tol: Tolerance = QUAD_TOL) -> float:
    """2 pi int density(x)^alpha x dx.

    ``density`` is a callable of the radial coordinate or a DensityProfile;
    tabulated profiles are integrated through a monotone cubic interpolant.
    """
    _check_alpha(alpha)
    if space not in (POSITION, MOMENTUM):
        raise ParameterError(f"unknown space {space!r}")
    if isinstance(density, DensityProfile):
        return _profile_integral(lambda v: np.power(v, alpha), density)
    res = adaptive_semi_infinite(lambda x: np.power(density(x), alpha) * 2 * np.pi * x, tol,
                                 breakpoints=breakpoints)
    if not math.isfinite(res.value) or res.value <= 0:
        raise NumericError(f"entropic moment of order {alpha} diverges or vanishes ({res.value})")
    return res.value


def shannon_numeric(density, space: str = POSITION, breakpoints=(),
                    tol: Tolerance = DEFAULT_TOL) -> float:
    """-2 pi int density log(density) x dx with 0 log 0 = 0."""
    if space not in (POSITION, MOMENTUM):
        raise ParameterError(f"unknown space {space!r}")
    if isinstance(density, DensityProfile):
        return -_profile_integral(_xlogx, density)
    res = adaptive_semi_infinite(lambda x: _xlogx(density(x)) * 2 * np.pi * x, tol,
                                 breakpoints=breakpoints)
    return -res.value


def fdd_position_breakpoints(qn: QuantumNumbers, sp: SystemParams):
    return radial_breakpoints(qn, effective_frequency(qn, sp))


def entropic_moment_fdd_quadrature(qn: QuantumNumbers, sp: SystemParams, alpha: float,
                                   tol: Tolerance = QUAD_TOL) -> float:
    return entropic_moment_quadrature(lambda r: fdd_position_density(qn, sp, r), alpha,
                                      POSITION, fdd_position_breakpoints(qn, sp), tol)


def shannon_fdd_position_quadrature(qn: QuantumNumbers, sp: SystemParams,
                                    tol: Tolerance = DEFAULT_TOL) -> float:
    return shannon_numeric(lambda r: fdd_position_density(qn, sp, r), POSITION,
                           fdd_position_breakpoints(qn, sp), tol)


# ---------------------------------------------------------------------------
# Shannon entropy through Laguerre integrals


def _laguerre_integral(qn: QuantumNumbers, extra_power: int, weight, tol: Tolerance = DEFAULT_TOL) -> float:
    """int z^{l + extra} e^{-z} L_n^l(z)^2 weight(z) dz, split at the Laguerre zeros."""
    n, l = qn.n, qn.l
    roots = laguerre_roots(n, l).tolist()

    def f(z):
        lag = generalized_laguerre(n, l, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            base = np.exp((l + extra_power) * np.log(np.where(z > 0, z, 1.0)) - z) * lag * lag
            w = weight(z, lag)
            out = np.where(lag != 0, base * w, 0.0)
        return np.where(z > 0, out, 0.0) if l + extra_power > 0 else out

    return adaptive_semi_infinite(f, tol, breakpoints=roots).value


def shannon_j_integrals(qn: QuantumNumbers, a: float, tol: Tolerance = DEFAULT_TOL) -> dict:
    l = qn.l
    logzl = lambda z, lag: l * np.log(np.where(z > 0, z, 1.0))
    loglag = lambda z, lag: 2.0 * np.log(np.abs(np.where(lag != 0, lag, 1.0)))
    log1p = lambda z, lag: np.log1p(a * z)
    out = {}
    for name, w in (("J1", logzl), ("J2", loglag), ("J3", log1p)):
        out[name] = _laguerre_integral(qn, 0, w, tol) if (name != "J1" or l) else 0.0
        out[name + "t"] = _laguerre_integral(qn, 1, w, tol) if (name != "J1" or l) else 0.0
    return out


@dataclass
class ShannonResult:
    value: float
    closed: float
    quadrature: float
    residual: float
    diagnostics: list = field(default_factory=list)


def shannon_fdd_position_closed(qn: QuantumNumbers, sp: SystemParams, tol: Tolerance = DEFAULT_TOL) -> float:
    """Shannon entropy assembled from the six Laguerre integrals J1..J3 and their tilde twins."""
    n, l, c = qn.n, qn.l, qn.c
    om = effective_frequency(qn, sp)
    a = sp.lam / om
    J = shannon_j_integrals(qn, a, tol)
    ratio = math.exp(log_gamma(n + 1) - log_gamma(n + l + 1))
    lsum = J["J1"] + a * J["J1t"] + J["J2"] + a * J["J2t"] + J["J3"] + a * J["J3t"]
    poly = c + a * (6 * n * n + 6 * l * n + 6 * n + l * l + 3 * l + 2)
    # the angular factor |Y|^2 = 1/(2 pi) contributes + log(2 pi)
    return (-math.log(om) - math.log(2 * ratio) + math.log1p(c * a)
            - ratio / (1 + c * a) * lsum + poly / (1 + c * a) + math.log(2 * math.pi))


def shannon_fdd_position(qn: QuantumNumbers, sp: SystemParams, tol: Tolerance = DEFAULT_TOL) -> ShannonResult:
    """Closed assembly checked against direct -int rho log rho.

    If they disagree by more than 1e-7 the quadrature value is returned and
    the disagreement is recorded.
    """
    closed = shannon_fdd_position_closed(qn, sp, tol)
    quad = shannon_fdd_position_quadrature(qn, sp, tol)
    resid = abs(closed - quad)
    diags = []
    value = closed
    if resid > 1e-7:
        msg = f"Shannon closed form differs from quadrature by {resid:.3g} for {qn}, {sp}"
        log.warning(msg)
        diags.append(msg)
        value = quad
    return ShannonResult(value, closed, quad, resid, diags)


def shannon_fd(qn: QuantumNumbers, sp: SystemParams, space: str = POSITION,
               tol: Tolerance = DEFAULT_TOL) -> float:
    """Flat Shannon entropy; position and momentum differ by 2 log omega_t."""
    sp.require_flat()
    n, l, c = qn.n, qn.l, qn.c
    wt = sp.omega_t
    J = shannon_j_integrals(qn, 0.0, tol)
    ratio = math.exp(log_gamma(n + 1) - log_gamma(n + l + 1))
    scale = wt if space == POSITION else 1.0 / wt
    if space not in (POSITION, MOMENTUM):
        raise ParameterError(f"unknown space {space!r}")
    return math.log(2 * math.pi) - math.log(2 * scale * ratio) - ratio * (J["J1"] + J["J2"]) + c


# ---------------------------------------------------------------------------
# Renyi / Tsallis


def renyi_from_moment(W: float, alpha: float) -> float:
    if alpha == 1:
        raise ParameterError("alpha = 1 is the Shannon limit; use a Shannon routine")
    return math.log(W) / (1.0 - alpha)


def tsallis_from_moment(W: float, alpha: float) -> float:
    if alpha == 1:
        raise ParameterError("alpha = 1 is the Shannon limit; use a Shannon routine")
    return (W - 1.0) / (1.0 - alpha)


def position_entropic_moment(qn: QuantumNumbers, sp: SystemParams, alpha: float,
                             tol: Tolerance = QUAD_TOL) -> tuple[float, str]:
    """Closed form for integer alpha >= 2, quadrature otherwise."""
    if int(alpha) == alpha and alpha >= 2:
        return entropic_moment_fdd_closed(qn, sp, int(alpha)), "closed_form"
    return entropic_moment_fdd_quadrature(qn, sp, alpha, tol), "quadrature"


def momentum_moment(qn: QuantumNumbers, sp: SystemParams, beta: float,
                    tol: Tolerance = DEFAULT_TOL) -> tuple[float, str]:
    """Momentum entropic moment: closed form in flat space, Hankel quadrature otherwise."""
    if sp.lam == 0:
        if int(beta) == beta and beta >= 2:
            return entropic_moment_fd_closed(qn, sp, int(beta), MOMENTUM), "closed_form"
        W = entropic_moment_quadrature(lambda p: fd_momentum_density(qn, sp, p), beta, MOMENTUM,
                                       radial_breakpoints(qn, 1.0 / sp.omega_t))
        return W, "quadrature"
    return momentum_entropic_moment(qn, sp, beta, tol).value, "quadrature"


def _moment(qn, sp, alpha, space, tol):
    if space == POSITION:
        return position_entropic_moment(qn, sp, alpha)[0]
    if space == MOMENTUM:
        return momentum_moment(qn, sp, alpha, tol)[0]
    raise ParameterError(f"unknown space {space!r}")


def renyi(qn: QuantumNumbers, sp: SystemParams, alpha: float, space: str = POSITION,
          tol: Tolerance = DEFAULT_TOL) -> float:
    W = _moment(qn, sp, alpha, space, tol)
    return renyi_from_moment(W, alpha)


def tsallis(qn: QuantumNumbers, sp: SystemParams, alpha: float, space: str = POSITION,
            tol: Tolerance = DEFAULT_TOL) -> float:
    W = _moment(qn, sp, alpha, space, tol)
    return tsallis_from_moment(W, alpha)


def shannon(qn: QuantumNumbers, sp: SystemParams, space: str = POSITION,
            tol: Tolerance = DEFAULT_TOL) -> float:
    if space == POSITION:
        return shannon_fdd_position(qn, sp, tol).value
    if sp.lam == 0:
        return shannon_fd(qn, sp, MOMENTUM, tol)
    return momentum_shannon(qn, sp, tol).value


# ---------------------------------------------------------------------------
# uncertainty functions


def conjugate_alpha(alpha: float) -> float:
    """beta with 1/alpha + 1/beta = 2."""
    if not 0.5 < alpha < 1:
        raise ParameterError(f"alpha must lie in (1/2, 1), got {alpha}")
    return alpha / (2 * alpha - 1)


def renyi_bound(alpha: float) -> float:
    beta = conjugate_alpha(alpha)
    return 2 * (math.log(math.pi) + math.log(alpha) / (2 * alpha - 2) + math.log(beta) / (2 * beta - 2))


def uncertainty_function_renyi(qn: QuantumNumbers, sp: SystemParams, alpha: float,
                               tol: Tolerance = DEFAULT_TOL) -> float:
    """R_alpha[rho] + R_beta[gamma] minus its lower bound; >= 0."""
    beta = conjugate_alpha(alpha)
    Wa, _ = position_entropic_moment(qn, sp, alpha)
    Wb, _ = momentum_moment(qn, sp, beta, tol)
    return renyi_from_moment(Wa, alpha) + renyi_from_moment(Wb, beta) - renyi_bound(alpha)


def uncertainty_function_tsallis(qn: QuantumNumbers, sp: SystemParams, alpha: float,
                                 tol: Tolerance = DEFAULT_TOL) -> float:
    """(alpha/pi)^{1/2alpha} W_alpha^{1/2alpha} - (beta/pi)^{1/2beta} W_beta^{1/2beta}; >= 0."""
    beta = conjugate_alpha(alpha)
    Wa, _ = position_entropic_moment(qn, sp, alpha)
    Wb, _ = momentum_moment(qn, sp, beta, tol)
    lhs = (alpha / math.pi * Wa) ** (1 / (2 * alpha))
    rhs = (beta / math.pi * Wb) ** (1 / (2 * beta))
    return lhs - rhs


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class EntropyReport:
    system: str
    qn: QuantumNumbers
    sp: SystemParams
    alpha: float
    space: str
    entropic_moment: float
    renyi: float
    tsallis: float
    shannon: float
    method: str


def entropy_report(qn: QuantumNumbers, sp: SystemParams, alpha: float, space: str = POSITION,
                   with_shannon: bool = False, tol: Tolerance = DEFAULT_TOL) -> EntropyReport:
    _check_alpha(alpha)
    if space == POSITION:
        W, method = position_entropic_moment(qn, sp, alpha)
    elif space == MOMENTUM:
        W, method = momentum_moment(qn, sp, alpha, tol)
    else:
        raise ParameterError(f"unknown space {space!r}")
    if alpha == 1:
        R = T = math.nan
    else:
        R, T = renyi_from_moment(W, alpha), tsallis_from_moment(W, alpha)
    S = shannon(qn, sp, space, tol) if with_shannon else math.nan
    system = "FD" if sp.lam == 0 else "FDD"
    return EntropyReport(system, qn, sp, alpha, space, W, R, T, S, method)


def renyi_crossing_omega_c(qn: QuantumNumbers, lam: float, omega: float, alpha: int,
                           wc_max: float = 50.0) -> float | None:
    """Larmor frequency where the curved position Renyi entropy meets the flat oscillator one.

    Returns None when R_FDD - R_HO keeps its sign on [0, wc_max].
    """
    from scipy.optimize import brentq

    ref = renyi_from_moment(entropic_moment_fdd_closed(qn, SystemParams(omega, 0.0, 0.0), alpha), alpha)

    def diff(wc):
        W = entropic_moment_fdd_closed(qn, SystemParams(omega, wc, lam), alpha)
        return renyi_from_moment(W, alpha) - ref

    grid = np.linspace(0.0, wc_max, 201)
    vals = [diff(w) for w in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0:
            return brentq(diff, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-14)
    return None


def fd_to_ho_factor(sp: SystemParams) -> float:
    """sqrt(1 + (omega_c/omega)^2) = omega_t/omega."""
    return math.sqrt(1.0 + (sp.omega_c / sp.omega) ** 2)
