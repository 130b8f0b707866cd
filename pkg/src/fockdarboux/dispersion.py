"""Radial expectation values, <p^2>, uncertainty products and omega_cut."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from numpy.polynomial import Polynomial

from .numerics import adaptive_semi_infinite
from .params import (DEFAULT_TOL, NumericError, ParameterError, QuantumNumbers,
                     SystemParams, Tolerance)
from .spectra import effective_frequency, effective_frequency_formula
from .specfun import expint_scaled, generalized_binomial, laguerre_coefficients, log_gamma
from .states import (fdd_radial_derivative,
                     radial_breakpoints)

log = logging.getLogger(__name__)


def laguerre_moment(s: float, n: int, l: int) -> float:
    """int_0^inf t^s e^{-t} L_n^l(t)^2 dt for s > -1.

    Uses Gamma(s+1) sum_j C(s-l, n-j)^2 C(s+j, j), which is exact for
    integer and half-integer s alike.
    """
    total = 0.0
    for j in range(n + 1):
        total += generalized_binomial(s - l, n - j) ** 2 * generalized_binomial(s + j, j)
    return math.exp(log_gamma(s + 1)) * total


def r_moment_fd(qn: QuantumNumbers, sp: SystemParams, k: int) -> float:
    """<r^k> of the flat state; k = 2 gives (2n + l + 1)/omega_t."""
    sp.require_flat()
    _check_k(k)
    n, l = qn.n, qn.l
    wt = sp.omega_t
    lead = math.exp(log_gamma(n + 1) - log_gamma(n + l + 1)) / wt ** (k / 2)
    return lead * laguerre_moment(l + k / 2, n, l)


def r_moment_fdd(qn: QuantumNumbers, sp: SystemParams, k: int) -> float:
    """<r^k> on the curved surface.

    The (1 + lam r^2) weight splits the integral into two Laguerre moments,
    of orders l + k/2 and l + k/2 + 1.
    """
    _check_k(k)
    n, l = qn.n, qn.l
    om = effective_frequency(qn, sp)
    a = sp.lam / om
    ratio = math.exp(log_gamma(n + 1) - log_gamma(n + l + 1))
    body = laguerre_moment(l + k / 2, n, l) + a * laguerre_moment(l + k / 2 + 1, n, l)
    return ratio * body / (om ** (k / 2) * (1.0 + qn.c * a))


def r2_fdd(qn: QuantumNumbers, sp: SystemParams) -> float:
    """k = 2 case written out: (c + a K)/(Omega + c lam), a = lam/Omega."""
    n, l, c = qn.n, qn.l, qn.c
    om = effective_frequency(qn, sp)
    K = l * l + l * (6 * n + 3) + 6 * n * (n + 1) + 2
    return (c + sp.lam / om * K) / (om + c * sp.lam)


def _check_k(k):
    if int(k) != k or k <= 0 or k % 2:
        raise ParameterError(f"k must be an even positive integer, got {k}")


# ---------------------------------------------------------------------------
# momentum second moment


def p2_angular(qn: QuantumNumbers, sp: SystemParams) -> float:
    """l^2 int R^2/r dr = l Omega (l lam + Omega)/(c lam + Omega)."""
    l = qn.l
    om = effective_frequency(qn, sp)
    return l * om * (l * sp.lam + om) / (qn.c * sp.lam + om)


def p2_radial_quadrature(qn: QuantumNumbers, sp: SystemParams, tol: Tolerance = DEFAULT_TOL):
    om = effective_frequency(qn, sp)
    bp = radial_breakpoints(qn, om)

    def f(r):
        d = fdd_radial_derivative(qn, sp, r)
        return d * d * r

    return adaptive_semi_infinite(f, tol, breakpoints=bp)


def _radial_polynomial(qn: QuantumNumbers, a: float) -> Polynomial:
    """M(u) with <p_r^2> = N^2/(2 Omega^l) int e^{-u} M(u)/(1 + a u) du."""
    n, l = qn.n, qn.l
    g = Polynomial(laguerre_coefficients(n, l))
    dg = g.deriv()
    u = Polynomial([0.0, 1.0])
    mu = 1.0 + a * u
    B = (l - u) * mu * g + a * u * g + 2.0 * u * mu * dg
    B2 = B * B
    if l == 0:
        # B(0) = 0, so B^2/u is a polynomial
        coef = B2.coef
        return Polynomial(coef[1:] if len(coef) > 1 else [0.0])
    return B2 * u ** (l - 1)


def p2_radial_closed(qn: QuantumNumbers, sp: SystemParams) -> float:
    """Exact <p_r^2> via scaled exponential integrals.

    Each monomial u^p/(1 + a u) integrates against e^{-u} to
    p! e^z E_{p+1}(z)/a with z = 1/a = Omega/lam.
    """
    om = effective_frequency(qn, sp)
    n, l, lam = qn.n, qn.l, sp.lam
    a = lam / om
    M = _radial_polynomial(qn, a).coef
    total = 0.0
    if a == 0:
        for p, cp in enumerate(M):
            total += cp * math.factorial(p)
    else:
        z = 1.0 / a
        for p, cp in enumerate(M):
            total += cp * math.factorial(p) * expint_scaled(p + 1, z) * z
    # N^2/(2 Omega^l) = Omega n!/(Gamma(n+l+1)(1 + c a))
    pref = om * math.exp(log_gamma(n + 1) - log_gamma(n + l + 1)) / (1.0 + qn.c * a)
    return pref * total


def p2_ground_state(sp: SystemParams) -> float:
    """Total <p^2> of n = m = 0: Omega - Omega^2 e^{z} E_1(z)/(lam + Omega), z = Omega/lam."""
    om = effective_frequency(QuantumNumbers(0, 0), sp)
    if sp.lam == 0:
        return om
    z = om / sp.lam
    return om - om * om * expint_scaled(1, z) / (sp.lam + om)


@dataclass
class P2Result:
    total: float
    radial: float
    angular: float
    radial_closed: float
    closed_residual: float
    abs_error_estimate: float
    diagnostics: list = field(default_factory=list)


def p2_fdd(qn: QuantumNumbers, sp: SystemParams, tol: Tolerance = DEFAULT_TOL) -> P2Result:
    """<p^2> = <p_r^2> + <p_phi^2>.

    The radial part is taken from direct quadrature of int (dR/dr)^2 r dr;
    the closed form is evaluated alongside and its residual recorded.
    """
    q = p2_radial_quadrature(qn, sp, tol)
    ang = p2_angular(qn, sp)
    closed = p2_radial_closed(qn, sp)
    resid = abs(closed - q.value)
    diags = []
    if resid > 1e-4 * max(1.0, abs(q.value)):
        msg = f"closed-form <p_r^2> differs from quadrature by {resid:.3g} for {qn}, {sp}"
        log.warning(msg)
        diags.append(msg)
    return P2Result(q.value + ang, q.value, ang, closed, resid, q.abs_error_estimate, diags)


def p2_fd(qn: QuantumNumbers, sp: SystemParams) -> float:
    sp.require_flat()
    return sp.omega_t * qn.c


# ---------------------------------------------------------------------------
# uncertainty products


@dataclass(frozen=True)
class DispersionReport:
    qn: QuantumNumbers
    sp: SystemParams
    r2: float
    p2: float
    p2_radial: float
    p2_angular: float
    product: float
    bound: float


def uncertainty_product(qn: QuantumNumbers, sp: SystemParams, tol: Tolerance = DEFAULT_TOL) -> DispersionReport:
    bound = float((qn.l + 1) ** 2)
    if sp.lam == 0:
        r2 = qn.c / sp.omega_t
        ang = p2_angular(qn, sp)
        p2 = sp.omega_t * qn.c
        return DispersionReport(qn, sp, r2, p2, p2 - ang, ang, float(qn.c * qn.c), bound)
    r2 = r2_fdd(qn, sp)
    res = p2_fdd(qn, sp, tol)
    product = r2 * res.total
    if product < bound - 1e-9:
        raise NumericError(f"uncertainty product {product} below bound {bound} for {qn}, {sp}")
    return DispersionReport(qn, sp, r2, res.total, res.radial, res.angular, product, bound)


# ---------------------------------------------------------------------------
# curvature-cancelling Larmor frequency


def _omega_for_r2(qn: QuantumNumbers, lam: float, omega: float) -> float:
    """Effective frequency at which the curved <r^2> equals c/omega.

    Positive root of c Omega^2 + c (c lam - omega) Omega - lam K omega = 0.
    """
    n, l, c = qn.n, qn.l, qn.c
    K = l * l + l * (6 * n + 3) + 6 * n * (n + 1) + 2
    b = c * lam - omega
    disc = b * b + 4.0 * lam * K * omega / c
    root = math.sqrt(disc)
    # avoid cancellation when b > 0
    if b <= 0:
        return 0.5 * (root - b)
    return 2.0 * lam * K * omega / c / (root + b)


def omega_cut_closed(qn: QuantumNumbers, lam: float, omega: float) -> float:
    """omega_c = sqrt(lam^2 m^2 + c lam g + g^2/4 - omega^2) - lam m with g = 2 Omega*."""
    if not lam > 0 or not omega > 0:
        raise ParameterError("omega_cut needs lam > 0 and omega > 0")
    g = 2.0 * _omega_for_r2(qn, lam, omega)
    m = qn.m
    rad = lam * lam * m * m + qn.c * lam * g + g * g / 4.0 - omega * omega
    if rad < 0:
        raise NumericError(f"no real omega_cut for {qn}, lam={lam}, omega={omega}")
    return math.sqrt(rad) - lam * m


def omega_cut(qn: QuantumNumbers, lam: float, omega: float) -> float:
    """Larmor frequency making the curved <r^2> equal the flat value c/omega.

    Closed form followed by a Newton polish on the defining residual.
    """
    wc = omega_cut_closed(qn, lam, omega)
    target = qn.c / omega

    def resid(x):
        return r2_fdd(qn, SystemParams(omega, x, lam)) - target

    f0 = resid(wc)
    h = 1e-6 * max(1.0, abs(wc))
    df = (resid(wc + h) - resid(wc - h)) / (2 * h)
    if df != 0 and math.isfinite(df):
        cand = wc - f0 / df
        if abs(resid(cand)) < abs(f0):
            wc = cand
    return wc


def omega_cut_p2_difference(qn: QuantumNumbers, lam: float, omega: float,
                            tol: Tolerance = DEFAULT_TOL) -> float:
    """<p^2> at omega_cut minus the flat oscillator value omega c."""
    wc = omega_cut(qn, lam, omega)
    return p2_fdd(qn, SystemParams(omega, wc, lam), tol).total - omega * qn.c


def inverted_field_check(qn: QuantumNumbers, sp: SystemParams) -> float:
    """|Omega(-omega_c) - Omega(omega_c - 2 lam m)|.

    The identity belongs to the spectral formula, so it is checked on the raw
    value even where Omega <= 0 and the state is not normalisable.
    """
    a = effective_frequency_formula(qn, sp.replace(omega_c=-sp.omega_c))
    b = effective_frequency_formula(qn, sp.replace(omega_c=sp.omega_c - 2 * sp.lam * qn.m))
    return abs(a - b)
