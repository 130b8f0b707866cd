"""Energy levels, effective frequencies and degeneracy analysis.

Flat Fock-Darwin (FD) levels are E = omega_t c - m omega_c with c = 2n + |m| + 1.
On the Darboux III surface (FDD) the curvature parameter lam bends the spectrum
and makes the wavefunction frequency state dependent,
Omega = sqrt(omega_t^2 - 2 lam E) = E/c + m omega_c/c.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .params import (NonNormalizableError, NumericError, ParameterError,
                     QuantumNumbers, SystemParams)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DerivedFrequencies:
    omega_t: float
    Omega: float
    nu: float
    sigma: float
    nu_lambda: float


def fd_energy(qn: QuantumNumbers, sp: SystemParams) -> float:
    sp.require_flat()
    return sp.omega_t * qn.c - qn.m * sp.omega_c


def _omega_raw(qn: QuantumNumbers, sp: SystemParams) -> float:
    # Omega = -lam c + sqrt(lam^2 c^2 + 2 lam m wc + wt^2), rationalised so that
    # lam c >> wt does not cancel
    c, m, lam = qn.c, qn.m, sp.lam
    wt = sp.omega_t
    num = wt * wt + 2 * lam * m * sp.omega_c
    rad = lam * lam * c * c + num
    if rad < 0:
        raise NumericError(f"negative radicand {rad} in the energy of {qn}")
    return num / (lam * c + math.sqrt(rad))


def fdd_energy(qn: QuantumNumbers, sp: SystemParams) -> float:
    """Bound-state energy on the curved surface, c Omega - m omega_c; equals fd_energy at lam = 0."""
    if sp.lam == 0:
        return sp.omega_t * qn.c - qn.m * sp.omega_c
    return qn.c * _omega_raw(qn, sp) - qn.m * sp.omega_c


def effective_frequency_formula(qn: QuantumNumbers, sp: SystemParams) -> float:
    """(E + m omega_c)/c without the bound-state check; may be <= 0.

    This equals sqrt(omega_t^2 - 2 lam E) but is evaluated in a form free of
    the cancellation in omega_t^2 - 2 lam E when lam is large.
    """
    return _omega_raw(qn, sp)


def effective_frequency(qn: QuantumNumbers, sp: SystemParams) -> float:
    """Omega = sqrt(omega_t^2 - 2 lam E); raises when the state is not normalisable."""
    om = effective_frequency_formula(qn, sp)
    # values at rounding level of lam c + omega_t are an unbound edge, not a state
    if not om > 1e-13 * (sp.lam * qn.c + sp.omega_t):
        raise NonNormalizableError(f"effective frequency {om} <= 0 for {qn}, {sp}")
    return om


def derived_frequencies(qn: QuantumNumbers, sp: SystemParams) -> DerivedFrequencies:
    wt = sp.omega_t
    om = effective_frequency(qn, sp)
    nu = sp.omega_c / wt if wt > 0 else math.nan
    sigma = sp.lam / wt if wt > 0 else math.nan
    return DerivedFrequencies(wt, om, nu, sigma, sp.omega_c / om)


def fdd_dimensionless_energy(qn: QuantumNumbers, sigma: float, nu: float) -> float:
    """epsilon = E/omega_t as a function of sigma = lam/omega_t and nu = omega_c/omega_t."""
    c, m = qn.c, qn.m
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    b = sigma * c * c + nu * m
    # b^2 + c^2 - nu^2 m^2 = c^2 (sigma^2 c^2 + 2 sigma nu m + 1)
    s = c * math.sqrt(sigma * sigma * c * c + 2 * sigma * nu * m + 1)
    if b <= 0:
        return s - b
    # s^2 - b^2 = c^2 - nu^2 m^2 exactly; this form avoids cancellation
    return (c * c - (nu * m) ** 2) / (s + b)


def degeneracy_nu_fd(qn1: QuantumNumbers, qn2: QuantumNumbers) -> Fraction | None:
    """Rational nu at which two flat levels cross, or None outside [0, 1]."""
    if qn1.m == qn2.m:
        raise ParameterError("degeneracy in nu is undefined for equal m")
    nu = Fraction(qn1.c - qn2.c, qn1.m - qn2.m)
    if 0 <= nu <= 1:
        return nu
    log.debug("FD crossing of %s and %s at nu=%s lies outside [0, 1]", qn1, qn2, nu)
    return None


def degeneracy_nu_fdd_unclamped(qn1: QuantumNumbers, qn2: QuantumNumbers, sigma: float) -> float:
    if qn1.m == qn2.m:
        raise ParameterError("degeneracy in nu is undefined for equal m")
    c1, c2, m1, m2 = qn1.c, qn2.c, qn1.m, qn2.m
    dm = m1 - m2
    root = math.sqrt(sigma * sigma * (c2 * m1 - c1 * m2) ** 2 + dm * dm)
    return (sigma * (c1 - c2) * (c1 * m2 - c2 * m1) + abs(c1 - c2) * root) / (dm * dm)


def degeneracy_nu_fdd(qn1: QuantumNumbers, qn2: QuantumNumbers, sigma: float) -> float | None:
    """Closed-form nu at which two curved-space levels cross, None outside [0, 1].

    Crossings satisfy omega_c/Omega = (c1 - c2)/(m1 - m2), so pairs with a
    negative ratio cannot cross for nu >= 0; for them the closed form returns a
    root of the squared equation only, and None is reported instead.
    """
    nu = degeneracy_nu_fdd_unclamped(qn1, qn2, sigma)
    if (qn1.c - qn2.c) * (qn1.m - qn2.m) < 0:
        log.info("pair %s, %s has negative omega_c/Omega ratio; nu=%.17g is spurious", qn1, qn2, nu)
        return None
    if 0 <= nu <= 1:
        return nu
    log.info("crossing of %s and %s at sigma=%g gives nu=%.17g outside [0, 1]", qn1, qn2, sigma, nu)
    return None


def degeneracy_curve_epsilon(sigma: float, q_ratio: float, nu) -> float:
    """Locus eps = (1 - (nu/q)^2)/(2 sigma) holding all crossings with nu_lambda = q."""
    if not sigma > 0 or not q_ratio > 0:
        raise ParameterError("sigma and q_ratio must be positive")
    return (1.0 - (nu / q_ratio) ** 2) / (2.0 * sigma)


def nu_lambda_dimensionless(qn: QuantumNumbers, sigma: float, nu: float) -> float:
    """omega_c/Omega expressed through the dimensionless energy."""
    eps = fdd_dimensionless_energy(qn, sigma, nu)
    return nu * qn.c / (eps + nu * qn.m)


def states_up_to(nmax: int, mmax: int):
    return [QuantumNumbers(n, m) for n in range(nmax + 1) for m in range(-mmax, mmax + 1)]


def fd_crossings(states, q_ratios=None):
    """All pairs crossing at a rational nu in [0, 1], sorted by (nu, pair)."""
    out = []
    for i, a in enumerate(states):
        for b in states[i + 1:]:
            if a.m == b.m:
                continue
            nu = degeneracy_nu_fd(a, b)
            if nu is None or (q_ratios is not None and nu not in q_ratios):
                continue
            out.append((nu, a, b))
    out.sort(key=lambda t: (t[0], t[1].n, t[1].m, t[2].n, t[2].m))
    return out


def fdd_crossings(states, sigma: float):
    out = []
    for i, a in enumerate(states):
        for b in states[i + 1:]:
            if a.m == b.m:
                continue
            nu = degeneracy_nu_fdd(a, b, sigma)
            if nu is not None:
                out.append((nu, a, b, fdd_dimensionless_energy(a, sigma, nu)))
    out.sort(key=lambda t: (t[0], t[1].n, t[1].m, t[2].n, t[2].m))
    return out
