"""Quick oracle-equivalence suite behind ``fockdarboux validate``.

Each check compares a closed form with an independent route (quadrature,
exact arithmetic or a limiting case) on a small grid.  The full-size versions
live in the test suite.
"""

from __future__ import annotations

import itertools
import math
import time
from fractions import Fraction

from .params import QuantumNumbers, SystemParams


def _fd_product():
    from .dispersion import uncertainty_product

    worst = 0.0
    for n, l, wc in itertools.product(range(4), range(4), (0, 1, 5)):
        rep = uncertainty_product(QuantumNumbers(n, l), SystemParams(1, wc, 0))
        worst = max(worst, abs(rep.product - (2 * n + l + 1) ** 2))
    return worst <= 1e-10, f"max |product - c^2| = {worst:.2e}"


def _fd_shannon():
    from .entropy import MOMENTUM, shannon_fd

    worst = 0.0
    for wc in (0, 1, 5):
        sp = SystemParams(1, wc, 0)
        qn = QuantumNumbers(0, 0)
        s = shannon_fd(qn, sp) + shannon_fd(qn, sp, MOMENTUM)
        worst = max(worst, abs(s - 2 * (1 + math.log(math.pi))))
    return worst <= 1e-8, f"max |S_rho + S_gamma - 2(1 + log pi)| = {worst:.2e}"


def _entropic_moments():
    from .entropy import entropic_moment_fdd_closed, entropic_moment_fdd_quadrature

    worst = 0.0
    for n, l, a, lam, wc in itertools.product((0, 2, 3), (0, 2), (2, 3), (0, 1), (0, 2)):
        qn, sp = QuantumNumbers(n, l), SystemParams(1, wc, lam)
        c = entropic_moment_fdd_closed(qn, sp, a)
        q = entropic_moment_fdd_quadrature(qn, sp, a)
        worst = max(worst, abs(c - q) / q)
    return worst <= 1e-8, f"max relative closed - quadrature = {worst:.2e}"


def _flat_limit():
    from .dispersion import p2_fdd, r_moment_fd, r_moment_fdd
    from .entropy import entropic_moment_fdd_closed
    from .spectra import effective_frequency, fd_energy, fdd_energy

    worst = 0.0
    for n, l, wc in itertools.product(range(3), range(3), (0, 1)):
        qn = QuantumNumbers(n, l)
        flat, curved = SystemParams(1, wc, 0), SystemParams(1, wc, 1e-10)
        pairs = [(fd_energy(qn, flat), fdd_energy(qn, curved)),
                 (flat.omega_t, effective_frequency(qn, curved)),
                 (r_moment_fd(qn, flat, 4), r_moment_fdd(qn, curved, 4)),
                 (flat.omega_t * qn.c, p2_fdd(qn, curved).total),
                 (entropic_moment_fdd_closed(qn, flat, 2), entropic_moment_fdd_closed(qn, curved, 2))]
        worst = max(worst, max(abs(a - b) / max(1.0, abs(a)) for a, b in pairs))
    return worst <= 1e-6, f"max deviation at lam = 1e-10: {worst:.2e}"


def _momentum_norm():
    from .dispersion import p2_fdd
    from .momentum import fdd_momentum_density_table

    qn, sp = QuantumNumbers(1, 1), SystemParams(1, 2, 1)
    tab = fdd_momentum_density_table(qn, sp)
    p2 = p2_fdd(qn, sp).total
    rel = abs(tab.moment(2) - p2) / p2
    return tab.norm_residual <= 1e-6 and rel <= 1e-5, \
        f"n=1 m=1 lam=1 omega_c=2: norm residual {tab.norm_residual:.2e}, <p^2> rel {rel:.2e}"


def _xi_saturation():
    from .entropy import uncertainty_function_renyi

    worst = max(abs(uncertainty_function_renyi(QuantumNumbers(0, 0), SystemParams(1, wc, 0), 2 / 3))
                for wc in (0, 1, 5))
    return worst <= 1e-6, f"FD ground-state |xi_R| = {worst:.2e}"


def _degeneracy():
    from .spectra import (degeneracy_nu_fdd, fd_crossings, fdd_dimensionless_energy,
                          states_up_to)

    states = states_up_to(3, 4)
    ok = True
    for nu, a, b in fd_crossings(states, {Fraction(1, 5), Fraction(1, 3), Fraction(1, 2),
                                          Fraction(3, 5), Fraction(1)}):
        ok &= (a.c - a.m * nu) == (b.c - b.m * nu)
    worst = 0.0
    for a, b in itertools.combinations(states, 2):
        if a.m == b.m:
            continue
        nu = degeneracy_nu_fdd(a, b, 0.02)
        if nu is not None:
            worst = max(worst, abs(fdd_dimensionless_energy(a, 0.02, nu) - fdd_dimensionless_energy(b, 0.02, nu)))
    return ok and worst <= 1e-12, f"FD exact: {ok}; FDD substitution residual {worst:.2e}"


def _omega_cut():
    from .dispersion import omega_cut, r2_fdd

    worst = 0.0
    for n, l, lam in itertools.product(range(4), range(4), (0.1, 0.5, 1)):
        qn = QuantumNumbers(n, l)
        wc = omega_cut(qn, lam, 1.0)
        worst = max(worst, abs(r2_fdd(qn, SystemParams(1, wc, lam)) - qn.c))
    return worst <= 1e-9, f"max <r^2> residual at omega_cut = {worst:.2e}"


def _field_inversion():
    from .dispersion import inverted_field_check

    worst = max(inverted_field_check(QuantumNumbers(0, l), SystemParams(1, wc, lam))
                for l, lam, wc in itertools.product(range(5), (0, 0.1, 1), (0.5, 2)))
    return worst <= 1e-12, f"max residual {worst:.2e}"


def _geometry():
    from .geometry import SurfaceParams, embedding_height, embedding_slope, scalar_curvature

    ok = all(scalar_curvature(0.0, SurfaceParams(lam)) == -4 * lam for lam in (0.01, 0.1, 1))
    sp = SurfaceParams(0.1)
    r = 0.1
    small = abs(embedding_height(r, sp) / r ** 2 / math.sqrt(0.05) - 1)
    r = math.sqrt(1e4 / 0.1)
    large = abs(embedding_slope(r, sp) / (2 * r) / (math.sqrt(0.3) / 2) - 1)
    return ok and small <= 1e-3 and large <= 1e-3, \
        f"R(0) exact: {ok}; small-r rel {small:.2e}; large-r rel {large:.2e}"


CHECKS = [
    ("fd-uncertainty-product", _fd_product),
    ("fd-shannon-sum", _fd_shannon),
    ("entropic-moment-closed-vs-quadrature", _entropic_moments),
    ("flat-limit-reductions", _flat_limit),
    ("momentum-normalisation", _momentum_norm),
    ("entropic-uncertainty-saturation", _xi_saturation),
    ("degeneracy", _degeneracy),
    ("omega-cut", _omega_cut),
    ("field-inversion", _field_inversion),
    ("geometry", _geometry),
]


def run_validation(out=print) -> int:
    failed = 0
    for name, fn in CHECKS:
        t = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not an aborted run
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        out(f"{'PASS' if ok else 'FAIL'}  {name:<40s} {time.perf_counter() - t:7.2f}s  {detail}")
    out(f"{len(CHECKS) - failed}/{len(CHECKS)} checks passed")
    return 1 if failed else 0
