"""Quadrature engine: Gauss-Laguerre rules, adaptive Gauss-Kronrod on
(0, inf), and partition-extrapolation Hankel integrals.

Integrands are evaluated on numpy arrays; a scalar-only callable is wrapped
with ``np.vectorize`` on first use.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.special as sps
from scipy.linalg import eigvalsh_tridiagonal

from .params import DEFAULT_TOL, ConvergenceError, NumericError, ParameterError, Tolerance

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
# full 15-point layout on [-1, 1]
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_GW = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GW[_i] = _w
    _GW[14 - _i] = _w
_GW[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self):
        return self.value


def _as_vectorized(f: Callable) -> Callable:
    probe = np.array([0.25, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except (TypeError, ValueError):
        pass
    return np.vectorize(f, otypes=[float])


# ---------------------------------------------------------------------------
# Gauss-Laguerre


def _laguerre_scaled(n: int, alpha: float, x: np.ndarray):
    """Return (L_n, L_{n-1}) divided by a common per-node scale, plus log scale."""
    logscale = np.zeros_like(x)
    prev = np.ones_like(x)
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
        big = np.maximum(np.abs(cur), np.abs(prev))
        resc = big > 1e100
        if np.any(resc):
            s = np.where(resc, big, 1.0)
            cur = cur / s
            prev = prev / s
            logscale += np.log(s)
    return cur, prev, logscale


def gauss_laguerre_rule(order: int, alpha: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating t^alpha e^{-t} p(t) exactly for deg p <= 2*order - 1.

    Golub-Welsch eigenvalues, polished by Newton steps on the scaled
    three-term recurrence; weights from
    w_i = Gamma(n+alpha+1) / (n! x_i L_n'(x_i)^2), assembled in log space.
    Weights of far-out nodes underflow to 0 for very high orders.
    """
    if int(order) != order or not 1 <= order <= 512:
        raise ParameterError(f"order must be an integer in [1, 512], got {order}")
    if not alpha > -1:
        raise ParameterError(f"alpha must be > -1, got {alpha}")
    n = int(order)
    if n == 1:
        return np.array([alpha + 1.0]), np.array([math.gamma(alpha + 1.0)])
    k = np.arange(n)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt(np.arange(1, n) * (np.arange(1, n) + alpha))
    x = np.sort(eigvalsh_tridiagonal(diag, off))
    for _ in range(20):
        ln, lnm1, _ = _laguerre_scaled(n, alpha, x)
        dln = (n * ln - (n + alpha) * lnm1) / x
        step = ln / dln
        x = x - step
        # recurrence roundoff floors the step near n * eps
        if np.all(np.abs(step) <= 1e-13 * x):
            break
    else:
        if not np.all(np.abs(step) <= 1e-10 * x):
            raise NumericError("Gauss-Laguerre node refinement did not converge")
    ln, lnm1, logscale = _laguerre_scaled(n, alpha, x)
    dln = (n * ln - (n + alpha) * lnm1) / x
    logw = (math.lgamma(n + alpha + 1) - math.lgamma(n + 1) - np.log(x)
            - 2.0 * (np.log(np.abs(dln)) + logscale))
    if np.any(np.diff(x) <= 0):
        raise NumericError("Gauss-Laguerre nodes are not strictly increasing")
    return x, np.exp(logw)


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod


def _gk15_batch(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    if not np.all(np.isfinite(vals)):
        raise NumericError("integrand returned a non-finite value")
    k = half * (vals @ _KW)
    g = half * (vals @ _GW)
    return k, np.abs(k - g)


def adaptive_integrate(f: Callable, a: float, b: float, tol: Tolerance = DEFAULT_TOL,
                       breakpoints: Sequence[float] = ()) -> QuadratureResult:
    """Globally adaptive G7-K15 quadrature on the finite interval [a, b]."""
    f = _as_vectorized(f)
    edges = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    lo = np.array(edges[:-1], dtype=float)
    hi = np.array(edges[1:], dtype=float)
    vals, errs = _gk15_batch(f, lo, hi)
    evals = 15 * len(lo)
    heap = [(-e, float(l), float(h), float(v)) for e, l, h, v in zip(errs, lo, hi, vals)]
    heapq.heapify(heap)
    total_err = float(np.sum(errs))
    n_intervals = len(heap)
    while True:
        total = math.fsum(item[3] for item in heap)
        if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total)):
            return QuadratureResult(total, total_err, evals)
        if n_intervals >= tol.max_subdivisions:
            raise ConvergenceError(
                f"subdivision budget {tol.max_subdivisions} exhausted "
                f"(estimate {total:.17g}, error {total_err:.3g})",
                estimate=total, abs_error=total_err, evaluations=evals)
        # bisect the worst interval plus up to 15 others of comparable error
        keep = [heapq.heappop(heap)]
        while heap and len(keep) < 16 and heap[0][0] <= 0.01 * keep[0][0]:
            keep.append(heapq.heappop(heap))
        los, his = [], []
        for _, l, h, _ in keep:
            m = 0.5 * (l + h)
            if not l < m < h:
                raise ConvergenceError("interval cannot be bisected further",
                                       estimate=total, abs_error=total_err, evaluations=evals)
            los += [l, m]
            his += [m, h]
        v, e = _gk15_batch(f, np.array(los), np.array(his))
        evals += 15 * len(los)
        for it in keep:
            total_err -= -it[0]
        for l, h, vv, ee in zip(los, his, v, e):
            heapq.heappush(heap, (-float(ee), l, h, float(vv)))
            total_err += float(ee)
        n_intervals += len(keep)
        total_err = max(total_err, 0.0)


def adaptive_semi_infinite(f: Callable, tol: Tolerance = DEFAULT_TOL,
                           breakpoints: Sequence[float] = ()) -> QuadratureResult:
    """Integral of ``f`` over (0, inf) via t = u / (1 - u) and adaptive G7-K15.

    ``breakpoints`` (in t) become forced interval edges; use them for
    integrable singularities such as log|L_n(t)| at the Laguerre zeros.
    Values at enormous t where the integrand has underflowed to 0 * inf
    are taken as 0.
    """
    f = _as_vectorized(f)

    def mapped(u):
        one_m = 1.0 - u
        t = u / one_m
        with np.errstate(all="ignore"):
            v = np.asarray(f(t), dtype=float) / (one_m * one_m)
        bad = ~np.isfinite(v)
        if np.any(bad):
            # a node can round onto a log singularity at a breakpoint; that
            # single point carries no weight
            near = np.zeros_like(bad)
            for b in bps:
                near |= np.abs(t - b) <= 1e-12 * max(b, 1.0)
            if np.any(bad & (t < 1e6) & ~near):
                raise NumericError("integrand returned a non-finite value")
            v = np.where(bad, 0.0, v)
        return v

    bps = [float(t) for t in breakpoints if t > 0]
    ubreaks = [t / (1.0 + t) for t in bps]
    return adaptive_integrate(mapped, 0.0, 1.0, tol, ubreaks)


# ---------------------------------------------------------------------------
# Hankel integrals


def _wynn_epsilon(seq: Sequence[float]) -> tuple[float, float]:
    """Wynn epsilon extrapolation; returns (estimate, change of last two estimates)."""
    s = list(seq)
    if len(s) < 3:
        return s[-1], abs(s[-1] - s[-2]) if len(s) > 1 else math.inf
    prev = [0.0] * (len(s) + 1)
    cur = s[:]
    best = [s[-1]]
    for k in range(1, len(s)):
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0:
                nxt.append(math.inf)
            else:
                nxt.append(prev[i + 1] + 1.0 / d)
        prev, cur = cur, nxt
        if k % 2 == 0 and cur and math.isfinite(cur[-1]):
            best.append(cur[-1])
        if len(cur) < 2:
            break
    est = best[-1]
    change = abs(best[-1] - best[-2]) if len(best) > 1 else abs(s[-1] - s[-2])
    return est, change


def radial_support(g: Callable, scale: float = 1.0, rel: float = 1e-18) -> float:
    """Radius beyond which |g(r) r| stays below ``rel`` times its maximum.

    ``g`` must decay at least like a Gaussian; ``scale`` is a typical
    width used to start the scan.
    """
    g = _as_vectorized(g)
    r = np.linspace(0.0, 40.0 * scale, 4001)
    for _ in range(8):
        v = np.abs(np.asarray(g(r), dtype=float) * r)
        peak = float(np.max(v))
        if peak == 0:
            return float(r[-1])
        above = np.nonzero(v > rel * peak)[0]
        last = int(above[-1])
        if last < len(r) - 50:
            return float(r[min(last + 1, len(r) - 1)])
        r = np.linspace(0.0, 2.0 * r[-1], 4001)
    raise ConvergenceError("radial function does not decay fast enough")


def hankel_transform(g: Callable, order_m: int, p, tol: Tolerance = DEFAULT_TOL,
                     r_max: float | None = None, scale: float = 1.0,
                     kernel: Callable = sps.jv):
    """Vectorised int_0^inf g(r) J_m(r p) r dr for an array of p > 0.

    Each Bessel half-period [j_{m,k}/p, j_{m,k+1}/p] is cut into panels of
    width at most ``scale / 4`` and integrated with G7-K15.  The sum runs to
    the support radius of ``g``; the Wynn-epsilon limit of the partial sums
    over half-periods is folded into the error estimate, so an unsettled
    sequence shows up as a large error.  Returns (values, error estimates,
    integrand evaluations).
    """
    g = _as_vectorized(g)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(p <= 0):
        raise ParameterError("hankel_transform needs p > 0; use oscillatory_hankel_integrate for p = 0")
    if r_max is None:
        r_max = radial_support(g, scale)
    hmax = scale / 4.0
    n_zeros = int(math.ceil(float(np.max(p)) * r_max / math.pi)) + 4
    zeros = sps.jn_zeros(order_m, n_zeros)
    values = np.empty_like(p)
    errors = np.empty_like(p)
    evaluations = 0
    # assemble panels for every p, then evaluate in one batch per chunk
    chunk = 64
    for c0 in range(0, len(p), chunk):
        pc = p[c0:c0 + chunk]
        lo_all, hi_all, owner, group = [], [], [], []
        for j, pj in enumerate(pc):
            cuts = zeros / pj
            cuts = cuts[cuts < r_max]
            edges = np.concatenate([[0.0], cuts, [r_max]])
            for gi in range(len(edges) - 1):
                a, b = edges[gi], edges[gi + 1]
                if b <= a:
                    continue
                k = max(1, int(math.ceil((b - a) / hmax)))
                sub = np.linspace(a, b, k + 1)
                lo_all.append(sub[:-1])
                hi_all.append(sub[1:])
                owner.append(np.full(k, j))
                group.append(np.full(k, gi))
        lo = np.concatenate(lo_all)
        hi = np.concatenate(hi_all)
        owner = np.concatenate(owner)
        group = np.concatenate(group)
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        r = mid[:, None] + half[:, None] * _NODES[None, :]
        pr = pc[owner][:, None] * r
        vals = np.asarray(g(r.ravel()), dtype=float).reshape(r.shape) * r * kernel(order_m, pr)
        if not np.all(np.isfinite(vals)):
            raise NumericError("Hankel integrand returned a non-finite value")
        evaluations += vals.size
        kint = half * (vals @ _KW)
        kerr = np.abs(kint - half * (vals @ _GW))
        for j in range(len(pc)):
            sel = owner == j
            gk = group[sel]
            terms = np.bincount(gk, weights=kint[sel])
            quad_err = float(np.sum(kerr[sel]))
            partial = np.cumsum(terms)
            # integration stops at the support radius, so the partial sum is
            # already the full integral; the epsilon-extrapolated limit of the
            # partial-sum sequence must agree with it
            tail = partial[-min(len(partial), 12):]
            if len(tail) >= 3:
                est, _ = _wynn_epsilon(tail.tolist())
                if not math.isfinite(est):
                    est = partial[-1]
            else:
                est = partial[-1]
            err = quad_err + abs(est - partial[-1])
            est = partial[-1]
            values[c0 + j] = est
            errors[c0 + j] = err
    return values, errors, evaluations


def oscillatory_hankel_integrate(g: Callable, order_m: int, p: float,
                                 tol: Tolerance = DEFAULT_TOL, scale: float = 1.0,
                                 r_max: float | None = None) -> QuadratureResult:
    """int_0^inf g(r) J_m(r p) r dr for Gaussian-decaying ``g``.

    At p = 0 the oscillatory path is bypassed: J_m(0) = delta_{m0}.
    """
    if int(order_m) != order_m or order_m < 0:
        raise ParameterError(f"order_m must be a non-negative integer, got {order_m}")
    if p < 0:
        raise ParameterError(f"p must be >= 0, got {p}")
    g = _as_vectorized(g)
    if p == 0:
        if order_m > 0:
            return QuadratureResult(0.0, 0.0, 0)
        return adaptive_semi_infinite(lambda r: g(r) * r, tol)
    vals, errs, n_eval = hankel_transform(g, order_m, [p], tol, r_max=r_max, scale=scale)
    value, err = float(vals[0]), float(errs[0])
    if err > max(tol.abs_tol, tol.rel_tol * abs(value)):
        raise ConvergenceError(
            f"Hankel integral at p={p} did not converge (estimate {value:.17g}, error {err:.3g})",
            estimate=value, abs_error=err)
    return QuadratureResult(value, err, n_eval)
