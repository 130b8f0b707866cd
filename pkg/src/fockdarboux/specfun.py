"""Special functions used by the closed-form expressions.

Everything here works in double precision, apart from an exact rational
path for the Lauricella sum.  Ratios of large gamma values
are assembled in log space; see ``log_pochhammer``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from numbers import Rational

import numpy as np

from .params import NumericError, ParameterError

EULER_GAMMA = 0.5772156649015329


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise ParameterError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def log_pochhammer(a: float, s: int) -> tuple[float, float]:
    """Return ``(sign, log|(a)_s|)`` for the rising factorial ``(a)_s``.

    Uses the gamma-function ratio when ``a`` and ``a + s`` are both positive,
    a running product of ``|a + i|`` otherwise.  ``sign`` is 0 when the
    product vanishes (``a`` a non-positive integer with ``s > -a``).
    """
    if s < 0:
        raise ParameterError("s must be non-negative")
    if s == 0:
        return 1.0, 0.0
    if a > 0:
        return 1.0, math.lgamma(a + s) - math.lgamma(a)
    sign, acc = 1.0, 0.0
    for i in range(s):
        t = a + i
        if t == 0:
            return 0.0, -math.inf
        if t < 0:
            sign = -sign
        acc += math.log(abs(t))
    return sign, acc


def pochhammer(a: float, s: int) -> float:
    sign, lg = log_pochhammer(a, s)
    return 0.0 if sign == 0 else sign * math.exp(lg)


def log_binomial(n: float, k: float) -> float:
    """log C(n, k) for real ``n >= k >= 0`` via log-gamma."""
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def generalized_binomial(a: float, k: int) -> float:
    """C(a, k) = a (a-1) ... (a-k+1) / k!, valid for any real ``a``."""
    if int(k) != k or k < 0:
        raise ParameterError(f"k must be a non-negative integer, got {k}")
    out = 1.0
    for i in range(int(k)):
        out *= (a - i) / (i + 1)
    return out


def generalized_laguerre(n: int, alpha: float, x):
    """L_n^alpha(x) by the forward three-term recurrence.

    Accepts scalars or arrays for ``x``; returns a float for scalar input.
    """
    if int(n) != n or n < 0:
        raise ParameterError(f"n must be a non-negative integer, got {n}")
    if n > 200:
        raise ParameterError(f"n={n} exceeds the supported degree 200")
    scalar = np.isscalar(x)
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        out = prev
    else:
        cur = 1.0 + alpha - x
        for k in range(1, int(n)):
            prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
        out = cur
    if not np.all(np.isfinite(out)):
        raise NumericError("Laguerre recurrence overflowed")
    return float(out) if scalar else out


def laguerre_coefficients(n: int, alpha: float) -> np.ndarray:
    """Monomial coefficients of L_n^alpha, lowest degree first.

    Coefficient i is (-1)^i C(n + alpha, n - i) / i!.
    """
    return np.array(
        [(-1) ** i * generalized_binomial(n + alpha, n - i) / math.factorial(i) for i in range(n + 1)]
    )


def laguerre_roots(n: int, alpha: float) -> np.ndarray:
    """Zeros of L_n^alpha, increasing, from the Jacobi matrix."""
    if n == 0:
        return np.empty(0)
    from scipy.linalg import eigvalsh_tridiagonal

    k = np.arange(n)
    diag = 2 * k + alpha + 1
    off = -np.sqrt(np.arange(1, n) * (np.arange(1, n) + alpha))
    return np.sort(eigvalsh_tridiagonal(diag, off))


# ---------------------------------------------------------------------------
# Bessel J_m


def _bessel_series(m: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    term = np.power(half, m) / math.factorial(m)
    total = term.copy()
    q = -half * half
    for k in range(1, 200):
        term = term * q / (k * (k + m))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _bessel_miller(m: int, x: np.ndarray) -> np.ndarray:
    # Backward recurrence normalised by J_0 + 2 sum J_2k = 1.
    xmax = float(np.max(x))
    start = int(max(m, xmax) + 20 + 4 * math.sqrt(max(m, xmax) + 1))
    start += start % 2
    jp = np.zeros_like(x)
    j = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    out = np.zeros_like(x)
    for k in range(start, 0, -1):
        jm = 2.0 * k / x * j - jp
        jp, j = j, jm
        # keep magnitudes bounded
        big = np.abs(j) > 1e250
        if np.any(big):
            s = np.where(big, 1e-250, 1.0)
            j *= s
            jp *= s
            norm *= s
            out *= s
        if k - 1 == m:
            out = j.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
    norm += j
    return out / norm


def _bessel_asymptotic01(x: np.ndarray):
    # Hankel expansion for J_0 and J_1, used only for large arguments.
    def pq(nu):
        mu = 4.0 * nu * nu
        p = np.ones_like(x)
        q = np.zeros_like(x)
        term = np.ones_like(x)
        for k in range(1, 30):
            term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
            if k % 2 == 1:
                q += term * (-1) ** ((k - 1) // 2)
            else:
                p += term * (-1) ** (k // 2)
        return p, q

    out = []
    for nu in (0, 1):
        p, q = pq(nu)
        chi = x - (0.5 * nu + 0.25) * math.pi
        out.append(np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi)))
    return out


def bessel_j(m: int, x):
    """Bessel function of the first kind J_m(x) for integer ``m >= 0``, ``x >= 0``.

    Power series below x = 12; above it, Miller backward recurrence (x up to
    1000) or the Hankel expansion for J_0, J_1 followed by forward recurrence
    (x > 1000, where x > m makes the forward direction stable).  The series
    is not used for x >= 12 at any order: its alternating terms grow like
    e^x and cancellation would cost more than the 1e-12 budget.
    """
    if int(m) != m or m < 0:
        raise ParameterError(f"m must be a non-negative integer, got {m}")
    m = int(m)
    scalar = np.isscalar(x)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("bessel_j needs x >= 0")
    out = np.zeros_like(x)
    switch = 12.0
    zero = x == 0
    out[zero] = 1.0 if m == 0 else 0.0
    small = (~zero) & (x < switch)
    if np.any(small):
        out[small] = _bessel_series(m, x[small])
    mid = (x >= switch) & (x <= 1000.0)
    if np.any(mid):
        out[mid] = _bessel_miller(m, x[mid])
    large = x > 1000.0
    if np.any(large):
        xl = x[large]
        j0, j1 = _bessel_asymptotic01(xl)
        if m == 0:
            out[large] = j0
        else:
            for k in range(1, m):
                j0, j1 = j1, 2.0 * k / xl * j1 - j0
            out[large] = j1
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# Exponential integral


def expint_scaled(n: int, z: float) -> float:
    """Return e^z E_n(z) with E_n(z) = int_1^inf e^{-zt} t^{-n} dt.

    Power series for z < 1 (multiplied by e^z, harmless there); modified
    Lentz evaluation of the continued fraction otherwise, which yields the
    scaled value directly and never overflows.
    """
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    if not z > 0:
        raise ParameterError(f"expint_scaled needs z > 0, got {z}")
    n = int(n)
    eps = 1e-16
    nm1 = n - 1
    if z >= 1.0:
        tiny = 1e-300
        b = z + n
        c = 1.0 / tiny
        d = 1.0 / b
        h = d
        for i in range(1, 100000):
            an = -i * (nm1 + i)
            b += 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            delta = c * d
            h *= delta
            if abs(delta - 1.0) < eps:
                return h
        raise NumericError(f"continued fraction for E_{n}({z}) did not converge")
    ans = 1.0 / nm1 if nm1 != 0 else -math.log(z) - EULER_GAMMA
    fact = 1.0
    for i in range(1, 1000):
        fact *= -z / i
        if i != nm1:
            delta = -fact / (i - nm1)
        else:
            psi = -EULER_GAMMA + sum(1.0 / k for k in range(1, nm1 + 1))
            delta = fact * (-math.log(z) + psi)
        ans += delta
        if abs(delta) < abs(ans) * eps:
            return math.exp(z) * ans
    raise NumericError(f"series for E_{n}({z}) did not converge")


# ---------------------------------------------------------------------------
# Lauricella F_A with terminating upper parameters


@dataclass(frozen=True)
class SymmetricLauricellaSpec:
    """F_A^N(a; -n, ..., -n; c, ..., c; x, ..., x) with N = ``copies``."""

    a: float
    n: int
    c: float
    x: float
    copies: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ParameterError("n must be a non-negative integer")
        if int(self.copies) != self.copies or self.copies < 1:
            raise ParameterError("copies must be a positive integer")
        if not self.c > 0:
            raise ParameterError("c must be positive")


def lauricella_fa_symmetric(spec: SymmetricLauricellaSpec) -> float:
    """Terminating symmetric Lauricella F_A by the generating-polynomial method.

    With q(t) = sum_j (-n)_j / ((c)_j j!) x^j t^j, the coefficients w_s of
    q(t)^N collect every multi-index with |i| = s, so
    F_A = sum_s (a)_s w_s.

    The sum alternates and can cancel badly.  When a, c and x are all
    rationals (int or Fraction) it is carried out exactly and rounded once.
    """
    n, N = int(spec.n), int(spec.copies)
    if n * N > 10_000:
        raise ParameterError(f"n * copies = {n * N} exceeds 10^4")
    if n == 0:
        return 1.0
    if all(isinstance(v, Rational) for v in (spec.a, spec.c, spec.x)):
        return float(_lauricella_exact(n, N, Fraction(spec.a), Fraction(spec.c), Fraction(spec.x)))
    q = np.empty(n + 1)
    q[0] = 1.0
    for j in range(n):
        q[j + 1] = q[j] * (j - n) / ((spec.c + j) * (j + 1)) * spec.x
    w = np.array([1.0])
    # repeated squaring keeps the number of convolutions at O(log N)
    base, e = q, N
    while e:
        if e & 1:
            w = np.convolve(w, base)
        e >>= 1
        if e:
            base = np.convolve(base, base)
    terms = []
    for s, ws in enumerate(w):
        if ws == 0.0:
            continue
        sign, lp = log_pochhammer(spec.a, s)
        if sign == 0:
            continue
        terms.append(sign * ws * math.exp(lp))
    return math.fsum(terms)


def _lauricella_exact(n, N, a, c, x):
    q = [Fraction(1)]
    for j in range(n):
        q.append(q[-1] * (j - n) / ((c + j) * (j + 1)) * x)

    def conv(u, v):
        out = [Fraction(0)] * (len(u) + len(v) - 1)
        for i, ui in enumerate(u):
            if ui:
                for j, vj in enumerate(v):
                    out[i + j] += ui * vj
        return out

    w, base, e = [Fraction(1)], q, N
    while e:
        if e & 1:
            w = conv(w, base)
        e >>= 1
        if e:
            base = conv(base, base)
    total, poch = Fraction(0), Fraction(1)
    for s, ws in enumerate(w):
        total += poch * ws
        poch *= a + s
    return total


def lauricella_fa_bruteforce(a: float, bs, cs, xs) -> float:
    """Direct nested summation of F_A^N(a; b; c; x) for terminating ``bs``.

    Testing oracle; every ``b_i`` must be a non-positive integer.
    """
    bs, cs, xs = list(bs), list(cs), list(xs)
    if not (len(bs) == len(cs) == len(xs)):
        raise ParameterError("bs, cs and xs must have equal length")
    tops = []
    for b in bs:
        if b > 0 or int(b) != b:
            raise NotImplementedError("only terminating series (b_i non-positive integers) are supported")
        tops.append(int(-b))
    if math.prod(t + 1 for t in tops) > 10**6:
        raise ParameterError("too many terms for brute-force summation")
    # per-variable factors (b)_i / ((c)_i i!) x^i
    factors = []
    for b, c, x, top in zip(bs, cs, xs, tops):
        f = [1.0]
        for i in range(top):
            f.append(f[-1] * (b + i) / ((c + i) * (i + 1)) * x)
        factors.append(f)
    total = []
    for idx in product(*(range(t + 1) for t in tops)):
        term = pochhammer(a, sum(idx))
        for f, i in zip(factors, idx):
            term *= f[i]
        total.append(term)
    return math.fsum(total)
