"""Explicit convergence bound and empirical rate fitting.

The approximation-error series is controlled by trading Hoelder conjugate
exponents: with q = 2/alpha and p = 2/(2 - alpha) (so 1/p + 1/q = 1 and
2/p > 1 exactly when alpha < 1), the total level n >= 2 admits the bound

    level_n <= (4p / ((2-p) pi^2)) T^(2/p) eps^(2/q) * t_n,
    t_n = (4 - 2/n) (p n - 1)^(-2/p),

where t_n is the collapsed form of c_n 2n(2n-1) / ((n 2^n)^2 (pn-1)^(2/p))
(the multi-index factor c_n = 4^n cancels the 2^(2n)).  The level-one term
gets the same treatment applied to the log kernel: |phi-bracket| <= 2 phi(v-u)
with phi(x) = ln(1 + eps/x) = int_0^eps dy/(y+x), and Hoelder on that integral
yields

    level_1 <= (2p / ((2-p) pi^2)) T^(2/p) eps^(2/q) (p - 1)^(-2/p).

Both terms scale as eps^(2/q) = eps^alpha, giving the bound C(T, alpha) eps^alpha
for every alpha < 1.

The series sum_n t_n decays like n^(-2/p), far too slowly for naive cutoff,
so the tail is summed by Euler-Maclaurin applied separately to the two
completely monotone pieces 4(px-1)^(-2/p) and (2/x)(px-1)^(-2/p); complete
monotonicity makes the first omitted correction a certified remainder bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DomainError
from .kernels import ModelParams

_REL_CERT = 1e-12  # certified relative accuracy of the series tail


@dataclass(frozen=True)
class HoelderParams:
    """Conjugate exponents tied to the target rate: q = 2/alpha,
    p = 2/(2 - alpha)."""

    alpha: float
    q: float
    p: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-15:
            raise DomainError("p and q are not conjugate")


@dataclass(frozen=True)
class RateFit:
    alpha_hat: float
    intercept: float
    r_squared: float
    points_used: int


def hoelder_from_alpha(alpha: float) -> HoelderParams:
    """q = 2/alpha, p = 2/(2-alpha); alpha must lie strictly inside (0, 1)
    (at alpha = 1 the bound series diverges: q = 2 is excluded)."""
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a finite real, got {alpha!r}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return HoelderParams(alpha=float(alpha), q=2.0 / alpha, p=2.0 / (2.0 - alpha))


def _series_term(n, p: float):
    """t_n = (4 - 2/n) (p n - 1)^(-2/p), the collapsed bound-series term."""
    return (4.0 - 2.0 / n) * (p * n - 1.0) ** (-2.0 / p)


def _rising(beta: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= beta + i
    return out


def _em_tail_f1(a: float, p: float, beta: float) -> Tuple[float, float]:
    """sum_{n>=a} 4 (p n - 1)^(-beta) by Euler-Maclaurin; returns
    (value, certified remainder bound).  f1 is completely monotone, so the
    remainder is bounded by the first omitted correction term."""
    base = p * a - 1.0
    integral = 4.0 * base ** (1.0 - beta) / (p * (beta - 1.0))
    f = 4.0 * base ** -beta
    d1 = -4.0 * beta * p * base ** (-beta - 1.0)
    d3 = -4.0 * _rising(beta, 3) * p ** 3 * base ** (-beta - 3.0)
    d5 = 4.0 * _rising(beta, 5) * p ** 5 * base ** (-beta - 5.0)
    return integral + 0.5 * f - d1 / 12.0 + d3 / 720.0, abs(d5) / 30240.0


def _f2_integral_series(a: float, p: float, beta: float) -> Tuple[float, float]:
    """int_a^inf (2/x)(px-1)^(-beta) dx with certified truncation error."""
    inv_pa = 1.0 / (p * a)
    coeff = 1.0                       # (beta)_j / j!
    scale = (p * a) ** -beta          # (pa)^(-beta-j) accumulates inv_pa
    total = 0.0
    term = 2.0 * coeff * scale / beta
    j = 0
    while True:
        total += term
        if abs(term) <= 1e-18 * abs(total) or j >= 200:
            break
        coeff *= (beta + j) / (j + 1.0)
        scale *= inv_pa
        j += 1
        term = 2.0 * coeff * scale / (beta + j)
    # remaining terms decay at least geometrically: the step ratio is below
    # (beta+k)/(k+1) * 1/(pa), maximized at k = j for beta > 1
    r = (beta + j) / (j + 1.0) * inv_pa
    trunc = abs(term) * r / (1.0 - r) if r < 1.0 else math.inf
    return total, abs(term) + trunc


def _f2_derivative(a: float, p: float, beta: float, k: int) -> float:
    """k-th derivative of f2(x) = 2 x^(-1) (px-1)^(-beta) at a (Leibniz)."""
    s = 0.0
    for j in range(k + 1):
        s += (math.comb(k, j) * math.factorial(j) * _rising(beta, k - j)
              * p ** (k - j) * a ** (-j - 1.0) * (p * a - 1.0) ** (-beta - (k - j)))
    return 2.0 * (-1.0) ** k * s


def _em_tail_f2(a: float, p: float, beta: float) -> Tuple[float, float]:
    """sum_{n>=a} (2/n)(p n - 1)^(-beta) by Euler-Maclaurin (f2 is a product
    of completely monotone factors, hence completely monotone)."""
    integral, int_err = _f2_integral_series(a, p, beta)
    f = 2.0 * (p * a - 1.0) ** -beta / a
    d1 = _f2_derivative(a, p, beta, 1)
    d3 = _f2_derivative(a, p, beta, 3)
    d5 = _f2_derivative(a, p, beta, 5)
    return integral + 0.5 * f - d1 / 12.0 + d3 / 720.0, abs(d5) / 30240.0 + int_err


def _series_tail(p: float, n_start: int) -> Tuple[float, float]:
    """sum_{n >= n_start} t_n with a certified error bound."""
    beta = 2.0 / p
    a = float(n_start)
    v1, r1 = _em_tail_f1(a, p, beta)
    v2, r2 = _em_tail_f2(a, p, beta)
    return v1 - v2, r1 + r2


def bound_series(p: float) -> float:
    """sum_{n>=2} c_n 2n(2n-1) / ((n 2^n)^2 (pn-1)^(2/p)) for 1 < p < 2,
    summed until the certified tail is below 1e-12 relative."""
    if not (isinstance(p, (int, float)) and math.isfinite(p)):
        raise DomainError(f"p must be a finite real, got {p!r}")
    if p <= 1.0 or p >= 2.0:
        raise DomainError(f"bound series converges only for 1 < p < 2, got p={p}")
    n_explicit = 20_000
    while True:
        ns = np.arange(2, n_explicit + 1, dtype=float)
        partial = float(_series_term(ns, p).sum())
        tail, tail_err = _series_tail(p, n_explicit + 1)
        total = partial + tail
        if tail_err <= _REL_CERT * total:
            return total
        if n_explicit > 4_000_000:  # unreachable for p in (1, 2); safety stop
            raise ArithmeticError("bound_series tail failed to certify")
        n_explicit *= 4


def _bound_prefactor(hp: HoelderParams, T: float, eps: float) -> float:
    return (4.0 * hp.p / ((2.0 - hp.p) * math.pi ** 2)
            * T ** (2.0 / hp.p) * eps ** (2.0 / hp.q))


def hoelder_level_one_term(params: ModelParams, alpha: float) -> float:
    """The derived n = 1 bound term
    (2p/((2-p) pi^2)) T^(2/p) eps^(2/q) (p-1)^(-2/p); see the module
    docstring for the derivation."""
    hp = hoelder_from_alpha(alpha)
    if params.eps <= 0.0:
        raise DomainError("the bound requires eps > 0")
    return 0.5 * _bound_prefactor(hp, params.T, params.eps) * (hp.p - 1.0) ** (-2.0 / hp.p)


def theoretical_bound(params: ModelParams, alpha: float) -> float:
    """Explicit constant times eps^alpha upper-bounding
    ||L_{eps,c} - L_c||^2: the n > 1 Hoelder bound plus the derived level-one
    term."""
    hp = hoelder_from_alpha(alpha)
    if params.eps <= 0.0:
        raise DomainError("the bound requires eps > 0")
    main = _bound_prefactor(hp, params.T, params.eps) * bound_series(hp.p)
    return main + hoelder_level_one_term(params, alpha)


def diff_series_tail_bound(params: ModelParams, n_max: int, alpha: float = 0.9) -> float:
    """Certified upper bound on the approximation-error levels beyond n_max
    (the per-level Hoelder bounds, summed)."""
    hp = hoelder_from_alpha(alpha)
    if params.eps <= 0.0:
        return 0.0
    tail, tail_err = _series_tail(hp.p, n_max + 1)
    return _bound_prefactor(hp, params.T, params.eps) * (tail + tail_err)


def fit_rate(points: Sequence[Tuple[float, float]]) -> RateFit:
    """Least-squares line through (ln eps, ln value); alpha_hat is the slope."""
    if len(points) < 2:
        raise DomainError("fit_rate needs at least two points")
    eps = [float(e) for e, _ in points]
    val = [float(v) for _, v in points]
    if any((not math.isfinite(e)) or e <= 0.0 for e in eps):
        raise DomainError("all eps must be positive and finite")
    if any((not math.isfinite(v)) or v <= 0.0 for v in val):
        raise DomainError("all values must be positive and finite")
    if len(set(eps)) != len(eps):
        raise DomainError("eps values must be distinct")
    x = np.log(eps)
    y = np.log(val)
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(y - y.mean(), y - y.mean()))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return RateFit(alpha_hat=slope, intercept=intercept, r_squared=r2,
                   points_used=len(points))
