"""Chaos-expansion kernels of the centered self-intersection local time.

For a planar Brownian motion run up to time ``T``, the mollified
self-intersection local time ``L_eps`` decomposes over Wiener chaos levels
indexed by pairs ``(n1, n2)`` (one order per coordinate, only even orders
occur).  Every kernel of total level ``n = n1 + n2`` depends on its ``2n``
time arguments only through their minimum ``u`` and maximum ``v``:

    level n > 1:  (1/2pi) (-1/2)^n / (n (n-1) n1! n2!) * G_eps(u, v)
    level n = 1:  -(1/4pi) [ln(v+eps) + ln(T-u+eps) - ln(v-u+eps) - ln(T+eps)]

with the four-term bracket

    G_eps(u, v) = (T+eps)^(1-n) - (v+eps)^(1-n)
                  - (T-u+eps)^(1-n) + (v-u+eps)^(1-n).

``eps = 0`` gives the kernels of the renormalized limit object.  The
difference bracket ``K_eps = G_0 - G_eps`` drives the approximation-error
norms.  All evaluations here are pure functions; the vectorized helpers at
the bottom serve the quadrature integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularInput

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class ModelParams:
    """Time horizon T and mollifier width eps (eps = 0 is the renormalized
    limit).  T = 0 is permitted as the degenerate empty-horizon case used by
    the closed-form mean."""

    T: float
    eps: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 0.0):
            raise DomainError(f"T must be finite and >= 0, got {self.T}")
        if not (math.isfinite(self.eps) and self.eps >= 0.0):
            raise DomainError(f"eps must be finite and >= 0, got {self.eps}")


@dataclass(frozen=True)
class MultiIndex:
    """Chaos multi-index (n1, n2); the kernel lives at Fock degree
    (2*n1, 2*n2)."""

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise DomainError(f"multi-index components must be >= 0, got {self}")

    @property
    def total(self) -> int:
        return self.n1 + self.n2

    def factorial(self) -> int:
        """n1! * n2!, exact."""
        return math.factorial(self.n1) * math.factorial(self.n2)


@dataclass(frozen=True)
class KernelPoint:
    """A tuple of time arguments; kernels consume it only through (u, v) =
    (min, max), which makes permutation invariance exact."""

    times: tuple

    def __init__(self, times: Sequence[float]):
        object.__setattr__(self, "times", tuple(float(t) for t in times))
        if not self.times:
            raise DomainError("KernelPoint needs at least one time argument")

    @property
    def u(self) -> float:
        return min(self.times)

    @property
    def v(self) -> float:
        return max(self.times)


def _pow_neg(x: float, m: int) -> float:
    """x**(-m) for integer m >= 1; multiply loop for small m, exp/log above."""
    if m <= 8:
        inv = 1.0 / x
        out = inv
        for _ in range(m - 1):
            out *= inv
        return out
    return math.exp(-m * math.log(x))


def _pair_term(x: float, eps: float, m: int) -> float:
    """x**(-m) - (x+eps)**(-m), computed as x**(-m) * (1 - (1+eps/x)**(-m))
    to avoid cancellation when eps << x."""
    return _pow_neg(x, m) * -math.expm1(-m * math.log1p(eps / x))


def k_epsilon(n: int, u: float, v: float, params: ModelParams) -> float:
    """Difference bracket K_eps(u, v, T) for total level n >= 2.

    K_eps = (T^(1-n) - (T+eps)^(1-n)) - (v^(1-n) - (v+eps)^(1-n))
            - ((T-u)^(1-n) - (T-u+eps)^(1-n)) + ((v-u)^(1-n) - (v-u+eps)^(1-n))

    Grouped as (term_T - term_{T-u}) - (term_v - term_{v-u}) so the
    cancellations at u = 0 and at v = T are exact in floating point.
    """
    T, eps = params.T, params.eps
    if n < 2:
        raise DomainError(f"k_epsilon requires n >= 2, got {n}")
    if eps <= 0.0:
        raise DomainError(f"k_epsilon requires eps > 0, got {eps}")
    if u < 0.0 or u > v or v > T:
        raise DomainError(f"need 0 <= u <= v <= T, got u={u}, v={v}, T={T}")
    if u == v:
        raise SingularInput(
            f"K_eps diverges on the diagonal u = v (u={u}); the (v-u)^(1-n) "
            "term is infinite")
    m = n - 1
    return (_pair_term(T, eps, m) - _pair_term(T - u, eps, m)) - (
        _pair_term(v, eps, m) - _pair_term(v - u, eps, m))


def kernel_f2n(idx: MultiIndex, point: KernelPoint, params: ModelParams) -> float:
    """Kernel at multi-index (n1, n2) with total n = n1 + n2 > 1, evaluated
    at 2n time arguments.  Returns 0 outside the support [0, T]^(2n)."""
    T, eps = params.T, params.eps
    n = idx.total
    if n <= 1:
        raise DomainError(f"kernel_f2n requires n1 + n2 > 1, got {idx}")
    if len(point.times) != 2 * n:
        raise DomainError(
            f"level (2*{idx.n1}, 2*{idx.n2}) needs {2 * n} time arguments, "
            f"got {len(point.times)}")
    if any(t < 0.0 or t > T for t in point.times):
        return 0.0
    u, v = point.u, point.v
    if eps == 0.0 and u == v:
        raise SingularInput(
            "renormalized kernel is +inf on the diagonal u = v; quadrature "
            "callers must exclude this measure-zero set")
    m = n - 1
    bracket = (_pow_neg(T + eps, m) - _pow_neg(v + eps, m)
               - _pow_neg(T - u + eps, m) + _pow_neg(v - u + eps, m))
    sign = -1.0 if n % 2 else 1.0
    prefactor = sign / (TWO_PI * 2.0 ** n * n * (n - 1) * idx.factorial())
    return prefactor * bracket


def kernel_f2(times: Sequence[float], params: ModelParams) -> float:
    """Level-one kernel: -(1/4pi)[ln(v+eps) + ln(T-u+eps) - ln(v-u+eps)
    - ln(T+eps)], zero outside [0, T]^2.

    Grouped so the u = 0 and v = T cancellations are exact.
    """
    T, eps = params.T, params.eps
    if len(times) != 2:
        raise DomainError(f"kernel_f2 takes exactly two times, got {len(times)}")
    t0, t1 = float(times[0]), float(times[1])
    if not (0.0 <= t0 <= T and 0.0 <= t1 <= T):
        return 0.0
    u, v = min(t0, t1), max(t0, t1)
    if eps == 0.0 and u == v:
        raise SingularInput("level-one kernel has a log singularity at u = v "
                            "when eps = 0")
    return -((math.log(v + eps) - math.log(v - u + eps))
             + (math.log(T - u + eps) - math.log(T + eps))) / FOUR_PI


def mean_l_eps(params: ModelParams) -> float:
    """Exact mean of L_eps for planar Brownian motion:

        E[L_eps] = (1/2pi) [ (T+eps) ln((T+eps)/eps) - T ].

    Derivation: the Gaussian convolution gives
    E[delta_eps(B_t - B_s)] = 1/(2pi (t-s+eps)); integrate over 0 < s < t < T.
    Diverges as eps -> 0 (hence the centering).
    """
    T, eps = params.T, params.eps
    if eps <= 0.0:
        raise DomainError("E[L_eps] is infinite at eps = 0")
    return ((T + eps) * math.log1p(T / eps) - T) / TWO_PI


# ---------------------------------------------------------------------------
# Vectorized integrand building blocks (consumed by the norm integrals).
# All take numpy arrays u, v with 0 <= u <= v <= T and return arrays.
# ---------------------------------------------------------------------------

def weighted_diff_bracket(u, v, n: int, T: float, eps: float):
    """(v-u)^(n-1) * K_eps(u, v, T), finite on the closed triangle.

    Each of the four pair-terms is written as
    (tau/x)^(n-1) * (1 - (x/(x+eps))^(n-1)) with tau = v - u, so the overall
    scale stays O(1) and the u=0 / v=T cancellations are exact.  The diagonal
    limit tau -> 0 is 1.
    """
    tau = np.maximum(v - u, 0.0)  # rounding near the diagonal can give -0 ulps
    m = n - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        log_tau = np.log(tau)

        def h(x):
            ratio = np.exp(m * (log_tau - np.log(x)))
            return ratio * -np.expm1(-m * np.log1p(eps / x))

        # same expression as h(tau) but with the unit ratio folded out, so
        # that h(v) and h_tau are bit-identical when u = 0 (exact vanishing)
        h_tau = -np.expm1(-m * np.log1p(eps / tau))
        w = (h(T) - h(T - u)) - (h(v) - h_tau)
    # corner u = v = 0 yields nan from 0/0 ratios; the limit there is h_tau
    bad = ~np.isfinite(w)
    if np.any(bad):
        w = np.where(bad & (tau == 0.0), h_tau, w)
    return w


def weighted_norm_bracket(u, v, n: int, T: float, eps: float):
    """(v-u)^(n-1) * G_eps(u, v), the weighted bracket of the level-n kernel.

    All four terms are powers of ratios in [0, 1]; valid for eps >= 0, with
    diagonal limit 1.
    """
    tau = v - u
    m = n - 1
    with np.errstate(invalid="ignore"):
        w = (np.power(tau / (T + eps), m) - np.power(tau / (v + eps), m)
             - np.power(tau / (T - u + eps), m) + np.power(tau / (tau + eps), m))
    bad = ~np.isfinite(w)
    if np.any(bad):
        # tau = 0 with eps = 0: only the (tau/(tau+eps)) term survives, -> 1
        w = np.where(bad & (tau == 0.0), 1.0, w)
    return w


def f2_values(u, v, T: float, eps: float):
    """Vectorized level-one kernel on the triangle (log singularity at u = v
    when eps = 0 propagates as +/-inf; callers treat the diagonal as
    measure zero)."""
    with np.errstate(divide="ignore"):
        return -((np.log(v + eps) - np.log(v - u + eps))
                 + (np.log(T - u + eps) - np.log(T + eps))) / FOUR_PI


def f2_diff_values(u, v, T: float, eps: float):
    """Vectorized F_{2,0} - F_{2,eps} = (1/4pi)[phi(v) + phi(T-u) - phi(v-u)
    - phi(T)] with phi(x) = ln(1 + eps/x)."""
    with np.errstate(divide="ignore"):
        phi_tau = np.log1p(eps / (v - u))
    return (np.log1p(eps / v) + np.log1p(eps / (T - u))
            - phi_tau - np.log1p(eps / T)) / FOUR_PI
