"""Monte Carlo ground truth: seeded planar Brownian paths and the
Riemann-sum approximation of the mollified self-intersection local time.

Streams are counter-based (numpy's Philox-4x64), keyed by (master seed,
path index), so path p is bit-identical however many workers run and in
whatever order paths complete.  Aggregation always reduces the per-path
values in path-index order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .backend import pair_sum_gaussian
from .errors import DomainError

TWO_PI = 2.0 * math.pi
_MASK64 = (1 << 64) - 1


@dataclass
class PathSample:
    """A discretized planar Brownian path started at the origin.

    points has floor(T/dt) + 1 rows (literal float floor; with binary
    rounding e.g. T=1, dt=1e-3 gives 1000 points); increments are bivariate
    normals with per-coordinate variance dt.
    """

    dt: float
    points: np.ndarray
    seed: int
    T: float

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)
        if self.dt <= 0.0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise DomainError("points must be an (N, 2) array")
        if self.points.shape[0] < 1 or np.any(self.points[0] != 0.0):
            raise DomainError("path must start at the origin")


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    variance: float
    std_error_mean: float
    n_paths: int
    seed: int


def delta_eps(x, eps: float) -> float:
    """Planar Gaussian mollifier (1/(2 pi eps)) exp(-|x|^2 / (2 eps))."""
    if eps <= 0.0:
        raise DomainError(f"delta_eps requires eps > 0, got {eps}")
    x = np.asarray(x, dtype=float)
    return float(np.exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * eps)) / (TWO_PI * eps))


def _stream(seed: int, index: int) -> Generator:
    key = np.array([seed & _MASK64, index], dtype=np.uint64)
    return Generator(Philox(key=key))


def _path_points(T: float, dt: float, seed: int, index: int) -> np.ndarray:
    n_steps = int(math.floor(T / dt))
    increments = _stream(seed, index).standard_normal((n_steps, 2)) * math.sqrt(dt)
    points = np.empty((n_steps + 1, 2))
    points[0] = 0.0
    np.cumsum(increments, axis=0, out=points[1:])
    return points


def sample_path(T: float, dt: float, seed: int) -> PathSample:
    """Reproducible path: identical (T, dt, seed) gives bit-identical points
    (Philox stream keyed by (seed, 0), matching path 0 of mc_moments)."""
    if dt <= 0.0 or dt > T:
        raise DomainError(f"need 0 < dt <= T, got dt={dt}, T={T}")
    return PathSample(dt=dt, points=_path_points(T, dt, seed, 0), seed=seed, T=T)


def l_eps_riemann(path: PathSample, eps: float) -> float:
    """Left-point double Riemann sum of the mollified local time over the
    strict lower-triangle index pairs:

        dt^2 * sum_{j < i} delta_eps(points[i] - points[j]).

    Nonnegative; relative discretization bias is O(dt/eps).
    """
    if eps <= 0.0:
        raise DomainError(f"l_eps_riemann requires eps > 0, got {eps}")
    s = pair_sum_gaussian(path.points, eps)
    return path.dt * path.dt * s / (TWO_PI * eps)


def _resolve_threads(n_threads) -> int:
    if n_threads is None:
        env = os.environ.get("SLT_THREADS", "").strip()
        if env:
            n_threads = int(env)
        else:
            n_threads = os.cpu_count() or 1
    if n_threads < 1:
        raise DomainError(f"thread count must be >= 1, got {n_threads}")
    return int(n_threads)


def l_eps_samples(T: float, eps: float, dt: float, n_paths: int, seed: int,
                  n_threads=None) -> np.ndarray:
    """Per-path l_eps_riemann values for n_paths independent streams, in
    path-index order (deterministic for fixed arguments, any thread count)."""
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths}")
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    if dt <= 0.0 or dt > T:
        raise DomainError(f"need 0 < dt <= T, got dt={dt}, T={T}")
    scale = dt * dt / (TWO_PI * eps)
    values = np.empty(n_paths)

    def work(index: int):
        pts = _path_points(T, dt, seed, index)
        values[index] = scale * pair_sum_gaussian(pts, eps)

    workers = min(_resolve_threads(n_threads), n_paths)
    if workers == 1:
        for index in range(n_paths):
            work(index)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(n_paths)))
    return values


def mc_moments(T: float, eps: float, dt: float, n_paths: int, seed: int,
               n_threads=None) -> MCEstimate:
    """Sample mean and unbiased sample variance of L_eps over seeded paths."""
    if n_paths < 2:
        raise DomainError(f"mc_moments needs n_paths >= 2, got {n_paths}")
    values = l_eps_samples(T, eps, dt, n_paths, seed, n_threads)
    mean = float(values.mean())
    variance = float(values.var(ddof=1))
    return MCEstimate(mean=mean, variance=variance,
                      std_error_mean=math.sqrt(variance / n_paths),
                      n_paths=n_paths, seed=seed)


def variance_std_error(values: np.ndarray) -> float:
    """Standard error of the unbiased sample variance, using the sample
    fourth moment (no normality assumption):
    se^2 = (m4 - s^4 (n-3)/(n-1)) / n."""
    n = len(values)
    if n < 4:
        raise DomainError("need at least 4 values for a variance std error")
    centered = values - values.mean()
    m4 = float(np.mean(centered ** 4))
    s2 = float(values.var(ddof=1))
    return math.sqrt(max(0.0, m4 - s2 * s2 * (n - 3) / (n - 1)) / n)
