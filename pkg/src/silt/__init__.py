"""silt: chaos-expansion norms and Monte Carlo validation of the
self-intersection local time of planar Brownian motion."""

from .backend import BACKEND
from .bounds import (HoelderParams, RateFit, bound_series, fit_rate,
                     hoelder_from_alpha, hoelder_level_one_term,
                     theoretical_bound)
from .errors import DomainError, PropagatedSingularity, SingularInput
from .focknorms import (ChaosLevelResult, SeriesResult, combinatorial_weight,
                        level_diff_norm_sq, level_norm_sq,
                        level_one_diff_norm_sq, total_diff_norm_sq,
                        total_norm_sq)
from .kernels import (KernelPoint, ModelParams, MultiIndex, k_epsilon,
                      kernel_f2, kernel_f2n, mean_l_eps)
from .mc import (MCEstimate, PathSample, delta_eps, l_eps_riemann,
                 l_eps_samples, mc_moments, sample_path)
from .quadrature import (QuadratureConfig, QuadratureResult,
                         integrate_interval, integrate_triangle)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChaosLevelResult", "DomainError", "HoelderParams",
    "KernelPoint", "MCEstimate", "ModelParams", "MultiIndex", "PathSample",
    "PropagatedSingularity", "QuadratureConfig", "QuadratureResult",
    "RateFit", "SeriesResult", "SingularInput", "bound_series",
    "combinatorial_weight", "delta_eps", "fit_rate", "hoelder_from_alpha",
    "hoelder_level_one_term", "integrate_interval", "integrate_triangle",
    "k_epsilon", "kernel_f2", "kernel_f2n", "l_eps_riemann", "l_eps_samples",
    "level_diff_norm_sq", "level_norm_sq", "level_one_diff_norm_sq",
    "mc_moments", "mean_l_eps", "sample_path", "theoretical_bound",
    "total_diff_norm_sq", "total_norm_sq",
]
