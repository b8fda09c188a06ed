"""Command-line front door.

Commands:
    kernel    evaluate a chaos kernel at given times
    norms     per-level and total norms over an eps grid  -> norms.csv
    rate      eps sweep of the approximation error + log-log fit -> rate.json
    validate  Monte Carlo cross-check of mean and variance -> validate.json
    bound     conjugate exponents and the explicit bound constant

Flags may come from a flat key=value config file (--config); command-line
flags win.  All emitted files are reproducible byte-for-byte from the same
configuration and seed; floats are serialized with repr (round-trip exact).

Exit codes: 0 success, 2 argument validation, 3 singular input, 4 quadrature
non-convergence, 5 statistical validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import bounds, focknorms, mc
from .errors import DomainError, SingularInput
from .kernels import KernelPoint, ModelParams, MultiIndex, kernel_f2, kernel_f2n, mean_l_eps
from .quadrature import QuadratureConfig

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_SINGULAR = 3
EXIT_NOT_CONVERGED = 4
EXIT_VALIDATION = 5

_DEFAULT_EPS_GRID = tuple(2.0 ** -k for k in range(4, 11))


@dataclass
class RunConfig:
    T: float = 1.0
    eps: float = 0.5
    eps_grid: tuple = _DEFAULT_EPS_GRID
    n_max: int = 15
    alpha: float = 0.9
    rel_tol: float = 1e-9
    abs_tol: float = 1e-13
    dt: float = 1e-3
    n_paths: int = 10_000
    seed: int = 1
    out_dir: str = "."
    threads: int | None = None
    plot: bool = False

    def validate(self):
        if self.T <= 0 or not math.isfinite(self.T):
            raise DomainError("T must be positive and finite")
        if not self.eps_grid:
            raise DomainError("eps grid must be nonempty")
        if any(e < 0 or not math.isfinite(e) for e in self.eps_grid):
            raise DomainError("eps grid entries must be nonnegative and finite")
        if any(a <= b for a, b in zip(self.eps_grid, self.eps_grid[1:])):
            raise DomainError("eps grid must be strictly decreasing")
        if self.n_max < 2:
            raise DomainError("n_max must be >= 2")
        if not 0 < self.alpha < 1:
            raise DomainError("alpha must lie in (0, 1)")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise DomainError("seed must fit in 64 bits")
        if self.threads is not None and self.threads < 1:
            raise DomainError("threads must be >= 1")

    def quad(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)


_CONFIG_TYPES = {f.name: f for f in fields(RunConfig)}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key == "eps_grid":
        return tuple(float(x) for x in raw.split(",") if x.strip())
    if key in ("n_max", "n_paths", "seed", "threads"):
        return int(raw)
    if key == "out_dir":
        return raw
    if key == "plot":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise DomainError(f"config: plot must be a boolean, got {raw!r}")
    return float(raw)


def _load_config_file(path: str) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config {path}:{lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_TYPES:
            raise DomainError(f"config {path}:{lineno}: unknown key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def _build_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for key, value in _load_config_file(args.config).items():
            setattr(cfg, key, value)
    overrides = {
        "T": args.T, "eps": args.eps, "n_max": args.n_max, "alpha": args.alpha,
        "rel_tol": args.rel_tol, "abs_tol": args.abs_tol, "dt": args.dt,
        "n_paths": args.n_paths, "seed": args.seed, "out_dir": args.out_dir,
        "threads": args.threads,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.eps_grid is not None:
        cfg.eps_grid = tuple(float(x) for x in args.eps_grid.split(",") if x.strip())
    if args.plot:
        cfg.plot = True
    cfg.validate()
    return cfg


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_kernel(args, cfg: RunConfig) -> int:
    times = [float(x) for x in args.times.split(",") if x.strip()]
    params = ModelParams(T=cfg.T, eps=cfg.eps)
    if args.level_one:
        value = kernel_f2(times, params)
    else:
        if args.n1 is None or args.n2 is None:
            raise DomainError("kernel needs --level-one or both --n1 and --n2")
        idx = MultiIndex(args.n1, args.n2)
        value = kernel_f2n(idx, KernelPoint(times), params)
    print(_fmt(value))
    return EXIT_OK


def _norm_rows(cfg: RunConfig):
    quad_cfg = cfg.quad()
    rows = []
    all_converged = True
    for eps in cfg.eps_grid:
        params = ModelParams(T=cfg.T, eps=eps)
        for kind in ("norm", "diff"):
            if kind == "norm":
                levels = [focknorms.level_norm_sq(n, params, quad_cfg)
                          for n in range(1, cfg.n_max + 1)]
            else:
                levels = [focknorms.level_one_diff_norm_sq(params, quad_cfg)]
                levels += [focknorms.level_diff_norm_sq(n, params, quad_cfg)
                           for n in range(2, cfg.n_max + 1)]
            for lv in levels:
                rows.append((cfg.T, eps, lv.n, kind, lv.value,
                             lv.quad.abs_error_estimate, lv.quad.converged))
            total = math.fsum(lv.value for lv in levels)
            err = math.fsum(lv.quad.abs_error_estimate for lv in levels)
            conv = all(lv.quad.converged for lv in levels)
            rows.append((cfg.T, eps, -1, kind, total, err, conv))
            all_converged &= conv
    return rows, all_converged


def cmd_norms(args, cfg: RunConfig) -> int:
    rows, all_converged = _norm_rows(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "norms.csv"
    with path.open("w", newline="") as fh:
        fh.write("T,eps,n,kind,value,quad_err,converged\n")
        for T, eps, n, kind, value, err, conv in rows:
            fh.write(f"{_fmt(T)},{_fmt(eps)},{n},{kind},{_fmt(value)},"
                     f"{_fmt(err)},{str(conv).lower()}\n")
    print(f"wrote {path}")
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED


def cmd_rate(args, cfg: RunConfig) -> int:
    if len(cfg.eps_grid) < 3:
        raise DomainError("rate needs an eps grid with at least 3 points")
    if any(e <= 0 for e in cfg.eps_grid):
        raise DomainError("rate needs strictly positive eps values")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    quad_cfg = cfg.quad()

    points = []
    all_converged = True
    if args.synthetic is not None:
        if not 0 < args.synthetic:
            raise DomainError("--synthetic exponent must be positive")
        for eps in cfg.eps_grid:
            points.append({"eps": eps, "value": eps ** args.synthetic,
                           "quad_err": 0.0, "tail_bound": 0.0, "converged": True})
        bound_check = None
    else:
        bound_check = []
        for eps in cfg.eps_grid:
            params = ModelParams(T=cfg.T, eps=eps)
            series = focknorms.total_diff_norm_sq(params, cfg.n_max, quad_cfg)
            err = math.fsum(lv.quad.abs_error_estimate for lv in series.levels)
            points.append({"eps": eps, "value": series.total, "quad_err": err,
                           "tail_bound": series.tail_bound,
                           "converged": series.converged})
            bound_check.append(
                bounds.theoretical_bound(params, cfg.alpha) >= series.total)
            all_converged &= series.converged

    fit = bounds.fit_rate([(pt["eps"], pt["value"]) for pt in points])
    doc = {
        "T": cfg.T,
        "n_max": cfg.n_max,
        "alpha": cfg.alpha,
        "alpha_hat": fit.alpha_hat,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "points": points,
        "varadhan_regime_exceeded": fit.alpha_hat > 0.5,
        "bound_check": bound_check,
    }
    path = out / "rate.json"
    with path.open("w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    if cfg.plot:
        plot_path = out / "rate_plot.csv"
        with plot_path.open("w", newline="") as fh:
            fh.write("log10_eps,log10_value,fit_line\n")
            ln10 = math.log(10.0)
            for pt in points:
                lx = math.log10(pt["eps"])
                fit_line = (fit.intercept + fit.alpha_hat * math.log(pt["eps"])) / ln10
                fh.write(f"{_fmt(lx)},{_fmt(math.log10(pt['value']))},"
                         f"{_fmt(fit_line)}\n")
    print(f"wrote {path}")
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED


def cmd_validate(args, cfg: RunConfig) -> int:
    if cfg.n_paths < 100:
        raise DomainError("validate needs n_paths >= 100")
    if cfg.eps <= 0:
        raise DomainError("validate needs eps > 0")
    params = ModelParams(T=cfg.T, eps=cfg.eps)
    values = mc.l_eps_samples(cfg.T, cfg.eps, cfg.dt, cfg.n_paths, cfg.seed,
                              cfg.threads)
    mc_mean = float(values.mean())
    mc_var = float(values.var(ddof=1))
    se_mean = math.sqrt(mc_var / cfg.n_paths)
    se_var = mc.variance_std_error(values)

    closed_mean = mean_l_eps(params)
    series = focknorms.total_norm_sq(params, cfg.n_max, cfg.quad())
    quad_err = math.fsum(lv.quad.abs_error_estimate for lv in series.levels)
    chaos_err = quad_err + series.tail_bound

    z_mean = (mc_mean - closed_mean) / se_mean
    z_var = (mc_var - series.total) / math.sqrt(se_var ** 2 + chaos_err ** 2)
    passed = abs(z_mean) <= 3.0 and abs(z_var) <= 3.0

    doc = {
        "T": cfg.T, "eps": cfg.eps, "dt": cfg.dt,
        "n_paths": cfg.n_paths, "seed": cfg.seed, "n_max": cfg.n_max,
        "mc_mean": mc_mean, "mc_mean_stderr": se_mean,
        "closed_form_mean": closed_mean, "z_mean": z_mean,
        "mc_variance": mc_var, "mc_variance_stderr": se_var,
        "chaos_variance": series.total, "chaos_variance_err": chaos_err,
        "z_variance": z_var,
        "passed": passed,
    }
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "validate.json"
    with path.open("w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")
    if not series.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if passed else EXIT_VALIDATION


def cmd_bound(args, cfg: RunConfig) -> int:
    if cfg.eps <= 0:
        raise DomainError("bound needs eps > 0")
    hp = bounds.hoelder_from_alpha(cfg.alpha)
    params = ModelParams(T=cfg.T, eps=cfg.eps)
    series = bounds.bound_series(hp.p)
    n1 = bounds.hoelder_level_one_term(params, cfg.alpha)
    total = bounds.theoretical_bound(params, cfg.alpha)
    print(f"alpha = {_fmt(hp.alpha)}")
    print(f"q = {_fmt(hp.q)}")
    print(f"p = {_fmt(hp.p)}")
    print(f"bound_series = {_fmt(series)}")
    print(f"level_one_term = {_fmt(n1)}")
    print(f"theoretical_bound = {_fmt(total)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--T", type=float, default=None, help="time horizon")
    shared.add_argument("--eps", type=float, default=None, help="mollifier width")
    shared.add_argument("--eps-grid", dest="eps_grid", default=None,
                        help="comma-separated, strictly decreasing")
    shared.add_argument("--n-max", dest="n_max", type=int, default=None,
                        help="chaos series truncation level")
    shared.add_argument("--alpha", type=float, default=None,
                        help="target rate exponent in (0,1)")
    shared.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    shared.add_argument("--abs-tol", dest="abs_tol", type=float, default=None)
    shared.add_argument("--dt", type=float, default=None, help="path step size")
    shared.add_argument("--n-paths", dest="n_paths", type=int, default=None)
    shared.add_argument("--seed", type=int, default=None)
    shared.add_argument("--out-dir", dest="out_dir", default=None)
    shared.add_argument("--threads", type=int, default=None,
                        help="worker cap (fallback: SLT_THREADS)")
    shared.add_argument("--config", default=None, help="key=value config file")
    shared.add_argument("--plot", action="store_true", default=False,
                        help="also write a plot-ready CSV (rate)")

    parser = argparse.ArgumentParser(
        prog="silt",
        description="Chaos-expansion norms, convergence bounds, and Monte "
                    "Carlo validation for the planar self-intersection "
                    "local time.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_kernel = sub.add_parser("kernel", parents=[shared],
                              help="evaluate a chaos kernel")
    p_kernel.add_argument("--times", required=True,
                          help="comma-separated time arguments")
    p_kernel.add_argument("--n1", type=int, default=None)
    p_kernel.add_argument("--n2", type=int, default=None)
    p_kernel.add_argument("--level-one", dest="level_one", action="store_true",
                          help="evaluate the two-argument log kernel")
    p_kernel.set_defaults(func=cmd_kernel)

    p_norms = sub.add_parser("norms", parents=[shared],
                             help="per-level norms over the eps grid")
    p_norms.set_defaults(func=cmd_norms)

    p_rate = sub.add_parser("rate", parents=[shared],
                            help="eps sweep, rate fit, bound check")
    p_rate.add_argument("--synthetic", type=float, default=None,
                        help="fit an exact synthetic power law instead")
    p_rate.set_defaults(func=cmd_rate)

    p_val = sub.add_parser("validate", parents=[shared],
                           help="Monte Carlo cross-check")
    p_val.set_defaults(func=cmd_validate)

    p_bound = sub.add_parser("bound", parents=[shared],
                             help="explicit bound constant")
    p_bound.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _build_config(args)
        return args.func(args, cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except SingularInput as exc:
        print(f"singular input: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
