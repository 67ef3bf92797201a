"""
Run Configuration
Loads config.yaml defaults and merges command-line overrides into typed
solver and run settings.
"""

import math
import os
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Optional, Sequence, Union

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "config.yaml"
ALGORITHMS = ("wopt", "sgd")
DEFAULT_MAX_ITERS = {"wopt": 500, "sgd": 100_000}


@dataclass
class SolverConfig:
    """Hyperparameters shared by both solvers"""
    ranks: Union[int, Sequence[int]] = 12
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    tol: float = 1e-4
    max_iters: int = 500
    seed: Optional[int] = 0
    init_scale: float = 0.1
    log_every: int = 1000
    optimizer: str = "adam"
    bias_correction: bool = False
    max_halvings: int = 30
    workers: int = 1
    divergence_factor: float = 1e6
    sgd_tol: Optional[float] = None
    log_timing: bool = True

    def validate(self) -> "SolverConfig":
        for name in ("lr", "beta1", "beta2", "eps", "init_scale", "divergence_factor"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value}")
        if math.isnan(self.tol) or self.tol < 0:
            raise ConfigError(f"tol must be >= 0, got {self.tol}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError(f"beta1/beta2 must lie in [0, 1), got {self.beta1}, {self.beta2}")
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.max_iters < 0:
            raise ConfigError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.log_every < 1:
            raise ConfigError(f"log_every must be >= 1, got {self.log_every}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.sgd_tol is not None and (math.isnan(self.sgd_tol) or self.sgd_tol < 0):
            raise ConfigError(f"sgd_tol must be >= 0, got {self.sgd_tol}")
        return self


@dataclass
class RunConfig:
    """Everything one `complete` invocation needs"""
    algorithm: str = "wopt"
    solver: SolverConfig = field(default_factory=SolverConfig)
    vdt: Optional[str] = None
    input_path: str = ""
    mask_path: str = ""
    output_path: str = ""
    log_path: Optional[str] = None
    truth_path: Optional[str] = None
    cores_path: Optional[str] = None
    normalize: bool = True
    psnr_peak: float = 1.0

    def validate(self) -> "RunConfig":
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got '{self.algorithm}'")
        self.solver.validate()
        if not self.solver.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.solver.tol}")
        for name in ("input_path", "mask_path", "output_path"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        return self


def load_base_config(path: str = DEFAULT_CONFIG_FILE) -> Dict[str, Any]:
    """Load the YAML defaults file"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    with open(path, "r") as f:
        config = yaml.safe_load(f) or {}
    logger.debug(f"Loaded configuration from {path}")
    return config


def parse_ranks(text: Union[str, int, Sequence[int]]) -> Union[int, tuple]:
    """'12' -> 12, '1,3,3,1' -> (1, 3, 3, 1)"""
    if isinstance(text, int):
        return text
    if not isinstance(text, str):
        return tuple(int(r) for r in text)
    try:
        parts = [int(p) for p in text.replace(" ", "").split(",") if p]
    except ValueError:
        raise ConfigError(f"Cannot parse ranks '{text}'")
    if not parts:
        raise ConfigError("Ranks must not be empty")
    return parts[0] if len(parts) == 1 else tuple(parts)


def solver_config_from_dict(section: Dict[str, Any], algorithm: str = "wopt") -> SolverConfig:
    """SolverConfig from the `solver` section of config.yaml"""
    section = dict(section or {})
    known = {f.name for f in fields(SolverConfig)}
    max_iters = section.pop(f"max_iters_{algorithm}", None)
    for key in ("max_iters_wopt", "max_iters_sgd", "algorithm"):
        section.pop(key, None)
    unknown = set(section) - known
    if unknown:
        logger.warning(f"Ignoring unknown solver settings: {', '.join(sorted(unknown))}")
    values = {k: v for k, v in section.items() if k in known}
    if "ranks" in values:
        values["ranks"] = parse_ranks(values["ranks"])
    values["max_iters"] = int(max_iters) if max_iters is not None else DEFAULT_MAX_ITERS[algorithm]
    try:
        for name in ("lr", "beta1", "beta2", "eps", "tol", "init_scale", "divergence_factor"):
            if name in values:
                values[name] = float(values[name])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Bad numeric solver setting: {e}")
    return SolverConfig(**values)


def add_solver_args(parser):
    """Add solver selection arguments to an argument parser"""
    parser.add_argument('--config', default=DEFAULT_CONFIG_FILE, help='YAML defaults file')
    parser.add_argument('--algorithm', choices=ALGORITHMS, help='Solver to run (wopt or sgd)')
    parser.add_argument('--ranks', help="Scalar TT-rank or full chain such as '1,3,3,1'")
    parser.add_argument('--max-iters', type=int, help='Maximum iterations')
    parser.add_argument('--tol', type=float, help='Stop when |f_t - f_(t-1)| <= tol')
    parser.add_argument('--lr', type=float, help='Learning rate')
    parser.add_argument('--beta1', type=float)
    parser.add_argument('--beta2', type=float)
    parser.add_argument('--eps', type=float)
    parser.add_argument('--seed', type=int)
    parser.add_argument('--init-scale', type=float, help='Scale of the Gaussian core initialization')
    parser.add_argument('--log-every', type=int, help='SGD logging cadence in iterations')
    parser.add_argument('--optimizer', choices=('adam', 'gd'), help='Update rule for wopt')
    parser.add_argument('--sgd-tol', type=float, help='Windowed loss-change stop for sgd')
    parser.add_argument('--workers', type=int, help='Threads for per-mode wopt gradients')
    parser.add_argument('--no-timing', action='store_true', help='Write elapsed_ms as 0 in logs')
    return parser


_ARG_TO_FIELD = {
    "max_iters": "max_iters", "tol": "tol", "lr": "lr", "beta1": "beta1", "beta2": "beta2",
    "eps": "eps", "seed": "seed", "init_scale": "init_scale", "log_every": "log_every",
    "optimizer": "optimizer", "sgd_tol": "sgd_tol", "workers": "workers",
}


def solver_config_from_args(args, base_config: Dict[str, Any], algorithm: str) -> SolverConfig:
    """Command-line values over config.yaml over dataclass defaults"""
    solver = solver_config_from_dict(base_config.get("solver", {}), algorithm)
    overrides = {}
    for arg_name, field_name in _ARG_TO_FIELD.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            overrides[field_name] = value
    if getattr(args, "ranks", None):
        overrides["ranks"] = parse_ranks(args.ranks)
    log_timing = base_config.get("output", {}).get("log_timing", True)
    if getattr(args, "no_timing", False):
        log_timing = False
    overrides["log_timing"] = bool(log_timing)
    return replace(solver, **overrides).validate()


def build_run_config(args, base_config: Dict[str, Any]) -> RunConfig:
    """Assemble and validate the RunConfig for `complete`"""
    algorithm = args.algorithm or base_config.get("solver", {}).get("algorithm", "wopt")
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got '{algorithm}'")
    data = base_config.get("data", {})
    normalize = data.get("normalize", True)
    if getattr(args, "no_normalize", False):
        normalize = False
    run = RunConfig(
        algorithm=algorithm,
        solver=solver_config_from_args(args, base_config, algorithm),
        vdt=args.vdt,
        input_path=args.input,
        mask_path=args.mask,
        output_path=args.out,
        log_path=args.log,
        truth_path=getattr(args, "truth", None),
        cores_path=getattr(args, "save_cores", None),
        normalize=bool(normalize),
        psnr_peak=float(data.get("psnr_peak", 1.0)),
    )
    return run.validate()
