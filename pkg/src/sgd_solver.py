"""
Stochastic TT Completion (batch-one)
Each iteration samples one observed entry uniformly with replacement,
differentiates 1/2 (x - y)^2 with respect to the N slices that entry
touches, and applies Adam to those slices only.
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .convergence_log import ConvergenceLog
from .dense_tensor import ArrayLike
from .errors import EmptyObservationError, ShapeMismatchError, SolverDivergenceError
from .optimizers import AdamState, adam_sparse_step
from .run_config import SolverConfig
from .tt_model import TTCores, eval_entries, expand_ranks, random_init
from .wopt_solver import check_weight

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObservedSet:
    """Observed (multi-index, value) pairs in layout order"""
    indices: np.ndarray
    values: np.ndarray
    dims: Tuple[int, ...]

    @classmethod
    def from_tensors(cls, y: ArrayLike, w: ArrayLike) -> "ObservedSet":
        y_filled, w_arr = check_weight(y, w)
        linear = np.flatnonzero(w_arr.ravel(order="F"))
        indices = np.stack(np.unravel_index(linear, w_arr.shape, order="F"), axis=1)
        values = y_filled.ravel(order="F")[linear]
        return cls(indices.astype(np.int64), values, w_arr.shape)

    @property
    def count(self) -> int:
        return len(self.values)


def _entry_gradient(g: TTCores, idx: Sequence[int], y_val: float) -> Tuple[List[np.ndarray], float]:
    N = g.order
    slices = [g.cores[n][:, idx[n], :] for n in range(N)]
    lefts = [np.ones((1, 1))]
    for n in range(N - 1):
        lefts.append(lefts[n] @ slices[n])
    rights = [None] * N
    rights[N - 1] = np.ones((1, 1))
    for n in range(N - 1, 0, -1):
        rights[n - 1] = slices[n] @ rights[n]
    residual = float((lefts[N - 1] @ slices[N - 1])[0, 0]) - y_val
    grads = [residual * np.outer(lefts[n][0], rights[n][:, 0]) for n in range(N)]
    return grads, residual


def entry_gradient(g: TTCores, idx: Sequence[int], y_val: float) -> Tuple[List[np.ndarray], float]:
    """Slice gradients (R_{n-1} x R_n each) of 1/2 (x - y)^2 and the residual x - y"""
    if len(idx) != g.order or any(not 0 <= i < d for i, d in zip(idx, g.dims)):
        raise IndexError(f"Index {tuple(idx)} out of range for dims {g.dims}")
    return _entry_gradient(g, idx, float(y_val))


def observed_objective(g: TTCores, observed: ObservedSet) -> float:
    """1/2 sum over observed entries of (x - y)^2"""
    residual = eval_entries(g, observed.indices) - observed.values
    return 0.5 * float(np.dot(residual, residual))


def run_sgd(y: ArrayLike, w: ArrayLike, config: SolverConfig, init: Optional[TTCores] = None,
            progress: bool = False) -> Tuple[TTCores, ConvergenceLog]:
    """Batch-one Adam SGD until max_iters (or the windowed loss change <= sgd_tol)"""
    config.validate()
    observed = ObservedSet.from_tensors(y, w)
    if observed.count == 0:
        raise EmptyObservationError("TT-SGD needs at least one observed entry")
    dims = observed.dims
    if init is None:
        model = random_init(dims, expand_ranks(config.ranks, len(dims)), config.seed, config.init_scale)
    else:
        if init.dims != dims:
            raise ShapeMismatchError(f"Model dims {init.dims} != data dims {dims}")
        model = init.copy()

    state = AdamState.fresh(model.cores, lr=config.lr, beta1=config.beta1, beta2=config.beta2,
                            eps=config.eps, bias_correction=config.bias_correction)
    sampler = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
    observed_norm = float(np.linalg.norm(observed.values))
    log = ConvergenceLog(config.log_timing)

    def record(iteration: int):
        value = observed_objective(model, observed)
        if not math.isfinite(value):
            raise SolverDivergenceError(iteration, value, "produced a non-finite loss")
        fit = math.sqrt(2.0 * value)
        log.record(iteration, value, fit / observed_norm if observed_norm > 0 else fit)
        return value

    logger.info(f"TT-SGD: dims={dims} ranks={model.ranks} observed={observed.count} "
                f"max_iters={config.max_iters} lr={config.lr}")
    record(0)
    stop_reason = "max_iters reached"
    window_loss = 0.0
    previous_average = None
    t = 0
    with tqdm(total=config.max_iters, disable=not progress, desc="TT-SGD", unit="it") as bar:
        while t < config.max_iters:
            window = min(config.log_every - t % config.log_every, config.max_iters - t)
            draws = sampler.integers(0, observed.count, size=window)
            for k in draws:
                t += 1
                idx = observed.indices[k]
                grads, residual = _entry_gradient(model, idx, observed.values[k])
                if not math.isfinite(residual):
                    raise SolverDivergenceError(t, residual, "produced a non-finite loss")
                adam_sparse_step(state, model.cores, idx, grads)
                window_loss += 0.5 * residual * residual
            bar.update(window)
            if t % config.log_every == 0 or t == config.max_iters:
                value = record(t)
                average = window_loss / window
                window_loss = 0.0
                logger.debug(f"iter {t}: objective={value:.6e} window_loss={average:.6e}")
                if config.sgd_tol is not None and previous_average is not None \
                        and abs(average - previous_average) <= config.sgd_tol:
                    stop_reason = "windowed loss change <= sgd_tol"
                    break
                previous_average = average

    logger.info(f"TT-SGD stopped after {t} iterations ({stop_reason})")
    return model, log
