"""
Weighted TT Completion (full-gradient)
Fits TT cores to the observed entries by minimizing
    f = 1/2 || W * Y - W * X ||_F^2
with analytic gradients for every core, all cores updated together from a
single gradient evaluation per iteration.
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .convergence_log import ConvergenceLog
from .dense_tensor import ArrayLike, as_array
from .errors import ShapeMismatchError, SolverDivergenceError
from .optimizers import make_optimizer
from .run_config import SolverConfig
from .tt_model import TTCores, contract, expand_ranks, left_chain, random_init, right_chain

logger = logging.getLogger(__name__)


@dataclass
class WoptState:
    """Mutable run state; ``f_prev`` is the objective of the previous iteration"""
    model: TTCores
    log: ConvergenceLog
    iter: int = 0
    f_prev: float = math.nan
    stop_reason: str = ""


def check_weight(y: ArrayLike, w: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    """Validated (zero-filled data, binary weights) arrays"""
    y_arr, w_arr = as_array(y), as_array(w)
    if y_arr.shape != w_arr.shape:
        raise ShapeMismatchError(f"Data dims {y_arr.shape} != weight dims {w_arr.shape}")
    if not np.all((w_arr == 0) | (w_arr == 1)):
        raise ValueError("Weight tensor entries must be 0 or 1")
    y_filled = np.where(w_arr == 1, y_arr, 0.0)
    if not np.all(np.isfinite(y_filled)):
        raise ValueError("Observed entries must be finite")
    return y_filled, w_arr


def _check_model(g: TTCores, dims):
    if g.dims != tuple(dims):
        raise ShapeMismatchError(f"Model dims {g.dims} != data dims {tuple(dims)}")


def objective(y: ArrayLike, w: ArrayLike, g: TTCores) -> float:
    """1/2 ||W * (Y - X)||_F^2 with X the full contraction of ``g``"""
    y_filled, w_arr = check_weight(y, w)
    _check_model(g, y_filled.shape)
    residual = w_arr * (contract(left_chain(g), g) - y_filled)
    return 0.5 * float(np.vdot(residual, residual))


def _core_gradient(residual: np.ndarray, left: np.ndarray, core: np.ndarray,
                   right: np.ndarray) -> np.ndarray:
    r_prev, extent, r_next = core.shape
    left_mat = left.reshape(-1, r_prev)
    right_mat = right.reshape(r_next, -1)
    blocks = residual.reshape(left_mat.shape[0], extent, right_mat.shape[1])
    partial = np.tensordot(left_mat, blocks, axes=([0], [0]))
    return np.tensordot(partial, right_mat, axes=([2], [1]))


def weighted_gradients(y_filled: np.ndarray, w_arr: np.ndarray, g: TTCores,
                       executor: Optional[ThreadPoolExecutor] = None) -> Tuple[List[np.ndarray], float]:
    """Core gradients and objective from pre-validated arrays"""
    lefts = left_chain(g)
    rights = right_chain(g)
    residual = w_arr * (contract(lefts, g) - y_filled)
    value = 0.5 * float(np.vdot(residual, residual))

    def grad(n: int) -> np.ndarray:
        return _core_gradient(residual, lefts[n], g.cores[n], rights[n])

    if executor is None:
        grads = [grad(n) for n in range(g.order)]
    else:
        grads = list(executor.map(grad, range(g.order)))
    return grads, value


def gradients(y: ArrayLike, w: ArrayLike, g: TTCores, workers: int = 1) -> Tuple[List[np.ndarray], float]:
    """Per-core gradients (same shapes as the cores) and the objective value.

    Unobserved entries contribute nothing.
    """
    y_filled, w_arr = check_weight(y, w)
    _check_model(g, y_filled.shape)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return weighted_gradients(y_filled, w_arr, g, executor)
    return weighted_gradients(y_filled, w_arr, g)


def run_wopt(y: ArrayLike, w: ArrayLike, config: SolverConfig,
             init: Optional[TTCores] = None) -> Tuple[TTCores, ConvergenceLog]:
    """Gradient iterations until |f_t - f_(t-1)| <= tol or max_iters"""
    config.validate()
    if config.max_iters < 1:
        raise ValueError("run_wopt needs max_iters >= 1")
    y_filled, w_arr = check_weight(y, w)
    dims = y_filled.shape
    if init is None:
        model = random_init(dims, expand_ranks(config.ranks, len(dims)), config.seed, config.init_scale)
    else:
        _check_model(init, dims)
        model = init.copy()

    optimizer = make_optimizer(config.optimizer, config.lr, config.beta1, config.beta2, config.eps,
                               config.bias_correction, config.max_halvings)
    observed_norm = float(np.linalg.norm(y_filled.ravel()))
    executor = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None

    def rse_observed(value: float) -> float:
        fit = math.sqrt(2.0 * max(value, 0.0))
        return fit / observed_norm if observed_norm > 0 else fit

    def trial_objective(params: List[np.ndarray]) -> float:
        trial = TTCores(params)
        residual = w_arr * (contract(left_chain(trial), trial) - y_filled)
        return 0.5 * float(np.vdot(residual, residual))

    logger.info(f"TT-WOPT: dims={dims} ranks={model.ranks} optimizer={optimizer.name} "
                f"observed={int(w_arr.sum())}/{w_arr.size}")
    state = WoptState(model=model, log=ConvergenceLog(config.log_timing))
    try:
        grads, f0 = weighted_gradients(y_filled, w_arr, model, executor)
        state.log.record(0, f0, rse_observed(f0))
        state.f_prev = f0
        if not math.isfinite(f0):
            raise SolverDivergenceError(0, f0, "started from a non-finite objective")
        limit = config.divergence_factor * f0 if f0 > 0 else math.inf

        while state.iter < config.max_iters:
            state.iter += 1
            optimizer.step(model.cores, grads, state.f_prev, trial_objective)
            grads, f_t = weighted_gradients(y_filled, w_arr, model, executor)
            if not math.isfinite(f_t):
                raise SolverDivergenceError(state.iter, f_t, "produced a non-finite objective")
            if f_t > limit:
                raise SolverDivergenceError(state.iter, f_t)
            state.log.record(state.iter, f_t, rse_observed(f_t))
            if state.iter % 100 == 0:
                logger.debug(f"iter {state.iter}: objective={f_t:.6e}")
            change = abs(f_t - state.f_prev)
            state.f_prev = f_t
            if change <= config.tol:
                state.stop_reason = f"objective change {change:.3e} <= tol"
                break
            if optimizer.stalled:
                state.stop_reason = "line search stalled"
                break
        else:
            state.stop_reason = "max_iters reached"
    finally:
        if executor is not None:
            executor.shutdown()

    logger.info(f"TT-WOPT stopped after {state.iter} iterations ({state.stop_reason}), "
                f"objective={state.f_prev:.6e}")
    return model, state.log
