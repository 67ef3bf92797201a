"""
First-order update rules used by the solvers.

Adam follows the printed rule
    m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2,  theta <- theta - lr*m/(sqrt(v)+eps)
with no bias correction unless asked for. Gradient descent with
backtracking halves the step until the objective decreases.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

ObjectiveFn = Callable[[List[np.ndarray]], float]


@dataclass
class AdamState:
    """Per-array moment accumulators and the shared step counter"""
    m: List[np.ndarray]
    v: List[np.ndarray]
    t: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    bias_correction: bool = False

    @classmethod
    def fresh(cls, like: Sequence[np.ndarray], **hyper) -> "AdamState":
        return cls(
            m=[np.zeros_like(a, dtype=np.float64) for a in like],
            v=[np.zeros_like(a, dtype=np.float64) for a in like],
            **hyper,
        )

    def _scales(self) -> Tuple[float, float]:
        if not self.bias_correction:
            return 1.0, 1.0
        return 1.0 - self.beta1 ** self.t, 1.0 - self.beta2 ** self.t


def adam_step(state: AdamState, gradients: Sequence[np.ndarray],
              targets: List[np.ndarray]) -> Tuple[AdamState, List[np.ndarray]]:
    """Dense Adam update of every target array (in place)"""
    if len(gradients) != len(targets) or len(targets) != len(state.m):
        raise ValueError("Gradients, targets and moments must have the same length")
    state.t += 1
    bc1, bc2 = state._scales()
    for k, g in enumerate(gradients):
        if g.shape != targets[k].shape:
            raise ValueError(f"Gradient {k} shape {g.shape} != target shape {targets[k].shape}")
        m, v = state.m[k], state.v[k]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        targets[k] -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return state, targets


def adam_sparse_step(state: AdamState, targets: List[np.ndarray], positions: Sequence[int],
                     slice_grads: Sequence[np.ndarray]) -> AdamState:
    """Adam update of slice ``[:, positions[n], :]`` of each third-order target.

    Moment entries outside the touched slices are left as they are.
    """
    state.t += 1
    bc1, bc2 = state._scales()
    for n, (i, g) in enumerate(zip(positions, slice_grads)):
        m = state.m[n][:, i, :]
        v = state.v[n][:, i, :]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        targets[n][:, i, :] -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return state


class Optimizer:
    """Strategy used by the weighted solver for one update of all cores"""

    name = "base"

    def step(self, params: List[np.ndarray], grads: List[np.ndarray], f_current: float,
             objective: ObjectiveFn) -> Optional[float]:
        """Update ``params`` in place; return the new objective when it is known"""
        raise NotImplementedError

    @property
    def stalled(self) -> bool:
        return False


class AdamOptimizer(Optimizer):
    name = "adam"

    def __init__(self, lr: float = 0.001, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8, bias_correction: bool = False):
        self.hyper = dict(lr=lr, beta1=beta1, beta2=beta2, eps=eps, bias_correction=bias_correction)
        self.state: Optional[AdamState] = None

    def step(self, params, grads, f_current, objective):
        if self.state is None:
            self.state = AdamState.fresh(params, **self.hyper)
        adam_step(self.state, grads, params)
        return None


class BacktrackingGD(Optimizer):
    """Plain gradient descent; each iteration starts from twice the last accepted step"""

    name = "gd"

    def __init__(self, lr: float = 0.001, max_halvings: int = 30):
        if lr <= 0:
            raise ConfigError(f"Step size must be positive, got {lr}")
        self.step_size = lr
        self.accepted = 0
        self.max_halvings = max_halvings
        self._stalled = False

    @property
    def stalled(self) -> bool:
        return self._stalled

    def step(self, params, grads, f_current, objective):
        step = self.step_size * 2.0 if self.accepted else self.step_size
        for _ in range(self.max_halvings + 1):
            trial = [p - step * g for p, g in zip(params, grads)]
            f_trial = objective(trial)
            if np.isfinite(f_trial) and f_trial < f_current:
                for p, t in zip(params, trial):
                    p[...] = t
                self.step_size = step
                self.accepted += 1
                return f_trial
            step *= 0.5
        logger.info(f"Backtracking found no decrease after {self.max_halvings} halvings")
        self._stalled = True
        return f_current


def make_optimizer(name: str, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                   eps: float = 1e-8, bias_correction: bool = False,
                   max_halvings: int = 30) -> Optimizer:
    if name == "adam":
        return AdamOptimizer(lr, beta1, beta2, eps, bias_correction)
    if name == "gd":
        return BacktrackingGD(lr, max_halvings)
    raise ConfigError(f"Unknown optimizer '{name}' (expected adam or gd)")
