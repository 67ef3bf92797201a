"""
Tensor-Train Model
Core container, full contraction, per-entry evaluation, subchain merges and
the unfolding identity X_(n) = G^(n)_(2) (G^{>n}_(1) kron G^{<n}_(last)).
"""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .dense_tensor import DenseTensor, kronecker, mode_n_unfold
from .errors import RankChainError

logger = logging.getLogger(__name__)

RankSpec = Union[int, Sequence[int]]


def expand_ranks(ranks: RankSpec, order: int) -> Tuple[int, ...]:
    """Full rank chain R_0..R_N from a scalar or an explicit chain.

    A scalar ``r`` means R_1 = ... = R_{N-1} = r.
    """
    if order < 1:
        raise RankChainError(f"Order must be >= 1, got {order}")
    if np.isscalar(ranks):
        r = int(ranks)
        chain = (1,) + (r,) * (order - 1) + (1,)
    else:
        chain = tuple(int(r) for r in ranks)
    if len(chain) != order + 1:
        raise RankChainError(f"Rank chain {chain} needs {order + 1} entries for order {order}")
    if chain[0] != 1 or chain[-1] != 1:
        raise RankChainError(f"Rank chain {chain} must start and end with 1")
    if any(r < 1 for r in chain):
        raise RankChainError(f"All ranks must be >= 1, got {chain}")
    return chain


class TTCores:
    """Ordered third-order cores G^(n) of shape (R_{n-1}, I_n, R_n).

    Boundary cores keep their rank-1 outer modes so every core is handled the
    same way. The arrays are owned by whoever holds the model; solvers update
    them in place.
    """

    def __init__(self, cores: Sequence[np.ndarray]):
        if len(cores) < 1:
            raise RankChainError("A TT model needs at least one core")
        self.cores: List[np.ndarray] = [np.asarray(c, dtype=np.float64) for c in cores]
        for n, core in enumerate(self.cores):
            if core.ndim != 3:
                raise RankChainError(f"Core {n} has shape {core.shape}, expected three modes")
        if self.cores[0].shape[0] != 1 or self.cores[-1].shape[2] != 1:
            raise RankChainError("Boundary ranks R_0 and R_N must be 1")
        for n in range(len(self.cores) - 1):
            if self.cores[n].shape[2] != self.cores[n + 1].shape[0]:
                raise RankChainError(
                    f"Core {n} trailing rank {self.cores[n].shape[2]} != "
                    f"core {n + 1} leading rank {self.cores[n + 1].shape[0]}"
                )

    @property
    def order(self) -> int:
        return len(self.cores)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(core.shape[1] for core in self.cores)

    @property
    def ranks(self) -> Tuple[int, ...]:
        return (1,) + tuple(core.shape[2] for core in self.cores)

    @property
    def param_count(self) -> int:
        return sum(core.size for core in self.cores)

    def slice(self, n: int, i: int) -> np.ndarray:
        """R_{n-1} x R_n slice of core n at position i (a view)"""
        return self.cores[n][:, i, :]

    def copy(self) -> "TTCores":
        return TTCores([core.copy() for core in self.cores])

    def __repr__(self) -> str:
        return f"TTCores(dims={self.dims}, ranks={self.ranks})"


def random_init(dims: Sequence[int], ranks: RankSpec, seed: Optional[int] = None,
                init_scale: float = 0.1) -> TTCores:
    """Cores with i.i.d. Gaussian(0, 1) * init_scale entries"""
    dims = tuple(int(d) for d in dims)
    chain = expand_ranks(ranks, len(dims))
    rng = np.random.default_rng(seed)
    cores = [
        rng.standard_normal((chain[n], dims[n], chain[n + 1])) * init_scale
        for n in range(len(dims))
    ]
    logger.debug(f"Initialized TT model dims={dims} ranks={chain} seed={seed}")
    return TTCores(cores)


def left_chain(g: TTCores) -> List[np.ndarray]:
    """All left subchains; entry n is G^{<n} with shape (I_1..I_{n-1}, R_{n-1})"""
    lefts: List[np.ndarray] = [np.ones(())]
    if g.order > 1:
        first = g.cores[0]
        lefts.append(first.reshape(first.shape[1], first.shape[2]))
    for n in range(1, g.order - 1):
        lefts.append(np.tensordot(lefts[n], g.cores[n], axes=([-1], [0])))
    return lefts


def right_chain(g: TTCores) -> List[np.ndarray]:
    """All right subchains; entry n is G^{>n} with shape (R_n, I_{n+1}..I_N)"""
    N = g.order
    rights: List[Optional[np.ndarray]] = [None] * N
    rights[N - 1] = np.ones(())
    if N > 1:
        last = g.cores[N - 1]
        rights[N - 2] = last.reshape(last.shape[0], last.shape[1])
    for n in range(N - 3, -1, -1):
        rights[n] = np.tensordot(g.cores[n + 1], rights[n + 1], axes=([2], [0]))
    return rights


def subchain_left(g: TTCores, n: int) -> np.ndarray:
    """Merge of cores before n; the scalar 1 for n = 0"""
    if not 0 <= n < g.order:
        raise IndexError(f"Mode {n} out of range for order {g.order}")
    return left_chain(g)[n]


def subchain_right(g: TTCores, n: int) -> np.ndarray:
    """Merge of cores after n; the scalar 1 for the last mode"""
    if not 0 <= n < g.order:
        raise IndexError(f"Mode {n} out of range for order {g.order}")
    return right_chain(g)[n]


def contract(lefts: List[np.ndarray], g: TTCores) -> np.ndarray:
    """Full tensor from a precomputed left chain"""
    last = g.cores[-1]
    if g.order == 1:
        return last[0, :, 0].copy()
    return np.tensordot(lefts[-1], last, axes=([-1], [0]))[..., 0]


def full_reconstruct(g: TTCores) -> DenseTensor:
    return DenseTensor(contract(left_chain(g), g))


def _check_index(g: TTCores, idx: Sequence[int]):
    if len(idx) != g.order:
        raise IndexError(f"Index {tuple(idx)} has wrong length for order {g.order}")
    for i, extent in zip(idx, g.dims):
        if not 0 <= i < extent:
            raise IndexError(f"Index {tuple(idx)} out of range for dims {g.dims}")


def slice_product(g: TTCores, idx: Sequence[int], start: int, stop: int) -> np.ndarray:
    """Product of slices G^(k)_{i_k} for start <= k < stop (identity if empty)"""
    if start >= stop:
        size = g.cores[start].shape[0] if start < g.order else 1
        return np.eye(size)
    acc = g.cores[start][:, idx[start], :]
    for k in range(start + 1, stop):
        acc = acc @ g.cores[k][:, idx[k], :]
    return acc


def eval_entry(g: TTCores, idx: Sequence[int]) -> float:
    """One entry as the 1x1 product of the mode slices"""
    _check_index(g, idx)
    return float(slice_product(g, idx, 0, g.order)[0, 0])


def eval_entries(g: TTCores, indices: np.ndarray) -> np.ndarray:
    """Entries at the rows of an M x N index array, without forming X"""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.ndim != 2 or indices.shape[1] != g.order:
        raise IndexError(f"Index array {indices.shape} does not match order {g.order}")
    if indices.size and (indices.min() < 0 or np.any(indices.max(axis=0) >= np.array(g.dims))):
        raise IndexError("Index array has entries out of range")
    acc = g.cores[0][0, indices[:, 0], :]
    for n in range(1, g.order):
        acc = np.einsum("mr,rms->ms", acc, g.cores[n][:, indices[:, n], :])
    return acc[:, 0]


def unfold_identity_check(g: TTCores, n: int) -> np.ndarray:
    """X_(n) assembled from core n and the two subchains via a Kronecker product"""
    if not 0 <= n < g.order:
        raise IndexError(f"Mode {n} out of range for order {g.order}")
    core_unf = mode_n_unfold(g.cores[n], 1)
    left = subchain_left(g, n)
    right = subchain_right(g, n)
    left_unf = np.ones((1, 1)) if left.ndim == 0 else mode_n_unfold(left, left.ndim - 1)
    right_unf = np.ones((1, 1)) if right.ndim == 0 else mode_n_unfold(right, 0)
    return core_unf @ kronecker(right_unf, left_unf)
