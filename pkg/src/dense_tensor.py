"""
Dense Tensor Primitives
N-way real arrays with first-index-fastest linearization and the
multilinear-algebra helpers (unfolding, Kronecker, Hadamard, inner product)
that the TT model and both solvers build on.
"""

import logging
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import ShapeMismatchError

logger = logging.getLogger(__name__)

ArrayLike = Union["DenseTensor", np.ndarray]


class DenseTensor:
    """Immutable N-way array of float64 values.

    ``values`` is the linearized sequence in first-index-fastest (Fortran)
    order, so element ``(i_1, ..., i_N)`` sits at
    ``i_1 + i_2*I_1 + i_3*I_1*I_2 + ...`` (0-based).
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        array = np.array(data, dtype=np.float64, copy=True)
        if array.ndim < 1:
            array = array.reshape(1)
        if any(extent < 1 for extent in array.shape):
            raise ShapeMismatchError(f"Every extent must be >= 1, got {array.shape}")
        array.flags.writeable = False
        self._data = array

    @classmethod
    def from_values(cls, dims: Sequence[int], values: Iterable[float]) -> "DenseTensor":
        """Build a tensor from its linearized values (first index fastest)"""
        dims = tuple(int(d) for d in dims)
        flat = np.asarray(values, dtype=np.float64).ravel()
        if flat.size != int(np.prod(dims)):
            raise ShapeMismatchError(f"{flat.size} values cannot fill dims {dims}")
        return cls(flat.reshape(dims, order="F"))

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "DenseTensor":
        return cls(np.zeros(tuple(dims)))

    @classmethod
    def ones(cls, dims: Sequence[int]) -> "DenseTensor":
        return cls(np.ones(tuple(dims)))

    @property
    def data(self) -> np.ndarray:
        """Read-only ndarray view indexed as ``data[i_1, ..., i_N]``"""
        return self._data

    @property
    def dims(self) -> Tuple[int, ...]:
        return self._data.shape

    @property
    def order(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return self._data.size

    @property
    def values(self) -> np.ndarray:
        return self._data.ravel(order="F")

    def element(self, idx: Sequence[int]) -> float:
        if len(idx) != self.order:
            raise IndexError(f"Index {tuple(idx)} has wrong length for order {self.order}")
        for i, extent in zip(idx, self.dims):
            if not 0 <= i < extent:
                raise IndexError(f"Index {tuple(idx)} out of range for dims {self.dims}")
        return float(self._data[tuple(idx)])

    def copy_array(self) -> np.ndarray:
        """Writable copy of the underlying values"""
        return np.array(self._data)

    def __array__(self, dtype=None, copy=None):
        return self._data if dtype is None else self._data.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"DenseTensor(dims={self.dims})"


def as_array(t: ArrayLike) -> np.ndarray:
    """ndarray for either a DenseTensor or a plain array"""
    if isinstance(t, DenseTensor):
        return t.data
    return np.asarray(t, dtype=np.float64)


def _check_same_dims(a: np.ndarray, b: np.ndarray, what: str):
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{what}: dims {a.shape} and {b.shape} differ")


def _check_mode(n: int, order: int):
    if not 0 <= n < order:
        raise IndexError(f"Mode {n} out of range for an order-{order} tensor")


def mode_n_unfold(t: ArrayLike, n: int) -> np.ndarray:
    """Mode-n matricization, shape ``I_n x prod_{k != n} I_k``.

    Columns enumerate the remaining modes in their original order with the
    lowest remaining mode varying fastest.
    """
    array = as_array(t)
    _check_mode(n, array.ndim)
    return np.moveaxis(array, n, 0).reshape((array.shape[n], -1), order="F")


def fold(matrix: np.ndarray, n: int, dims: Sequence[int]) -> DenseTensor:
    """Inverse of :func:`mode_n_unfold`"""
    dims = tuple(int(d) for d in dims)
    _check_mode(n, len(dims))
    matrix = np.asarray(matrix, dtype=np.float64)
    moved = (dims[n],) + dims[:n] + dims[n + 1:]
    if matrix.size != int(np.prod(dims)) or matrix.shape[0] != dims[n]:
        raise ShapeMismatchError(f"Matrix {matrix.shape} cannot fold to {dims} on mode {n}")
    return DenseTensor(np.moveaxis(matrix.reshape(moved, order="F"), 0, n))


def kronecker(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; row ``(i, j)`` lands at ``i*J + j``"""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeMismatchError("kronecker expects two matrices")
    return np.kron(a, b)


def hadamard(a: ArrayLike, b: ArrayLike) -> DenseTensor:
    x, y = as_array(a), as_array(b)
    _check_same_dims(x, y, "hadamard")
    return DenseTensor(x * y)


def inner(a: ArrayLike, b: ArrayLike) -> float:
    x, y = as_array(a), as_array(b)
    _check_same_dims(x, y, "inner")
    return float(np.vdot(x, y))


def frobenius_norm(a: ArrayLike) -> float:
    return float(np.linalg.norm(as_array(a).ravel()))


def reshape(t: ArrayLike, new_dims: Sequence[int]) -> DenseTensor:
    """Reshape keeping the linearized value sequence"""
    array = as_array(t)
    new_dims = tuple(int(d) for d in new_dims)
    if int(np.prod(new_dims)) != array.size:
        raise ShapeMismatchError(f"Cannot reshape {array.shape} ({array.size} values) to {new_dims}")
    return DenseTensor(array.reshape(new_dims, order="F"))


def permute_axes(t: ArrayLike, perm: Sequence[int]) -> DenseTensor:
    """Output axis k is input axis ``perm[k]``"""
    array = as_array(t)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(array.ndim)):
        raise ValueError(f"{perm} is not a permutation of 0..{array.ndim - 1}")
    return DenseTensor(np.transpose(array, perm))
