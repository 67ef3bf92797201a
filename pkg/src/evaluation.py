"""
Evaluation Helpers
Synthetic data, missing-entry masks, completion composition and the
RSE / MSE / PSNR metrics.
"""

import math
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .dense_tensor import ArrayLike, DenseTensor, as_array
from .errors import ShapeMismatchError
from .tt_model import full_reconstruct, random_init

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompletionResult:
    """Completed tensor Z = (1 - W) * X + W * Y with its scores"""
    Z: DenseTensor
    rse: float
    psnr: Optional[float]
    elapsed: float
    iterations: int


def _dims(dims: Sequence[int]) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"Dims must be a non-empty list of positive extents, got {dims}")
    return dims


def oscillating_function(x: np.ndarray) -> np.ndarray:
    return np.sin(x / 4.0) * np.cos(x ** 2)


def gen_sin_tensor(dims: Sequence[int]) -> DenseTensor:
    """sin(x/4) cos(x^2) on a uniform grid over [0, 1], reshaped in layout order"""
    dims = _dims(dims)
    count = int(np.prod(dims))
    grid = np.linspace(0.0, 1.0, count) if count > 1 else np.zeros(1)
    return DenseTensor.from_values(dims, oscillating_function(grid))


def gen_tt_tensor(dims: Sequence[int], ranks, seed: Optional[int] = None,
                  scale: float = 1.0) -> DenseTensor:
    """A tensor that is exactly a random TT model of the given ranks"""
    return full_reconstruct(random_init(_dims(dims), ranks, seed, scale))


def _mask_from_observed(dims: Tuple[int, ...], observed_linear: np.ndarray) -> DenseTensor:
    flat = np.zeros(int(np.prod(dims)))
    flat[observed_linear] = 1.0
    return DenseTensor.from_values(dims, flat)


def gen_random_mask(dims: Sequence[int], missing_rate: float, seed: Optional[int] = None) -> DenseTensor:
    """Exactly round((1 - m_r) * prod(dims)) observed entries, drawn without replacement"""
    dims = _dims(dims)
    if not 0.0 <= missing_rate <= 1.0:
        raise ValueError(f"Missing rate must lie in [0, 1], got {missing_rate}")
    total = int(np.prod(dims))
    observed = int(round((1.0 - missing_rate) * total))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(total, size=observed, replace=False)
    logger.debug(f"Random mask dims={dims} m_r={missing_rate}: {observed}/{total} observed")
    return _mask_from_observed(dims, np.sort(chosen))


def _image_dims(dims: Sequence[int]) -> Tuple[int, ...]:
    dims = _dims(dims)
    if len(dims) < 2:
        raise ValueError(f"Structured masks need at least two image modes, got {dims}")
    return dims


def gen_row_mask(dims: Sequence[int], missing_rate: float, seed: Optional[int] = None) -> DenseTensor:
    """Whole image rows missing (through every trailing mode)"""
    dims = _image_dims(dims)
    rows = int(round(missing_rate * dims[0]))
    rng = np.random.default_rng(seed)
    mask = np.ones(dims)
    mask[rng.choice(dims[0], size=rows, replace=False)] = 0.0
    return DenseTensor(mask)


def gen_deadline_mask(dims: Sequence[int], missing_rate: float, seed: Optional[int] = None) -> DenseTensor:
    """Whole image columns missing through every trailing mode (sensor dead lines)"""
    dims = _image_dims(dims)
    cols = int(round(missing_rate * dims[1]))
    rng = np.random.default_rng(seed)
    mask = np.ones(dims)
    mask[:, rng.choice(dims[1], size=cols, replace=False)] = 0.0
    return DenseTensor(mask)


def gen_block_mask(dims: Sequence[int], missing_rate: float, seed: Optional[int] = None) -> DenseTensor:
    """One rectangular hole covering about ``missing_rate`` of the image area.

    The hole keeps the image aspect ratio; its position is drawn from ``seed``.
    """
    dims = _image_dims(dims)
    side = math.sqrt(max(0.0, min(1.0, missing_rate)))
    height = int(round(side * dims[0]))
    width = int(round(side * dims[1]))
    rng = np.random.default_rng(seed)
    top = int(rng.integers(0, dims[0] - height + 1))
    left = int(rng.integers(0, dims[1] - width + 1))
    mask = np.ones(dims)
    mask[top:top + height, left:left + width] = 0.0
    return DenseTensor(mask)


MASK_GENERATORS = {
    "random": gen_random_mask,
    "rows": gen_row_mask,
    "block": gen_block_mask,
    "deadlines": gen_deadline_mask,
}


def missing_rate_of(w: ArrayLike) -> float:
    w_arr = as_array(w)
    return 1.0 - float(w_arr.sum()) / w_arr.size


def compose(y: ArrayLike, w: ArrayLike, x: ArrayLike) -> DenseTensor:
    """Observed entries from Y, missing entries from X"""
    y_arr, w_arr, x_arr = as_array(y), as_array(w), as_array(x)
    if not (y_arr.shape == w_arr.shape == x_arr.shape):
        raise ShapeMismatchError(f"compose: dims {y_arr.shape}, {w_arr.shape}, {x_arr.shape} differ")
    return DenseTensor(np.where(w_arr == 1, y_arr, x_arr))


def rse(y: ArrayLike, z: ArrayLike) -> float:
    """||Y - Z||_F / ||Y||_F"""
    y_arr, z_arr = as_array(y), as_array(z)
    if y_arr.shape != z_arr.shape:
        raise ShapeMismatchError(f"rse: dims {y_arr.shape} and {z_arr.shape} differ")
    reference = float(np.linalg.norm(y_arr.ravel()))
    if reference == 0.0:
        raise ValueError("RSE is undefined for a zero-norm reference")
    return float(np.linalg.norm((y_arr - z_arr).ravel())) / reference


def mse(y: ArrayLike, z: ArrayLike) -> float:
    y_arr, z_arr = as_array(y), as_array(z)
    if y_arr.shape != z_arr.shape:
        raise ShapeMismatchError(f"mse: dims {y_arr.shape} and {z_arr.shape} differ")
    return float(np.mean((z_arr - y_arr) ** 2))


def psnr(y: ArrayLike, z: ArrayLike, peak: float = 1.0) -> float:
    """10 log10(255^2 / MSE) after scaling data on [0, peak] to [0, 255].

    Identical inputs give +inf.
    """
    if peak <= 0:
        raise ValueError(f"PSNR peak must be positive, got {peak}")
    scale = 255.0 / peak
    error = mse(as_array(y) * scale, as_array(z) * scale)
    if error == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / error)


def normalize(t: ArrayLike, support: Optional[ArrayLike] = None) -> Tuple[DenseTensor, float, float]:
    """Affine map to [0, 1]; min/max are taken over ``support`` entries when given"""
    array = as_array(t)
    values = array if support is None else array[as_array(support) == 1]
    if values.size == 0:
        raise ValueError("Cannot normalize: no entries to take the range from")
    low, high = float(values.min()), float(values.max())
    if not high > low:
        raise ValueError(f"Cannot normalize a constant tensor (value {low})")
    return DenseTensor((array - low) / (high - low)), low, high


def denormalize(t: ArrayLike, low: float, high: float) -> DenseTensor:
    return DenseTensor(as_array(t) * (high - low) + low)
