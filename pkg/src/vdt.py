"""
Visual Data Tensorization
Turns the two image modes U x V into u_1 v_1 x ... x u_l v_l block modes by
reshape -> interleave permutation -> reshape, and back again.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .dense_tensor import ArrayLike, DenseTensor, as_array, permute_axes, reshape
from .errors import ShapeMismatchError, TensorFormatError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VdtPlan:
    """Factorization of the image modes plus passthrough trailing modes.

    With ``interleave`` off the plan is a plain reshape to the same output dims.
    """
    u_factors: Tuple[int, ...]
    v_factors: Tuple[int, ...]
    trailing_dims: Tuple[int, ...] = ()
    interleave: bool = True

    def __post_init__(self):
        if len(self.u_factors) != len(self.v_factors) or not self.u_factors:
            raise ValueError(f"u and v need the same number (>= 1) of factors, "
                             f"got {self.u_factors} and {self.v_factors}")
        if any(f < 1 for f in self.u_factors + self.v_factors + self.trailing_dims):
            raise ValueError("Factors and trailing dims must be >= 1")

    @property
    def levels(self) -> int:
        return len(self.u_factors)

    @property
    def image_dims(self) -> Tuple[int, int]:
        return int(np.prod(self.u_factors)), int(np.prod(self.v_factors))

    @property
    def input_dims(self) -> Tuple[int, ...]:
        return self.image_dims + self.trailing_dims

    @property
    def split_dims(self) -> Tuple[int, ...]:
        return self.u_factors + self.v_factors + self.trailing_dims

    @property
    def permutation(self) -> Tuple[int, ...]:
        """(0, l, 1, l+1, ..., l-1, 2l-1, trailing...) or the identity"""
        l = self.levels
        tail = tuple(range(2 * l, 2 * l + len(self.trailing_dims)))
        if not self.interleave:
            return tuple(range(2 * l)) + tail
        head = tuple(axis for k in range(l) for axis in (k, l + k))
        return head + tail

    @property
    def output_dims(self) -> Tuple[int, ...]:
        fused = tuple(u * v for u, v in zip(self.u_factors, self.v_factors))
        return fused + self.trailing_dims

    def to_text(self) -> str:
        text = (f"u={','.join(map(str, self.u_factors))} "
                f"v={','.join(map(str, self.v_factors))} "
                f"trailing={','.join(map(str, self.trailing_dims))}")
        return text if self.interleave else text + " interleave=0"

    @classmethod
    def from_text(cls, line: str) -> "VdtPlan":
        fields = {}
        for token in line.split():
            key, sep, value = token.partition("=")
            if not sep or key not in ("u", "v", "trailing", "interleave"):
                raise TensorFormatError(f"Bad VDT plan token '{token}' in '{line}'")
            fields[key] = value
        if "u" not in fields or "v" not in fields:
            raise TensorFormatError(f"VDT plan needs u= and v=: '{line}'")
        try:
            def ints(text):
                return tuple(int(x) for x in text.split(",") if x)
            return cls(ints(fields["u"]), ints(fields["v"]), ints(fields.get("trailing", "")),
                       fields.get("interleave", "1") not in ("0", "false", "no"))
        except ValueError as e:
            raise TensorFormatError(f"Bad VDT plan '{line}': {e}")


def _power_of_two_level(extent: int) -> Optional[int]:
    if extent < 2 or extent & (extent - 1):
        return None
    return extent.bit_length() - 1


def plan_vdt(first_two_dims: Sequence[int], trailing_dims: Sequence[int] = (),
             factors: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
             interleave: bool = True) -> VdtPlan:
    """Auto plan (all factors 2) for equal power-of-two image modes, else explicit factors"""
    U, V = (int(d) for d in first_two_dims)
    if U < 1 or V < 1:
        raise ValueError(f"Image modes must be >= 1, got {(U, V)}")
    trailing = tuple(int(d) for d in trailing_dims)
    if factors is None:
        level = _power_of_two_level(U)
        if level is None or U != V:
            raise ValueError(f"Auto VDT plan needs equal power-of-two image modes, got {U}x{V}; "
                             f"pass explicit factors")
        return VdtPlan((2,) * level, (2,) * level, trailing, interleave)
    u_factors = tuple(int(f) for f in factors[0])
    v_factors = tuple(int(f) for f in factors[1])
    if int(np.prod(u_factors)) != U or int(np.prod(v_factors)) != V:
        raise ValueError(f"Factors {u_factors} x {v_factors} do not multiply to {U} x {V}")
    return VdtPlan(u_factors, v_factors, trailing, interleave)


def plan_for_dims(dims: Sequence[int], plan_text: str) -> VdtPlan:
    """Resolve a command-line plan ('auto', 'flat' or a plan line) against data dims"""
    dims = tuple(dims)
    if len(dims) < 2:
        raise ShapeMismatchError(f"VDT needs at least two image modes, got dims {dims}")
    if plan_text == "auto":
        return plan_vdt(dims[:2], dims[2:])
    if plan_text == "flat":
        return plan_vdt(dims[:2], dims[2:], interleave=False)
    plan = VdtPlan.from_text(plan_text)
    if plan.input_dims != dims:
        raise ShapeMismatchError(f"Plan '{plan_text}' expects dims {plan.input_dims}, data has {dims}")
    return plan


def apply_vdt(t: ArrayLike, plan: VdtPlan) -> DenseTensor:
    array = as_array(t)
    if array.shape != plan.input_dims:
        raise ShapeMismatchError(f"Tensor dims {array.shape} do not match plan input {plan.input_dims}")
    split = reshape(array, plan.split_dims)
    return reshape(permute_axes(split, plan.permutation), plan.output_dims)


def invert_vdt(t: ArrayLike, plan: VdtPlan) -> DenseTensor:
    array = as_array(t)
    if array.shape != plan.output_dims:
        raise ShapeMismatchError(f"Tensor dims {array.shape} do not match plan output {plan.output_dims}")
    perm = plan.permutation
    permuted_dims = tuple(plan.split_dims[p] for p in perm)
    inverse = tuple(int(i) for i in np.argsort(perm))
    split = permute_axes(reshape(array, permuted_dims), inverse)
    return reshape(split, plan.input_dims)
