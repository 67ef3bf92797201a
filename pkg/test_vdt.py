#!/usr/bin/env python3
"""
Test Visual Data Tensorization
Permutation layout, block locality, exact inversion and plan text
"""

import sys
import os

# Add src directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from src.dense_tensor import DenseTensor
from src.errors import ShapeMismatchError, TensorFormatError
from src.vdt import VdtPlan, apply_vdt, invert_vdt, plan_for_dims, plan_vdt


def test_auto_plan_for_rgb_256():
    plan = plan_vdt((256, 256), (3,))
    assert plan.split_dims == (2,) * 16 + (3,)
    assert plan.permutation == (0, 8, 1, 9, 2, 10, 3, 11, 4, 12, 5, 13, 6, 14, 7, 15, 16)
    assert plan.output_dims == (4,) * 8 + (3,)


def test_auto_plan_needs_equal_powers_of_two():
    with pytest.raises(ValueError):
        plan_vdt((6, 6))
    with pytest.raises(ValueError):
        plan_vdt((4, 8))


def test_explicit_factors_must_multiply_out():
    plan = plan_vdt((6, 4), factors=((2, 3), (2, 2)))
    assert plan.output_dims == (4, 6)
    with pytest.raises(ValueError):
        plan_vdt((6, 4), factors=((2, 2), (2, 2)))


def test_first_block_of_4x4_image():
    image = DenseTensor.from_values((4, 4), range(1, 17))
    out = apply_vdt(image, plan_vdt((4, 4)))
    assert out.dims == (4, 4)
    assert set(out.data[:, 0]) == {1.0, 2.0, 5.0, 6.0}


def test_fine_mode_indexes_2x2_blocks_on_16x16():
    rows, cols = np.meshgrid(np.arange(16), np.arange(16), indexing="ij")
    plan = plan_vdt((16, 16))
    out_rows = apply_vdt(rows.astype(float), plan).data
    out_cols = apply_vdt(cols.astype(float), plan).data
    for rest in np.ndindex(out_rows.shape[1:]):
        r = out_rows[(slice(None),) + rest].astype(int)
        c = out_cols[(slice(None),) + rest].astype(int)
        assert len({(a, b) for a, b in zip(r, c)}) == 4
        assert r.min() % 2 == 0 and r.max() == r.min() + 1
        assert c.min() % 2 == 0 and c.max() == c.min() + 1


def test_inverse_on_random_plans():
    rng = np.random.default_rng(0)
    for _ in range(100):
        levels = int(rng.integers(1, 4))
        u = tuple(int(f) for f in rng.integers(1, 4, size=levels))
        v = tuple(int(f) for f in rng.integers(1, 4, size=levels))
        trailing = tuple(int(d) for d in rng.integers(1, 4, size=int(rng.integers(0, 3))))
        plan = VdtPlan(u, v, trailing, bool(rng.integers(2)))
        t = DenseTensor(rng.standard_normal(plan.input_dims))
        forward = apply_vdt(t, plan)
        assert forward.dims == plan.output_dims
        assert invert_vdt(forward, plan) == t


def test_mask_commutes_with_tensorization():
    rng = np.random.default_rng(1)
    plan = plan_vdt((8, 8), (3,))
    y = rng.random((8, 8, 3))
    w = (rng.random((8, 8, 3)) < 0.3).astype(float)
    masked = apply_vdt(w * y, plan).data
    np.testing.assert_array_equal(masked, apply_vdt(w, plan).data * apply_vdt(y, plan).data)


def test_flat_plan_is_a_plain_reshape():
    t = DenseTensor(np.arange(64.0).reshape(8, 8))
    plan = plan_for_dims(t.dims, "flat")
    out = apply_vdt(t, plan)
    assert out.dims == (4, 4, 4)
    np.testing.assert_array_equal(out.values, t.values)
    assert out != apply_vdt(t, plan_for_dims(t.dims, "auto"))


@pytest.mark.parametrize("plan", [
    VdtPlan((2, 2), (2, 2), (3,)),
    VdtPlan((4,), (2,)),
    VdtPlan((2, 3), (3, 2), (), False),
])
def test_plan_text_round_trip(plan):
    assert VdtPlan.from_text(plan.to_text()) == plan


def test_plan_text_format():
    assert VdtPlan((2, 2), (2, 2), (3,)).to_text() == "u=2,2 v=2,2 trailing=3"
    assert VdtPlan((2,), (2,)).to_text() == "u=2 v=2 trailing="


@pytest.mark.parametrize("line", ["u=2,2", "u=2 v=x", "u=2 v=2 colour=3", "nonsense"])
def test_bad_plan_text(line):
    with pytest.raises(TensorFormatError):
        VdtPlan.from_text(line)


def test_plan_must_match_data():
    with pytest.raises(ShapeMismatchError):
        plan_for_dims((8, 8), "u=2,2 v=2,2 trailing=")
    with pytest.raises(ShapeMismatchError):
        apply_vdt(np.zeros((4, 4)), plan_vdt((8, 8)))
