#!/usr/bin/env python3
"""
Test Dense Tensor Primitives
Layout order, unfolding/folding, Kronecker row order and the elementwise helpers
"""

import sys
import os

# Add src directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from src.dense_tensor import (DenseTensor, fold, frobenius_norm, hadamard, inner, kronecker,
                              mode_n_unfold, permute_axes, reshape)
from src.errors import ShapeMismatchError


def test_first_index_fastest_layout():
    t = DenseTensor.from_values((2, 3), [1, 2, 3, 4, 5, 6])
    assert t.element((1, 0)) == 2.0
    assert t.element((0, 1)) == 3.0
    np.testing.assert_array_equal(t.values, [1, 2, 3, 4, 5, 6])


def test_element_out_of_range():
    t = DenseTensor.zeros((2, 2))
    with pytest.raises(IndexError):
        t.element((2, 0))
    with pytest.raises(IndexError):
        t.element((0,))


def test_values_count_must_match_dims():
    with pytest.raises(ShapeMismatchError):
        DenseTensor.from_values((2, 3), [1, 2, 3])


def test_zero_extent_rejected():
    with pytest.raises(ShapeMismatchError):
        DenseTensor(np.zeros((0, 3)))


def test_tensor_is_read_only():
    t = DenseTensor.ones((2, 2))
    with pytest.raises(ValueError):
        t.data[0, 0] = 5.0


def test_mode_unfold_of_2x2x2():
    t = DenseTensor.from_values((2, 2, 2), range(1, 9))
    np.testing.assert_array_equal(mode_n_unfold(t, 0), [[1, 3, 5, 7], [2, 4, 6, 8]])
    np.testing.assert_array_equal(mode_n_unfold(t, 1), [[1, 2, 5, 6], [3, 4, 7, 8]])
    np.testing.assert_array_equal(mode_n_unfold(t, 2), [[1, 2, 3, 4], [5, 6, 7, 8]])


def test_unfold_of_matrix_mode0_is_identity():
    m = np.arange(12.0).reshape(3, 4)
    np.testing.assert_array_equal(mode_n_unfold(m, 0), m)


def test_unfold_bad_mode():
    with pytest.raises(IndexError):
        mode_n_unfold(np.zeros((2, 2)), 2)


def test_fold_inverts_unfold():
    rng = np.random.default_rng(3)
    array = rng.standard_normal((3, 4, 2, 5))
    for n in range(4):
        folded = fold(mode_n_unfold(array, n), n, array.shape)
        np.testing.assert_array_equal(folded.data, array)


def test_fold_inverts_unfold_up_to_order_9():
    rng = np.random.default_rng(11)
    for order in range(1, 10):
        dims = tuple(int(d) for d in rng.integers(1, 4, size=order))
        array = rng.standard_normal(dims)
        for n in range(order):
            np.testing.assert_array_equal(fold(mode_n_unfold(array, n), n, dims).data, array)


def test_unfold_of_2x3x2():
    t = DenseTensor.from_values((2, 3, 2), range(1, 13))
    unfolded = mode_n_unfold(t, 1)
    assert unfolded.shape == (3, 4)
    np.testing.assert_array_equal(unfolded[1], [3, 4, 9, 10])


def test_kronecker_row_order():
    a = np.array([[1.0], [2.0]])
    b = np.array([[1.0], [10.0], [100.0]])
    np.testing.assert_array_equal(kronecker(a, b).ravel(), [1, 10, 100, 2, 20, 200])


def test_kronecker_of_2x2_matrices():
    product = kronecker(np.array([[1, 2], [3, 4]]), np.array([[0, 1], [1, 0]]))
    np.testing.assert_array_equal(product, [[0, 1, 0, 2],
                                            [1, 0, 2, 0],
                                            [0, 3, 0, 4],
                                            [3, 0, 4, 0]])


def test_kronecker_mixed_product():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p, q, r, s, t, u = (int(x) for x in rng.integers(1, 5, size=6))
        a, c = rng.standard_normal((p, q)), rng.standard_normal((q, r))
        b, d = rng.standard_normal((s, t)), rng.standard_normal((t, u))
        left = kronecker(a, b) @ kronecker(c, d)
        right = kronecker(a @ c, b @ d)
        assert np.max(np.abs(left - right)) <= 1e-12 * max(1.0, np.max(np.abs(right)))


def test_hadamard_inner_and_norm():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([[2.0, 0.0], [1.0, -1.0]])
    np.testing.assert_array_equal(hadamard(a, b).data, [[2, 0], [3, -4]])
    assert inner(a, b) == pytest.approx(1.0)
    assert frobenius_norm(a) == pytest.approx(np.sqrt(30.0))
    with pytest.raises(ShapeMismatchError):
        inner(a, np.zeros((3, 2)))


def test_reshape_keeps_layout_order():
    t = DenseTensor.from_values((2, 3), range(6))
    r = reshape(t, (3, 2))
    np.testing.assert_array_equal(r.values, t.values)
    with pytest.raises(ShapeMismatchError):
        reshape(t, (4, 2))


def test_permute_axes():
    array = np.arange(24.0).reshape(2, 3, 4)
    p = permute_axes(array, (2, 0, 1))
    assert p.dims == (4, 2, 3)
    assert p.element((3, 1, 2)) == array[1, 2, 3]
    with pytest.raises(ValueError):
        permute_axes(array, (0, 0, 1))
