#!/usr/bin/env python3
"""
Test Tensor File Formats
TNSR layout, image conversion, frame stacks and core manifests
"""

import sys
import os
import stat
import struct

# Add src directory to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
from PIL import Image

from src.dense_tensor import DenseTensor
from src.errors import ShapeMismatchError, TensorFormatError
from src.tensor_io import (decode_tnsr, encode_tnsr, load_cores, read_frames, read_image, read_tnsr,
                           save_cores, write_frames, write_image, write_tnsr)
from src.tt_model import random_init


def test_tnsr_byte_layout():
    t = DenseTensor.from_values((2, 3), [0.5, 1, 2, 3, 4, 5])
    payload = encode_tnsr(t)
    assert payload[:8] == b"TNSRBIN1"
    assert struct.unpack("<I", payload[8:12]) == (2,)
    assert struct.unpack("<QQ", payload[12:28]) == (2, 3)
    assert struct.unpack("<6d", payload[28:]) == (0.5, 1.0, 2.0, 3.0, 4.0, 5.0)


def test_tnsr_file_round_trip(tmp_path):
    t = DenseTensor(np.random.default_rng(0).standard_normal((3, 1, 4, 2)))
    path = tmp_path / "nested" / "t.tnsr"
    write_tnsr(t, path)
    assert read_tnsr(path) == t
    assert os.path.getsize(path) == 8 + 4 + 4 * 8 + 24 * 8
    assert [p.name for p in path.parent.iterdir()] == ["t.tnsr"]


@pytest.mark.parametrize("payload", [
    b"NOTTNSR1" + b"\x00" * 20,
    b"TNSRBIN1",
    b"TNSRBIN1" + struct.pack("<I", 0),
    b"TNSRBIN1" + struct.pack("<IQ", 1, 3) + struct.pack("<2d", 1.0, 2.0),
    b"TNSRBIN1" + struct.pack("<IQ", 1, 0),
])
def test_malformed_tnsr(payload):
    with pytest.raises(TensorFormatError):
        decode_tnsr(payload)


def test_oversized_header_extents_rejected():
    # 2^32 * 2^32 overflows int64 to 0
    payload = b"TNSRBIN1" + struct.pack("<IQQ", 2, 2**32, 2**32)
    with pytest.raises(TensorFormatError, match="expected"):
        decode_tnsr(payload)


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        read_tnsr("/nonexistent/x.tnsr")


@pytest.mark.skipif(os.name != "posix", reason="POSIX file modes")
def test_written_files_follow_umask(tmp_path):
    previous = os.umask(0o022)
    try:
        write_tnsr(DenseTensor.ones((2, 2)), tmp_path / "t.tnsr")
    finally:
        os.umask(previous)
    assert stat.S_IMODE(os.stat(tmp_path / "t.tnsr").st_mode) == 0o644


def test_ppm_round_trip_keeps_bytes(tmp_path):
    pixels = np.random.default_rng(3).integers(0, 256, size=(6, 5, 3), dtype=np.uint8)
    source = tmp_path / "in.ppm"
    Image.fromarray(pixels).save(source, format="PPM")
    t = read_image(source)
    assert t.dims == (6, 5, 3)
    assert t.data.max() <= 1.0
    out = tmp_path / "out.ppm"
    write_image(t, out)
    assert out.read_bytes() == source.read_bytes()


def test_pgm_round_trip(tmp_path):
    pixels = np.arange(20, dtype=np.uint8).reshape(4, 5) * 12
    source = tmp_path / "in.pgm"
    Image.fromarray(pixels).save(source, format="PPM")
    t = read_image(source)
    assert t.dims == (4, 5)
    write_image(t, tmp_path / "out.pgm")
    with Image.open(tmp_path / "out.pgm") as img:
        np.testing.assert_array_equal(np.asarray(img), pixels)


def test_write_image_clips_values(tmp_path):
    write_image(DenseTensor(np.array([[-0.5, 2.0]])), tmp_path / "c.pgm")
    with Image.open(tmp_path / "c.pgm") as img:
        np.testing.assert_array_equal(np.asarray(img), [[0, 255]])


def test_write_image_rejects_other_shapes(tmp_path):
    with pytest.raises(ShapeMismatchError):
        write_image(DenseTensor(np.zeros((4, 4, 2))), tmp_path / "x.ppm")


def test_non_ppm_rejected(tmp_path):
    path = tmp_path / "x.ppm"
    path.write_bytes(b"not an image")
    with pytest.raises(TensorFormatError):
        read_image(path)


def test_frame_stack_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    paths = []
    for k in range(3):
        frame = rng.integers(0, 256, size=(4, 4), dtype=np.uint8)
        path = tmp_path / f"f{k}.pgm"
        Image.fromarray(frame).save(path, format="PPM")
        paths.append(path)
    stack = read_frames(paths)
    assert stack.dims == (4, 4, 3)
    written = write_frames(stack, str(tmp_path / "out_{}.pgm"))
    assert [os.path.basename(p) for p in written] == ["out_0001.pgm", "out_0002.pgm", "out_0003.pgm"]
    for original, copy in zip(paths, written):
        assert open(original, "rb").read() == open(copy, "rb").read()


def test_several_frames_need_a_pattern(tmp_path):
    with pytest.raises(ValueError):
        write_frames(DenseTensor(np.zeros((4, 4, 5))), str(tmp_path / "plain.pgm"))


def test_frames_must_share_dims(tmp_path):
    Image.fromarray(np.zeros((4, 4), dtype=np.uint8)).save(tmp_path / "a.pgm", format="PPM")
    Image.fromarray(np.zeros((4, 5), dtype=np.uint8)).save(tmp_path / "b.pgm", format="PPM")
    with pytest.raises(ShapeMismatchError):
        read_frames([tmp_path / "a.pgm", tmp_path / "b.pgm"])


def test_core_manifest_round_trip(tmp_path):
    g = random_init((3, 4, 5), (1, 2, 3, 1), seed=0)
    names = save_cores(g, tmp_path / "model.cores")
    assert names == ["model.core0.tnsr", "model.core1.tnsr", "model.core2.tnsr"]
    assert (tmp_path / "model.cores").read_text().splitlines()[0] == "3"
    loaded = load_cores(tmp_path / "model.cores")
    for a, b in zip(g.cores, loaded.cores):
        np.testing.assert_array_equal(a, b)


def test_core_manifest_count_checked(tmp_path):
    g = random_init((3, 4), 2, seed=0)
    save_cores(g, tmp_path / "m.cores")
    (tmp_path / "m.cores").write_text("3\nm.core0.tnsr\nm.core1.tnsr\n")
    with pytest.raises(TensorFormatError):
        load_cores(tmp_path / "m.cores")
