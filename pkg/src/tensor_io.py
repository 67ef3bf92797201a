"""
Tensor File Formats
TNSR v1 binary tensors, PPM/PGM images, TT core manifests. Every writer goes
through a temp file in the target directory and an atomic rename.
"""

import os
import math
import logging
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from .dense_tensor import DenseTensor
from .errors import ShapeMismatchError, TensorFormatError
from .tt_model import TTCores

logger = logging.getLogger(__name__)

TNSR_MAGIC = b"TNSRBIN1"
PathLike = Union[str, Path]


@contextmanager
def atomic_write(path: PathLike, mode: str = "wb"):
    """Yield a temp file handle; rename it over ``path`` on success"""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, mode) as f:
            yield f
        # mkstemp creates 0600; give the file the mode a plain open() would
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp_name, 0o666 & ~umask)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def encode_tnsr(t: DenseTensor) -> bytes:
    header = TNSR_MAGIC
    header += np.array([t.order], dtype="<u4").tobytes()
    header += np.array(t.dims, dtype="<u8").tobytes()
    return header + t.values.astype("<f8").tobytes()


def decode_tnsr(payload: bytes, source: str = "<bytes>") -> DenseTensor:
    if len(payload) < 12 or payload[:8] != TNSR_MAGIC:
        raise TensorFormatError(f"{source}: not a TNSR v1 file")
    order = int(np.frombuffer(payload, dtype="<u4", count=1, offset=8)[0])
    if order < 1:
        raise TensorFormatError(f"{source}: order must be >= 1")
    dims_end = 12 + 8 * order
    if len(payload) < dims_end:
        raise TensorFormatError(f"{source}: truncated header")
    dims = tuple(int(d) for d in np.frombuffer(payload, dtype="<u8", count=order, offset=12))
    if any(d < 1 for d in dims):
        raise TensorFormatError(f"{source}: zero extent in dims {dims}")
    count = math.prod(dims)
    if len(payload) != dims_end + 8 * count:
        raise TensorFormatError(
            f"{source}: expected {count} values for dims {dims}, "
            f"found {(len(payload) - dims_end) / 8:g}"
        )
    values = np.frombuffer(payload, dtype="<f8", count=count, offset=dims_end)
    return DenseTensor.from_values(dims, values)


def write_tnsr(t: DenseTensor, path: PathLike):
    with atomic_write(path) as f:
        f.write(encode_tnsr(t))
    logger.debug(f"Wrote tensor {t.dims} to {path}")


def read_tnsr(path: PathLike) -> DenseTensor:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Tensor file not found: {path}")
    with open(path, "rb") as f:
        return decode_tnsr(f.read(), str(path))


def write_text(text: str, path: PathLike):
    with atomic_write(path, "w") as f:
        f.write(text)


def read_image(path: PathLike) -> DenseTensor:
    """P6 -> H x W x 3, P5 -> H x W, bytes rescaled to [0, 1]"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Image not found: {path}")
    try:
        with Image.open(path) as img:
            if img.format not in ("PPM", "PGM"):
                raise TensorFormatError(f"{path}: only binary PPM/PGM is supported, got {img.format}")
            if img.mode not in ("RGB", "L"):
                raise TensorFormatError(f"{path}: only 8-bit images are supported (mode {img.mode})")
            pixels = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as e:
        raise TensorFormatError(f"{path}: {e}")
    return DenseTensor(pixels.astype(np.float64) / 255.0)


def tensor_to_pixels(t: DenseTensor) -> np.ndarray:
    """[0, 1] values back to uint8 bytes (clipped, rounded)"""
    return np.clip(np.rint(t.data * 255.0), 0, 255).astype(np.uint8)


def write_image(t: DenseTensor, path: PathLike):
    """H x W (PGM) or H x W x 3 (PPM)"""
    if t.order == 2 or (t.order == 3 and t.dims[2] == 1):
        img = Image.fromarray(tensor_to_pixels(t).reshape(t.dims[:2]))
    elif t.order == 3 and t.dims[2] == 3:
        img = Image.fromarray(tensor_to_pixels(t))
    else:
        raise ShapeMismatchError(f"Cannot write dims {t.dims} as a PPM/PGM image")
    with atomic_write(path) as f:
        img.save(f, format="PPM")
    logger.debug(f"Wrote image {t.dims} to {path}")


def read_frames(paths: Sequence[PathLike]) -> DenseTensor:
    """Stack equally sized images on a trailing frame mode"""
    if not paths:
        raise ValueError("No frames given")
    frames = [read_image(p) for p in paths]
    dims = frames[0].dims
    for p, frame in zip(paths, frames):
        if frame.dims != dims:
            raise ShapeMismatchError(f"Frame {p} has dims {frame.dims}, expected {dims}")
    if len(frames) == 1:
        return frames[0]
    return DenseTensor(np.stack([f.data for f in frames], axis=-1))


def write_frames(t: DenseTensor, pattern: str) -> List[str]:
    """Write one image, or a frame stack over the last mode when ``pattern`` holds '{}'.

    Frames are numbered from 1.
    """
    if "{}" not in pattern:
        if not (t.order == 2 or (t.order == 3 and t.dims[2] in (1, 3))):
            raise ValueError("Writing several frames needs an output pattern containing '{}'")
        write_image(t, pattern)
        return [pattern]
    if t.order == 2:
        path = pattern.format(f"{1:04d}")
        write_image(t, path)
        return [path]
    written = []
    for k in range(t.dims[-1]):
        path = pattern.format(f"{k + 1:04d}")
        write_image(DenseTensor(t.data[..., k]), path)
        written.append(path)
    return written


def save_cores(g: TTCores, manifest_path: PathLike) -> List[str]:
    """One TNSR file per core plus a manifest: count line, then file names"""
    manifest_path = Path(manifest_path)
    stem = manifest_path.stem
    names = []
    for n, core in enumerate(g.cores):
        name = f"{stem}.core{n}.tnsr"
        write_tnsr(DenseTensor(core), manifest_path.parent / name)
        names.append(name)
    write_text("\n".join([str(len(names))] + names) + "\n", manifest_path)
    logger.info(f"Saved {len(names)} cores to {manifest_path}")
    return names


def load_cores(manifest_path: PathLike) -> TTCores:
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise FileNotFoundError(f"Core manifest not found: {manifest_path}")
    lines = [line.strip() for line in manifest_path.read_text().splitlines() if line.strip()]
    try:
        count = int(lines[0])
    except (IndexError, ValueError):
        raise TensorFormatError(f"{manifest_path}: first line must be the core count")
    if len(lines) - 1 != count:
        raise TensorFormatError(f"{manifest_path}: lists {len(lines) - 1} files, header says {count}")
    cores = []
    for name in lines[1:]:
        core = read_tnsr(manifest_path.parent / name)
        if core.order != 3:
            raise TensorFormatError(f"{name}: core must be order three, got {core.dims}")
        cores.append(core.copy_array())
    return TTCores(cores)
