"""SYMF latent interchange files.

Layout (little-endian, bit-exact):

    bytes 0..3    magic "SYMF"
    u32           version, currently 1
    u32           N, subcarriers per frame
    u64           frame_count
    then frame_count * N records of (f32 real, f32 imag)

The format is shared with external latent producers; the reader returns
the stored float32 values exactly (no normalization here).
"""

import os
import struct
import tempfile

import numpy as np

from .errors import FormatError

MAGIC = b"SYMF"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


def write_symf(path, frames: np.ndarray):
    """Write complex frames of shape (frame_count, N) atomically to `path`.

    Values are stored as float32 pairs; inputs are cast.
    """
    frames = np.asarray(frames)
    if frames.ndim != 2:
        raise FormatError(f"frames must be 2-D (frame_count, N), got shape {frames.shape}")
    frame_count, n = frames.shape
    records = np.empty((frame_count, n, 2), dtype="<f4")
    records[:, :, 0] = frames.real.astype(np.float32)
    records[:, :, 1] = frames.imag.astype(np.float32)

    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".symf-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, n, frame_count))
            fh.write(records.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_symf(path) -> np.ndarray:
    """Read a SYMF file into a complex64 array of shape (frame_count, N)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FormatError(f"{path}: truncated header ({len(header)} bytes)")
        magic, version, n, frame_count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        if n == 0:
            raise FormatError(f"{path}: N must be positive")
        payload = fh.read()
    expected = frame_count * n * 8
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    records = np.frombuffer(payload, dtype="<f4").reshape(frame_count, n, 2)
    return records[:, :, 0] + 1j * records[:, :, 1]
