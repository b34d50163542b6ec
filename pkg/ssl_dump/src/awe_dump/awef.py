"""Writer/reader for the shared binary feature-file format.

Layout (little-endian): magic "AWEF", u16 version=1, u16 frame_shift_ms,
u32 dim, u32 num_frames, u8 source_kind (0=mfcc, 1=ssl), 7 reserved
bytes, then num_frames x dim float32 row-major. Files are written to a
temp name and renamed so concurrent workers never expose partial files.
"""

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"AWEF"
VERSION = 1
_HEADER = struct.Struct("<4sHHIIB7s")
SOURCE_KIND_MFCC = 0
SOURCE_KIND_SSL = 1


class FeatureFileError(ValueError):
    pass


def write_awef(data: np.ndarray, path, frame_shift_ms: int = 20,
               source_kind: int = SOURCE_KIND_SSL) -> None:
    """Atomically write a (num_frames x dim) float32 matrix."""
    arr = np.ascontiguousarray(data, dtype="<f4")
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise FeatureFileError(f"bad feature shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FeatureFileError("non-finite feature values")
    path = Path(path)
    header = _HEADER.pack(MAGIC, VERSION, frame_shift_ms, arr.shape[1],
                          arr.shape[0], source_kind, b"\x00" * 7)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(header)
            f.write(arr.tobytes())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def read_awef(path) -> tuple[np.ndarray, int, int]:
    """Return (data, frame_shift_ms, source_kind); validates the header."""
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise FeatureFileError(f"{path}: bad magic")
    magic, version, shift_ms, dim, num_frames, kind, _ = _HEADER.unpack(
        raw[:_HEADER.size])
    if version != VERSION:
        raise FeatureFileError(f"{path}: unsupported version {version}")
    expected = num_frames * dim * 4
    payload = raw[_HEADER.size:]
    if len(payload) < expected:
        raise FeatureFileError(f"{path}: truncated payload")
    data = np.frombuffer(payload[:expected], dtype="<f4")
    return data.reshape(num_frames, dim).copy(), shift_ms, kind
