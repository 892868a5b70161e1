"""Discrete grayscale space-time signals on a centered pixel grid.

A :class:`Volume` holds samples indexed ``[t, y, x]``. Spatial coordinates
are centered: ``x`` runs over ``arange(W) - (W - 1) / 2`` (likewise ``y``),
so odd widths/heights have a true center pixel at (0, 0). Time is frame
index ``t = 0 .. T-1``.

Volumes serialize to a flat binary format: 4-byte magic ``STVL``, then
little-endian u32 width, height, frames, then float32 samples in
(t, y, x) order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

STVL_MAGIC = b"STVL"
_HEADER = struct.Struct("<4sIII")


@dataclass(frozen=True, eq=False)
class Volume:
    """A space-time signal of shape (frames, height, width)."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"volume samples must be 3-D (T, H, W), got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("volume must contain at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("volume samples must be finite")
        object.__setattr__(self, "samples", arr)

    @property
    def width(self) -> int:
        return self.samples.shape[2]

    @property
    def height(self) -> int:
        return self.samples.shape[1]

    @property
    def frames(self) -> int:
        return self.samples.shape[0]

    @property
    def extent(self) -> tuple[int, int, int]:
        """(width, height, frames)."""
        return (self.width, self.height, self.frames)


def validate_extent(extent) -> tuple[int, int, int]:
    w, h, t = (int(v) for v in extent)
    if w < 1 or h < 1 or t < 1:
        raise ValueError(f"extent must be positive, got {extent}")
    return (w, h, t)


def require_odd_spatial(extent) -> tuple[int, int, int]:
    """Validate an extent whose spatial dims need a unique center pixel."""
    w, h, t = validate_extent(extent)
    if w % 2 == 0 or h % 2 == 0:
        raise ValueError(f"width and height must be odd for a centered pattern, got {w}x{h}")
    return (w, h, t)


def spatial_coords(extent):
    """Centered pixel coordinates: x of shape (W,), y of shape (H,)."""
    w, h, _ = validate_extent(extent)
    x = np.arange(w, dtype=np.float64) - (w - 1) / 2.0
    y = np.arange(h, dtype=np.float64) - (h - 1) / 2.0
    return x, y


def coordinate_grids(extent):
    """Broadcastable grids: x (1,1,W), y (1,H,1), t (T,1,1)."""
    w, h, t = validate_extent(extent)
    x, y = spatial_coords((w, h, t))
    tt = np.arange(t, dtype=np.float64)
    return x[None, None, :], y[None, :, None], tt[:, None, None]


def write_volume(path, volume: Volume) -> None:
    """Write a volume in the STVL binary format (float32 payload)."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(STVL_MAGIC, volume.width, volume.height, volume.frames))
        fh.write(np.ascontiguousarray(volume.samples, dtype="<f4").tobytes())


def read_volume(path) -> Volume:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated STVL header")
        magic, w, h, t = _HEADER.unpack(head)
        if magic != STVL_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {STVL_MAGIC!r}")
        payload = fh.read(4 * w * h * t)
        if len(payload) != 4 * w * h * t:
            raise ValueError(f"{path}: truncated STVL payload")
    samples = np.frombuffer(payload, dtype="<f4").reshape(t, h, w)
    return Volume(samples.astype(np.float64))
