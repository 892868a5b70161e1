"""Stimulus rendering from manifest records to network input tensors.

Manifests carry wave parameters in presentation units (half-wavelength in
pixels, angles in degrees). Waves are evaluated on the model's input
canvas with centered spatial coordinates, mapped from [-1, 1] to mid-gray
luminance in [0, 1], replicated across the three color channels, and the
two frames stacked to six channels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import torch

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AdapterConfig:
    checkpoint: str
    layer: str = "conv6_1"
    input_size: tuple[int, int] = (512, 384)     # (W, H), divisible by 64
    input_mean: float = 0.5
    input_scale: float = 1.0
    contrast: float = 1.0                         # 0 renders blank mid-gray
    batch_size: int = 8
    device: str = "cpu"

    def __post_init__(self):
        w, h = self.input_size
        if w % 64 or h % 64:
            raise ValueError(f"input size {w}x{h} must be divisible by the "
                             "network stride of 64")


def read_manifest(path):
    """(header, records) from a JSON-lines manifest."""
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        records = [json.loads(line) for line in fh if line.strip()]
    return header, records


def _grids(input_size, frames: int):
    w, h = input_size
    x = np.arange(w, dtype=np.float64) - (w - 1) / 2.0
    y = np.arange(h, dtype=np.float64) - (h - 1) / 2.0
    t = np.arange(frames, dtype=np.float64)
    return x[None, None, :], y[None, :, None], t[:, None, None]


def render_wave(record: dict, input_size, frames: int = 2) -> np.ndarray:
    """Wave samples in [-1, 1], shape (frames, H, W)."""
    params = record["params"]
    kind = record["motion_kind"]
    freq = 1.0 / (2.0 * float(params["half_wavelength"]))
    theta = math.radians(float(params["orientation"]))
    phase = math.radians(float(params["phase"]))
    x, y, t = _grids(input_size, frames)
    xr = x * math.cos(theta) + y * math.sin(theta)
    if kind == "translation":
        arg = TWO_PI * (freq * xr - float(params["temporal_frequency"]) * t) + phase
    elif kind == "dilation":
        alpha = 1.0 - 1.0 / float(params["scale_factor"])
        arg = TWO_PI * freq * (xr - alpha * xr * t) + phase
    elif kind == "rotation":
        omega = float(params["angular_frequency"])
        angle = theta + omega * t
        xr_t = x * np.cos(angle) + y * np.sin(angle)
        arg = TWO_PI * freq * xr_t + phase
    else:
        raise ValueError(f"unknown motion kind {kind!r}")
    return np.cos(np.broadcast_to(arg, (frames, input_size[1], input_size[0])))


def luminance_to_tensor(frames: np.ndarray, config: AdapterConfig) -> torch.Tensor:
    """Frame stack (T, H, W) of [0, 1] luminance to a (6, H, W) input."""
    if frames.shape[0] != 2:
        raise ValueError("the network consumes frame pairs")
    normalized = (frames - config.input_mean) * config.input_scale
    channels = np.repeat(normalized[:, None, :, :], 3, axis=1)   # (2, 3, H, W)
    return torch.from_numpy(channels.reshape(6, *frames.shape[1:]).astype(np.float32))


def wave_to_tensor(record: dict, config: AdapterConfig) -> torch.Tensor:
    wave = render_wave(record, config.input_size)
    luminance = 0.5 + 0.5 * config.contrast * wave
    return luminance_to_tensor(luminance, config)
