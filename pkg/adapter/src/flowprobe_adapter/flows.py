"""Multi-level flow maps for bar-pair stimuli, written as .flo files.

Bar volumes arrive in the STVL binary format (magic, u32 W/H/T, float32
samples in t-y-x order) with luminance already in [0, 1]. For every input
``<stem>.stvl`` the adapter writes ``<stem>_f6.flo``, ``<stem>_f4.flo``
and ``<stem>_f2.flo`` in the Middlebury format, keeping whatever flow
units the checkpoint was trained in (full-resolution pixels for the
intended checkpoints).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import torch

from .model import load_checkpoint
from .rendering import AdapterConfig, luminance_to_tensor

STVL_MAGIC = b"STVL"
FLO_MAGIC = b"PIEH"
EMITTED_LEVELS = ("f6", "f4", "f2")


def read_stvl(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(16)
        magic, w, h, t = struct.unpack("<4sIII", head)
        if magic != STVL_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        payload = np.frombuffer(fh.read(4 * w * h * t), dtype="<f4")
    return payload.reshape(t, h, w).astype(np.float64)


def write_flo(path, flow: np.ndarray) -> None:
    h, w = flow.shape[:2]
    with open(path, "wb") as fh:
        fh.write(FLO_MAGIC)
        fh.write(struct.pack("<ii", w, h))
        fh.write(np.ascontiguousarray(flow, dtype="<f4").tobytes())


def flow_for_bars(bars_dir, destination, config: AdapterConfig) -> list:
    """Run every ``*.stvl`` frame pair through the network; returns the
    emitted file paths."""
    bars_dir = Path(bars_dir)
    destination = Path(destination)
    destination.mkdir(parents=True, exist_ok=True)
    model = load_checkpoint(config.checkpoint, map_location=config.device)
    model.to(config.device)

    emitted = []
    for stvl in sorted(bars_dir.glob("*.stvl")):
        frames = read_stvl(stvl)
        if frames.shape[0] != 2:
            raise ValueError(f"{stvl}: expected a frame pair, got {frames.shape[0]} frames")
        tensor = luminance_to_tensor(frames, config)[None].to(config.device)
        with torch.no_grad():
            flows = model(tensor)
        for level in EMITTED_LEVELS:
            flow = flows[level][0].permute(1, 2, 0).cpu().numpy()
            out = destination / f"{stvl.stem}_{level}.flo"
            write_flo(out, flow)
            emitted.append(out)
    return emitted
