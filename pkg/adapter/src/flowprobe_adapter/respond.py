"""Measure center-unit activations for every manifest stimulus.

Output is the response-table CSV the analysis toolkit ingests: a
``grid_spec_hash`` comment, a ``filter_count`` comment, a header row, then
one ``stimulus_id,filter_id,activation`` row per pair, activations printed
to 9 significant digits. Runs are resumable: stimulus ids already present
in the output file are skipped.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .model import load_checkpoint, resolve_layer
from .rendering import AdapterConfig, read_manifest, wave_to_tensor

RESPONSE_HEADER = "stimulus_id,filter_id,activation"


def center_activations(model, layer, batch: torch.Tensor) -> np.ndarray:
    """Per-filter activations of the feature map's center unit, (n, C)."""
    captured = {}

    def hook(_module, _inputs, output):
        captured["features"] = output.detach()

    handle = layer.register_forward_hook(hook)
    try:
        with torch.no_grad():
            model(batch)
    finally:
        handle.remove()
    features = captured["features"]
    row = features.shape[2] // 2
    col = features.shape[3] // 2
    return features[:, :, row, col].cpu().numpy()


def _completed_ids(path: Path) -> set:
    done = set()
    if not path.exists():
        return done
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("stimulus_id") or not line.strip():
                continue
            done.add(int(line.split(",", 1)[0]))
    return done


def render_and_respond(manifest_path, destination, config: AdapterConfig,
                       *, limit: int | None = None) -> int:
    """Evaluate manifest stimuli through the checkpoint; returns rows written."""
    header, records = read_manifest(manifest_path)
    if limit is not None:
        records = records[:limit]
    model = load_checkpoint(config.checkpoint, map_location=config.device)
    model.to(config.device)
    layer = resolve_layer(model, config.layer)

    destination = Path(destination)
    done = _completed_ids(destination)
    fresh = not destination.exists()
    written = 0
    with open(destination, "a", encoding="utf-8", newline="\n") as fh:
        if fresh:
            fh.write(f"# grid_spec_hash={header['grid_spec_hash']}\n")
            fh.write(f"# filter_count={_filter_count(model, config)}\n")
            fh.write(RESPONSE_HEADER + "\n")
        pending = [r for r in records if r["stimulus_id"] not in done]
        for start in range(0, len(pending), config.batch_size):
            chunk = pending[start:start + config.batch_size]
            batch = torch.stack([wave_to_tensor(r, config) for r in chunk])
            batch = batch.to(config.device)
            activations = center_activations(model, layer, batch)
            for record, row in zip(chunk, activations):
                sid = record["stimulus_id"]
                for fid, value in enumerate(row):
                    fh.write(f"{sid},{fid},{np.float32(value):.9g}\n")
                    written += 1
    return written


def _filter_count(model, config: AdapterConfig) -> int:
    layer = resolve_layer(model, config.layer)
    for module in reversed(list(layer.modules())):
        if hasattr(module, "out_channels"):
            return int(module.out_channels)
    raise ValueError(f"cannot infer filter count of layer {config.layer!r}")
