"""Encoder-decoder optical-flow network with multi-scale flow outputs.

The contracting part halves the resolution six times (total stride 64);
predict-flow heads turn feature maps into dense two-channel flow at the
three coarsest decoder levels (f6, f4, f2). Predict-flow layers are 1x1
convolutions without bias, and all activations are plain ReLU.

``width`` scales every channel count; the default of 1.0 gives the
standard 1024-filter deepest layer.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


def _conv(in_ch: int, out_ch: int, kernel: int, stride: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, kernel, stride=stride, padding=kernel // 2),
        nn.ReLU(inplace=True),
    )


def _upconv(in_ch: int, out_ch: int) -> nn.Sequential:
    return nn.Sequential(
        nn.ConvTranspose2d(in_ch, out_ch, 4, stride=2, padding=1),
        nn.ReLU(inplace=True),
    )


class FlowEncoderDecoder(nn.Module):
    """Frame-pair in (6 channels), multi-level flow out."""

    def __init__(self, width: float = 1.0):
        super().__init__()
        ch = lambda n: max(2, int(round(n * width)))  # noqa: E731
        self.width = width
        self.conv1 = _conv(6, ch(64), 7, 2)
        self.conv2 = _conv(ch(64), ch(128), 5, 2)
        self.conv3_0 = _conv(ch(128), ch(256), 5, 2)
        self.conv3_1 = _conv(ch(256), ch(256), 3, 1)
        self.conv4_0 = _conv(ch(256), ch(512), 3, 2)
        self.conv4_1 = _conv(ch(512), ch(512), 3, 1)
        self.conv5_0 = _conv(ch(512), ch(512), 3, 2)
        self.conv5_1 = _conv(ch(512), ch(512), 3, 1)
        self.conv6_0 = _conv(ch(512), ch(1024), 3, 2)
        self.conv6_1 = _conv(ch(1024), ch(1024), 3, 1)

        self.predict_flow6 = nn.Conv2d(ch(1024), 2, 1, bias=False)
        self.upconv5 = _upconv(ch(1024), ch(512))
        cat5 = ch(512) + ch(512) + 2
        self.predict_flow5 = nn.Conv2d(cat5, 2, 1, bias=False)
        self.upconv4 = _upconv(cat5, ch(256))
        cat4 = ch(256) + ch(512) + 2
        self.predict_flow4 = nn.Conv2d(cat4, 2, 1, bias=False)
        self.upconv3 = _upconv(cat4, ch(128))
        cat3 = ch(128) + ch(256) + 2
        self.predict_flow3 = nn.Conv2d(cat3, 2, 1, bias=False)
        self.upconv2 = _upconv(cat3, ch(64))
        cat2 = ch(64) + ch(128) + 2
        self.predict_flow2 = nn.Conv2d(cat2, 2, 1, bias=False)

    @property
    def deepest_layer(self) -> str:
        return "conv6_1"

    @property
    def deepest_channels(self) -> int:
        return self.conv6_1[0].out_channels

    @staticmethod
    def _up(flow: torch.Tensor) -> torch.Tensor:
        return F.interpolate(flow, scale_factor=2, mode="bilinear", align_corners=False)

    def forward(self, frames: torch.Tensor) -> dict:
        """frames: (N, 6, H, W) with H, W divisible by 64.

        Returns flow maps keyed f6/f4/f2, units defined by the checkpoint
        (full-resolution pixels for checkpoints trained that way).
        """
        c1 = self.conv1(frames)
        c2 = self.conv2(c1)
        c3 = self.conv3_1(self.conv3_0(c2))
        c4 = self.conv4_1(self.conv4_0(c3))
        c5 = self.conv5_1(self.conv5_0(c4))
        c6 = self.conv6_1(self.conv6_0(c5))

        flow6 = self.predict_flow6(c6)
        cat5 = torch.cat([self.upconv5(c6), c5, self._up(flow6)], dim=1)
        flow5 = self.predict_flow5(cat5)
        cat4 = torch.cat([self.upconv4(cat5), c4, self._up(flow5)], dim=1)
        flow4 = self.predict_flow4(cat4)
        cat3 = torch.cat([self.upconv3(cat4), c3, self._up(flow4)], dim=1)
        flow3 = self.predict_flow3(cat3)
        cat2 = torch.cat([self.upconv2(cat3), c2, self._up(flow3)], dim=1)
        flow2 = self.predict_flow2(cat2)
        return {"f6": flow6, "f5": flow5, "f4": flow4, "f3": flow3, "f2": flow2}


def save_checkpoint(model: FlowEncoderDecoder, path) -> None:
    torch.save({"width": model.width, "state_dict": model.state_dict()}, path)


def load_checkpoint(path, map_location="cpu") -> FlowEncoderDecoder:
    payload = torch.load(path, map_location=map_location, weights_only=True)
    model = FlowEncoderDecoder(width=float(payload.get("width", 1.0)))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model


def resolve_layer(model: nn.Module, name: str) -> nn.Module:
    """Named submodule lookup with a clear failure mode."""
    modules = dict(model.named_modules())
    if name in modules:
        return modules[name]
    raise KeyError(f"layer {name!r} not found; available leaves include "
                   f"{sorted(n for n, m in modules.items() if not list(m.children()))[:12]}")
