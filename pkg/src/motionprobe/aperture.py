"""Aperture-problem harness: bar pairs in, multi-resolution flow maps out.

Bars are diagonal (45 degrees), displaced along their own axis so only
their endpoints reveal the true motion; the harness measures the end-point
error at the map cell containing the bar's center pixel, per flow level.
Flow maps arrive in Middlebury ``.flo`` files at the levels a contracting-
expanding flow network emits: ``f6``/``f4``/``f2`` at 1/64, 1/16, and 1/4
of the input resolution, with values always in full-resolution pixels.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from .stimuli import gen_bar_sequence

FLO_MAGIC = b"PIEH"
LEVEL_FACTORS = {"f6": 64, "f4": 16, "f2": 4}
DEFAULT_MAGNITUDE = 64.0

_DIAG = 1.0 / math.sqrt(2.0)
DIRECTIONS = {
    "up_right": (_DIAG, _DIAG),
    "down_left": (-_DIAG, -_DIAG),
}


class MissingFlowError(FileNotFoundError):
    """A (scale, direction, level) flow map is unavailable."""


@dataclass(frozen=True, eq=False)
class FlowMap:
    """Dense (u, v) field at one pyramid level, shape (H_cells, W_cells, 2)."""

    level: str
    values: np.ndarray

    def __post_init__(self):
        if self.level not in LEVEL_FACTORS:
            raise ValueError(f"unknown flow level {self.level!r}")
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError(f"flow values must be (H, W, 2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("flow values must be finite")
        object.__setattr__(self, "values", arr)

    @property
    def factor(self) -> int:
        return LEVEL_FACTORS[self.level]

    def check_input_size(self, input_size) -> None:
        w, h = input_size
        expect = (h // self.factor, w // self.factor)
        if self.values.shape[:2] != expect:
            raise ValueError(
                f"{self.level} map is {self.values.shape[:2]}, expected {expect} "
                f"for a {w}x{h} input")


def write_flo(path, flow: np.ndarray) -> None:
    """Write (H, W, 2) flow in the Middlebury format."""
    flow = np.asarray(flow, dtype=np.float32)
    if flow.ndim != 3 or flow.shape[2] != 2:
        raise ValueError(f"flow must be (H, W, 2), got {flow.shape}")
    h, w = flow.shape[:2]
    with open(path, "wb") as fh:
        fh.write(FLO_MAGIC)
        fh.write(struct.pack("<ii", w, h))
        fh.write(np.ascontiguousarray(flow, dtype="<f4").tobytes())


def read_flo(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != FLO_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {FLO_MAGIC!r}")
        w, h = struct.unpack("<ii", fh.read(8))
        payload = fh.read(8 * w * h)
        if len(payload) != 8 * w * h:
            raise ValueError(f"{path}: truncated flow payload")
    return np.frombuffer(payload, dtype="<f4").reshape(h, w, 2).astype(np.float64)


def epe(estimate, ground_truth) -> float:
    """End-point error: Euclidean distance between two flow vectors."""
    est = np.asarray(estimate, dtype=np.float64)
    gt = np.asarray(ground_truth, dtype=np.float64)
    return float(np.hypot(est[0] - gt[0], est[1] - gt[1]))


@dataclass(frozen=True)
class ApertureCase:
    """One bar trial: length, motion vector, and the bar-center location."""

    scale: float
    direction: str
    motion: tuple[float, float]
    center: tuple[float, float]       # full-resolution pixel indices (x, y)
    provider_tag: str = ""

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")


def make_case(scale: float, direction: str, *, input_size=(512, 384),
              magnitude: float = DEFAULT_MAGNITUDE, provider_tag: str = "") -> ApertureCase:
    dx, dy = DIRECTIONS[direction]
    motion = (magnitude * dx, magnitude * dy)
    w, h = input_size
    center = ((w - 1) / 2.0, (h - 1) / 2.0)
    return ApertureCase(scale, direction, motion, center, provider_tag)


def bar_pair_for_case(case: ApertureCase, *, input_size=(512, 384)):
    """The two-frame bar volume and its dense ground-truth flow."""
    extent = (input_size[0], input_size[1], 2)
    return gen_bar_sequence(case.scale, case.motion, extent)


def center_error(flow: FlowMap, case: ApertureCase, *, input_size=(512, 384)) -> float:
    """EPE between the flow at the bar-center cell and the true motion."""
    flow.check_input_size(input_size)
    col = int(math.floor(case.center[0] / flow.factor))
    row = int(math.floor(case.center[1] / flow.factor))
    h, w = flow.values.shape[:2]
    if not (0 <= row < h and 0 <= col < w):
        raise ValueError(f"bar center cell ({row}, {col}) outside the {h}x{w} {flow.level} map")
    return epe(flow.values[row, col], case.motion)


class FlowSource(Protocol):
    def get(self, scale: float, direction: str, level: str) -> FlowMap: ...


class DirectoryFlowSource:
    """Flow maps in a directory named ``scale{S:g}_{direction}_{level}.flo``."""

    def __init__(self, directory):
        self.directory = Path(directory)

    @staticmethod
    def filename(scale: float, direction: str, level: str) -> str:
        return f"scale{scale:g}_{direction}_{level}.flo"

    def get(self, scale: float, direction: str, level: str) -> FlowMap:
        path = self.directory / self.filename(scale, direction, level)
        if not path.exists():
            raise MissingFlowError(
                f"no flow map for scale={scale:g} direction={direction} level={level} "
                f"(expected {path})")
        return FlowMap(level, read_flo(path))


class GroundTruthFlowSource:
    """Oracle source: the bar's own ground-truth flow, occupancy-pooled.

    A cell carries the motion vector when any bar pixel (union of the two
    frames) falls inside it, so the center cell is always covered.
    """

    def __init__(self, *, input_size=(512, 384), magnitude: float = DEFAULT_MAGNITUDE):
        self.input_size = input_size
        self.magnitude = magnitude

    def get(self, scale: float, direction: str, level: str) -> FlowMap:
        case = make_case(scale, direction, input_size=self.input_size,
                         magnitude=self.magnitude)
        _, gt = bar_pair_for_case(case, input_size=self.input_size)
        factor = LEVEL_FACTORS[level]
        w, h = self.input_size
        covered = (gt[0] != 0) | (gt[1] != 0)
        cells = np.zeros((h // factor, w // factor, 2), dtype=np.float64)
        pooled = covered[:(h // factor) * factor, :(w // factor) * factor]
        pooled = pooled.reshape(h // factor, factor, w // factor, factor).any(axis=(1, 3))
        cells[pooled, 0] = case.motion[0]
        cells[pooled, 1] = case.motion[1]
        return FlowMap(level, cells)


@dataclass(frozen=True)
class SweepRow:
    scale: float
    level: str
    epe_mean: float
    epe_by_direction: dict

    def __post_init__(self):
        if self.epe_mean < 0:
            raise ValueError("EPE cannot be negative")


def run_sweep(scales, source: FlowSource, *, directions=("up_right", "down_left"),
              levels=("f6", "f4", "f2"), input_size=(512, 384),
              magnitude: float = DEFAULT_MAGNITUDE, provider_tag: str = "") -> list[SweepRow]:
    """Center EPE per (scale, level), averaged over bar directions."""
    rows = []
    for scale in scales:
        for level in levels:
            per_direction = {}
            for direction in directions:
                case = make_case(scale, direction, input_size=input_size,
                                 magnitude=magnitude, provider_tag=provider_tag)
                flow = source.get(scale, direction, level)
                per_direction[direction] = center_error(flow, case, input_size=input_size)
            rows.append(SweepRow(
                scale=float(scale), level=level,
                epe_mean=float(np.mean(list(per_direction.values()))),
                epe_by_direction=per_direction))
    return rows


def export_sweep_csv(rows, destination, *, provider_tag: str = "") -> None:
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("provider,scale,level,epe_mean,epe_up_right,epe_down_left\n")
        for row in rows:
            up = row.epe_by_direction.get("up_right", float("nan"))
            down = row.epe_by_direction.get("down_left", float("nan"))
            fh.write(f"{provider_tag},{row.scale:g},{row.level},"
                     f"{row.epe_mean:.9g},{up:.9g},{down:.9g}\n")
