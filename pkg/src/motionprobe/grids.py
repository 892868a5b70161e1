"""Cartesian parameter grids for stimulus sweeps.

A :class:`GridSpec` names a motion kind and an ordered set of axes. Each
axis is either a (start, stop, step) range, inclusive of both endpoints
when ``stop - start`` is an integer multiple of ``step``, or a
(start, stop, point-count) range sampled linearly including endpoints.

Specs serialize to a canonical key-value text form (one axis per line)
and are identified by a 64-bit FNV-1a hash of that serialization, which
tags every manifest and response file produced from the grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MOTION_KINDS = ("translation", "dilation", "rotation")


@dataclass(frozen=True)
class Axis:
    """One swept parameter: name, unit, and a range description."""

    name: str
    unit: str
    start: float
    stop: float
    step: float | None = None
    points: int | None = None

    def __post_init__(self):
        if (self.step is None) == (self.points is None):
            raise ValueError(f"axis {self.name}: exactly one of step/points required")
        if self.step is not None and self.step <= 0:
            raise ValueError(f"axis {self.name}: step must be positive, got {self.step}")
        if self.stop < self.start:
            raise ValueError(f"axis {self.name}: stop < start ({self.stop} < {self.start})")
        if self.points is not None and self.points < 1:
            raise ValueError(f"axis {self.name}: points must be >= 1")

    def values(self) -> np.ndarray:
        if self.points is not None:
            if self.points == 1:
                return np.asarray([self.start], dtype=np.float64)
            return np.linspace(self.start, self.stop, self.points)
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n, dtype=np.float64)

    def size(self) -> int:
        return len(self.values())


@dataclass(frozen=True)
class GridSpec:
    motion_kind: str
    axes: tuple[Axis, ...]

    def __post_init__(self):
        if self.motion_kind not in MOTION_KINDS:
            raise ValueError(f"unknown motion kind {self.motion_kind!r}")
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        object.__setattr__(self, "axes", tuple(self.axes))

    def axis_names(self) -> tuple[str, ...]:
        return tuple(ax.name for ax in self.axes)


def grid_size(spec: GridSpec) -> int:
    n = 1
    for ax in spec.axes:
        n *= ax.size()
    return n


def build_grid(spec: GridSpec):
    """Iterate the full Cartesian product of axis values, row-major."""
    value_lists = [ax.values().tolist() for ax in spec.axes]
    return itertools.product(*value_lists)


def grid_array(spec: GridSpec) -> np.ndarray:
    """Materialize the grid as an (n_tuples, n_axes) array, row-major."""
    values = [ax.values() for ax in spec.axes]
    mesh = np.meshgrid(*values, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def serialize_grid_spec(spec: GridSpec) -> str:
    lines = [f"motion_kind: {spec.motion_kind}"]
    for ax in spec.axes:
        parts = [f"name={ax.name}", f"unit={ax.unit}",
                 f"start={float(ax.start)!r}", f"stop={float(ax.stop)!r}"]
        if ax.step is not None:
            parts.append(f"step={float(ax.step)!r}")
        else:
            parts.append(f"points={ax.points}")
        lines.append("axis: " + " ".join(parts))
    return "\n".join(lines) + "\n"


def parse_grid_spec(text: str) -> GridSpec:
    motion_kind = None
    axes = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "motion_kind":
            motion_kind = rest
        elif key == "axis":
            fields = dict(tok.split("=", 1) for tok in rest.split())
            axes.append(Axis(
                name=fields["name"],
                unit=fields["unit"],
                start=float(fields["start"]),
                stop=float(fields["stop"]),
                step=float(fields["step"]) if "step" in fields else None,
                points=int(fields["points"]) if "points" in fields else None,
            ))
        else:
            raise ValueError(f"unknown grid spec line: {raw!r}")
    if motion_kind is None:
        raise ValueError("grid spec missing motion_kind")
    return GridSpec(motion_kind, tuple(axes))


def fnv1a_64(data: bytes) -> int:
    value = 0xCBF29CE484222325
    for byte in data:
        value ^= byte
        value = (value * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return value


def grid_spec_hash(spec: GridSpec) -> str:
    return f"{fnv1a_64(serialize_grid_spec(spec).encode('utf-8')):016x}"


# Canonical sweep grids. Half-wavelengths are in pixels, orientations and
# phases in degrees; conversion to cycles/pixel and radians happens at the
# stimulus-synthesis boundary only.

def translation_grid() -> GridSpec:
    return GridSpec("translation", (
        Axis("half_wavelength", "pixels", 16.0, 800.0, step=16.0),
        Axis("orientation", "degrees", 0.0, 350.0, step=10.0),
        Axis("temporal_frequency", "cycles/frame", 0.0, 0.5, step=0.01),
        Axis("phase", "degrees", -180.0, 170.0, step=10.0),
    ))


def dilation_grid() -> GridSpec:
    return GridSpec("dilation", (
        Axis("half_wavelength", "pixels", 50.0, 400.0, step=10.0),
        Axis("orientation", "degrees", 0.0, 170.0, step=10.0),
        Axis("scale_factor", "ratio", 0.5, 2.0, step=0.1),
        Axis("phase", "degrees", -180.0, 170.0, step=10.0),
    ))


def rotation_grid() -> GridSpec:
    # The angular-frequency axis spans +/- pi/2 radians/frame in 11 steps,
    # the stated radian equivalent of the published 0.1-cycles-per-sample
    # stepping.
    return GridSpec("rotation", (
        Axis("half_wavelength", "pixels", 50.0, 400.0, step=10.0),
        Axis("orientation", "degrees", 0.0, 170.0, step=10.0),
        Axis("angular_frequency", "radians/frame", -math.pi / 2, math.pi / 2, points=11),
        Axis("phase", "degrees", -180.0, 170.0, step=10.0),
    ))


DEFAULT_GRIDS = {
    "translation": translation_grid,
    "dilation": dilation_grid,
    "rotation": rotation_grid,
}
