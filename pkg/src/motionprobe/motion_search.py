"""Dilation and rotation gridsearches with temporal-aliasing admissibility.

Stimuli whose fastest-moving point would travel more than half a
wavelength per frame are excluded before synthesis: for a dilating wave
the displacement at the stimulus edge is ``(h - 1) * x_max``, for a
rotating wave the rim velocity is ``omega * m_max``. Excluded tuples are
recorded with their reason so the partition is auditable.

A filter's motion preference compares its peak over a dilation or
rotation grid against its translation peak; dominance requires a strictly
higher activation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fitting import PeakResponse, find_peak
from .grids import GridSpec, grid_array
from .probe import ResponseProvider, ResponseTable, run_gridsearch
from .stimuli import dilation_alias_check, rotation_alias_check


class MotionSpecError(ValueError):
    """Grid axes do not match the requested motion kind."""


MOTION_AXES = {
    "dilation": ("half_wavelength", "orientation", "scale_factor", "phase"),
    "rotation": ("half_wavelength", "orientation", "angular_frequency", "phase"),
}


def check_motion_spec(spec: GridSpec, kind: str) -> None:
    if kind not in MOTION_AXES:
        raise MotionSpecError(f"motion gridsearch kind must be dilation or rotation, got {kind!r}")
    if spec.motion_kind != kind or spec.axis_names() != MOTION_AXES[kind]:
        raise MotionSpecError(
            f"grid axes {spec.axis_names()} do not match {kind} "
            f"(expected {MOTION_AXES[kind]})")


def default_reach(kind: str, extent) -> float:
    """Farthest probed point from the center, per motion kind.

    Dilation uses the largest centered pixel coordinate ((W-1)/2); rotation
    uses half the receptive field size (W/2).
    """
    w = extent[0]
    if kind == "dilation":
        return (w - 1) / 2.0
    return w / 2.0


def admissibility(spec: GridSpec, kind: str, extent, *, reach: float | None = None):
    """(mask, reasons): per-tuple admissibility and reasons for exclusions."""
    check_motion_spec(spec, kind)
    if reach is None:
        reach = default_reach(kind, extent)
    rows = grid_array(spec)
    half_wl = rows[:, 0]
    wavelength = 2.0 * half_wl
    third = rows[:, 2]
    if kind == "dilation":
        mask = (third - 1.0) * reach <= 0.5 * wavelength
        label = "dilation_aliasing"
        detail = "(h-1)*x_max"
        travel = (third - 1.0) * reach
    else:
        mask = third * reach <= 0.5 * wavelength
        label = "rotation_aliasing"
        detail = "omega*m_max"
        travel = third * reach
    reasons = {}
    for sid in np.flatnonzero(~mask):
        reasons[int(sid)] = (f"{label}: {detail}={travel[sid]:g} exceeds "
                             f"half wavelength {0.5 * wavelength[sid]:g}")
    return mask, reasons


def run_motion_gridsearch(provider: ResponseProvider, spec: GridSpec, kind: str, *,
                          reach: float | None = None, chunk: int = 512):
    """Evaluate all admissible tuples; returns (table, exclusion reasons)."""
    mask, reasons = admissibility(spec, kind, provider.required_extent, reach=reach)
    table = run_gridsearch(provider, spec, admissible=mask, chunk=chunk)
    return table, reasons


def sanity_check_exclusions(spec: GridSpec, kind: str, extent,
                            excluded_ids, *, reach: float | None = None) -> bool:
    """Re-derive the exclusion set tuple by tuple through the scalar checks."""
    check_motion_spec(spec, kind)
    if reach is None:
        reach = default_reach(kind, extent)
    rows = grid_array(spec)
    expected = set()
    for sid in range(rows.shape[0]):
        wavelength = 2.0 * rows[sid, 0]
        third = rows[sid, 2]
        if kind == "dilation":
            ok = dilation_alias_check(third, wavelength, reach)
        else:
            ok = rotation_alias_check(third, reach, wavelength)
        if not ok:
            expected.add(sid)
    return expected == set(int(i) for i in excluded_ids)


@dataclass(frozen=True)
class MotionPreference:
    """Peak comparison between translation and dilation/rotation probing."""

    filter_id: int
    translation: PeakResponse
    dilation: PeakResponse | None = None
    rotation: PeakResponse | None = None

    @property
    def dilation_dominant(self) -> bool:
        return self.dilation is not None and self.dilation.activation > self.translation.activation

    @property
    def rotation_dominant(self) -> bool:
        return self.rotation is not None and self.rotation.activation > self.translation.activation


def compare_motion_preference(translation_table: ResponseTable,
                              motion_table: ResponseTable,
                              filter_id: int) -> MotionPreference:
    """Dominance holds only when the motion peak strictly exceeds translation."""
    trans_peak = find_peak(translation_table, filter_id)
    motion_peak = find_peak(motion_table, filter_id)
    kind = motion_table.spec.motion_kind
    if kind == "dilation":
        return MotionPreference(filter_id, trans_peak, dilation=motion_peak)
    if kind == "rotation":
        return MotionPreference(filter_id, trans_peak, rotation=motion_peak)
    raise MotionSpecError(f"motion table has kind {kind!r}")


def export_motion_scatter(preferences, kind: str, destination) -> None:
    """Scatter rows for preference plots: one line per dominant-or-not filter."""
    param_key = "scale_factor" if kind == "dilation" else "angular_frequency"
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("filter_id,half_wavelength,orientation,"
                 f"{param_key},phase,peak_activation,translation_peak,dominant\n")
        for pref in preferences:
            peak = pref.dilation if kind == "dilation" else pref.rotation
            dominant = pref.dilation_dominant if kind == "dilation" else pref.rotation_dominant
            p = peak.params
            fh.write(f"{pref.filter_id},{p['half_wavelength']:g},{p['orientation']:g},"
                     f"{p[param_key]:g},{p['phase']:g},{peak.activation:.9g},"
                     f"{pref.translation.activation:.9g},{int(dominant)}\n")


def export_exclusion_log(reasons: dict, destination) -> None:
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("stimulus_id,reason\n")
        for sid in sorted(reasons):
            fh.write(f'{sid},"{reasons[sid]}"\n')
