"""Spatiotemporal Gabor filters and the nonlinear response model.

A filter kernel is the pointwise product of a non-normalized Gaussian

    w(x, y, t) = exp(-(x_r^2/sx^2 + y_r^2/sy^2 + t_c^2/st^2))

and a translating plane wave sharing its orientation. The Gaussian is
pinned to the center pixel spatially and to ``(T - 1) / 2`` temporally,
so a two-frame kernel is centered between the frames.

The measured response of a unit to a stimulus is modeled as

    r = max(0, gain * (<stimulus, kernel> + bias))

where ``<.,.>`` is the full dot product over all samples. Because of the
bias and the rectification, the apparent tuning width of the model
differs from the Gaussian's: bandwidths are therefore measured on the
rectified response curves, not read off the sigmas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .stimuli import translating_wave_batch
from .volume import Volume, coordinate_grids, require_odd_spatial


@dataclass(frozen=True)
class GaborParams:
    """The nine response-model parameters.

    Units: spatial_frequency cycles/pixel, orientation and phase radians,
    temporal_frequency cycles/frame, sigma_x/sigma_y pixels, sigma_t
    frames, gain and bias in activation units.
    """

    spatial_frequency: float
    orientation: float
    temporal_frequency: float
    phase: float
    sigma_x: float
    sigma_y: float
    sigma_t: float
    gain: float = 1.0
    bias: float = 0.0

    def __post_init__(self):
        if not self.spatial_frequency > 0:
            raise ValueError(f"spatial_frequency must be > 0, got {self.spatial_frequency}")
        if abs(self.temporal_frequency) > 0.5 + 1e-12:
            raise ValueError("temporal_frequency beyond the Nyquist limit of 0.5 cycles/frame")
        for name in ("sigma_x", "sigma_y", "sigma_t"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.gain > 0:
            raise ValueError("gain must be positive")

    @property
    def half_wavelength(self) -> float:
        return 1.0 / (2.0 * self.spatial_frequency)

    @property
    def frequency_components(self) -> tuple[float, float]:
        """(f_x, f_y) in cycles/pixel."""
        return (self.spatial_frequency * math.cos(self.orientation),
                self.spatial_frequency * math.sin(self.orientation))


def preferred_velocity(params: GaborParams) -> float:
    """Speed the filter is tuned to, pixels/frame."""
    return params.temporal_frequency / params.spatial_frequency


def gaussian_envelope(params: GaborParams, extent) -> Volume:
    """Oriented Gaussian window, value 1 at the space-time center."""
    require_odd_spatial(extent)
    x, y, t = coordinate_grids(extent)
    c = math.cos(params.orientation)
    s = math.sin(params.orientation)
    xr = x * c + y * s
    yr = -x * s + y * c
    tc = t - (extent[2] - 1) / 2.0
    arg = (xr / params.sigma_x) ** 2 + (yr / params.sigma_y) ** 2 + (tc / params.sigma_t) ** 2
    return Volume(np.exp(-arg))


def gabor_kernel(params: GaborParams, extent) -> Volume:
    """Gaussian-windowed translating wave."""
    envelope = gaussian_envelope(params, extent).samples
    wave = translating_wave_batch(
        [params.spatial_frequency], [params.orientation],
        [params.temporal_frequency], [params.phase], extent)[0]
    return Volume(envelope * wave)


def unit_response(params: GaborParams, stimulus: Volume) -> float:
    """Rectified affine response of the model filter to one stimulus."""
    kernel = gabor_kernel(params, stimulus.extent)
    dot = float(np.vdot(stimulus.samples, kernel.samples))
    return max(0.0, params.gain * (dot + params.bias))


def wave_response_curve(params: GaborParams, axis: str, values, extent, *,
                        chunk: int = 2048) -> np.ndarray:
    """Model response to unit waves sweeping one parameter.

    ``axis`` is one of ``spatial_frequency``, ``orientation``,
    ``temporal_frequency``; the other wave parameters sit at the filter's
    own values. The probe waves are phase-referenced at the kernel's
    temporal center so that the matched probe reproduces the carrier
    exactly and off-peak probes measure tuning attenuation rather than
    interference with the window offset; the probe at the filter's own
    parameters is always the same wave the kernel carries.
    """
    if axis not in ("spatial_frequency", "orientation", "temporal_frequency"):
        raise ValueError(f"unknown response-curve axis {axis!r}")
    values = np.asarray(values, dtype=np.float64)
    kernel = gabor_kernel(params, extent).samples.ravel()
    base = {
        "spatial_frequency": np.full(len(values), params.spatial_frequency),
        "orientation": np.full(len(values), params.orientation),
        "temporal_frequency": np.full(len(values), params.temporal_frequency),
    }
    base[axis] = values
    t_center = (extent[2] - 1) / 2.0
    centered_phase = params.phase - 2.0 * math.pi * params.temporal_frequency * t_center
    phases = np.full(len(values), centered_phase)
    pre = np.empty(len(values), dtype=np.float64)
    for lo in range(0, len(values), chunk):
        hi = min(lo + chunk, len(values))
        waves = translating_wave_batch(
            base["spatial_frequency"][lo:hi], base["orientation"][lo:hi],
            base["temporal_frequency"][lo:hi], phases[lo:hi], extent,
            time_origin=t_center)
        pre[lo:hi] = waves.reshape(hi - lo, -1) @ kernel
    return np.maximum(0.0, params.gain * (pre + params.bias))


def model_peak_response(params: GaborParams, extent) -> float:
    """Response at the filter's own parameters (top of the tuning curves)."""
    return float(wave_response_curve(
        params, "temporal_frequency", [params.temporal_frequency], extent)[0])


@dataclass(frozen=True)
class Bandwidths:
    """Half-magnitude widths of the three tuning curves.

    spatial_octaves is log2 of the ratio of the two crossing frequencies;
    orientation_degrees and temporal_cycles are plain widths. ``truncated``
    and ``multi_lobe`` flag, per axis in (spatial, orientation, temporal)
    order, crossings clipped at the sampled domain edge and curves with
    more than one lobe above half maximum.
    """

    spatial_octaves: float
    orientation_degrees: float
    temporal_cycles: float
    truncated: tuple[bool, bool, bool]
    multi_lobe: tuple[bool, bool, bool]


#: Sampled domains for bandwidth measurement: spatial frequency spans the
#: probing grid's wavelength range, orientation a full turn about the peak,
#: temporal frequency the alias-free band.
BANDWIDTH_FREQ_RANGE = (1.0 / 1600.0, 1.0 / 32.0)


def _lobe_crossings(xs: np.ndarray, ys: np.ndarray, level: float):
    """Half-level crossings of the lobe containing the global maximum.

    Returns (lo, hi, truncated_lo, truncated_hi, multi_lobe). Crossings are
    linearly interpolated; a missing crossing reports the domain edge with
    its truncated flag set.
    """
    peak = int(np.argmax(ys))
    if ys[peak] < level:
        raise ValueError("curve peak below the requested half-magnitude level")
    above = ys >= level
    transitions = int(np.count_nonzero(np.diff(above.astype(np.int8)) != 0))
    multi = transitions > 2

    lo, truncated_lo = xs[0], True
    for i in range(peak - 1, -1, -1):
        if ys[i] < level:
            frac = (level - ys[i]) / (ys[i + 1] - ys[i])
            lo, truncated_lo = xs[i] + frac * (xs[i + 1] - xs[i]), False
            break
    hi, truncated_hi = xs[-1], True
    for i in range(peak + 1, len(ys)):
        if ys[i] < level:
            frac = (level - ys[i - 1]) / (ys[i] - ys[i - 1])
            hi, truncated_hi = xs[i - 1] + frac * (xs[i] - xs[i - 1]), False
            break
    return float(lo), float(hi), truncated_lo, truncated_hi, multi


def half_magnitude_bandwidths(params: GaborParams, peak_response: float, extent,
                              samples: int = 2001,
                              freq_range: tuple[float, float] | None = None) -> Bandwidths:
    """Measure half-magnitude bandwidths on the rectified response curves.

    The spatial-frequency curve spans the probing grid's range by default,
    widened if needed so the filter's own frequency is always inside it.
    """
    if not peak_response > 0:
        raise ValueError("peak_response must be positive")
    level = peak_response / 2.0

    if freq_range is None:
        freq_range = (min(BANDWIDTH_FREQ_RANGE[0], params.spatial_frequency / 4.0),
                      max(BANDWIDTH_FREQ_RANGE[1], min(4.0 * params.spatial_frequency, 0.5)))
    freq_values = np.geomspace(freq_range[0], freq_range[1], samples)
    theta_values = params.orientation + np.linspace(-math.pi, math.pi, samples, endpoint=False)
    ft_values = np.linspace(-0.5, 0.5, samples)

    f_curve = wave_response_curve(params, "spatial_frequency", freq_values, extent)
    t_curve = wave_response_curve(params, "orientation", theta_values, extent)
    ft_curve = wave_response_curve(params, "temporal_frequency", ft_values, extent)

    f_lo, f_hi, f_tl, f_th, f_multi = _lobe_crossings(freq_values, f_curve, level)
    t_lo, t_hi, t_tl, t_th, t_multi = _lobe_crossings(theta_values, t_curve, level)
    ft_lo, ft_hi, ft_tl, ft_th, ft_multi = _lobe_crossings(ft_values, ft_curve, level)

    return Bandwidths(
        spatial_octaves=math.log2(f_hi / f_lo),
        orientation_degrees=math.degrees(t_hi - t_lo),
        temporal_cycles=ft_hi - ft_lo,
        truncated=(f_tl or f_th, t_tl or t_th, ft_tl or ft_th),
        multi_lobe=(f_multi, t_multi, ft_multi),
    )


# --- CSV row form ---------------------------------------------------------

GABOR_CSV_COLUMNS = (
    "spatial_frequency", "orientation", "temporal_frequency", "phase",
    "sigma_x", "sigma_y", "sigma_t", "gain", "bias",
)
GABOR_CSV_UNITS = (
    "cycles/pixel", "radians", "cycles/frame", "radians",
    "pixels", "pixels", "frames", "gain", "activation",
)


def gabor_csv_row(params: GaborParams) -> str:
    return ",".join(repr(float(getattr(params, col))) for col in GABOR_CSV_COLUMNS)


def gabor_from_csv_row(row: str) -> GaborParams:
    parts = row.strip().split(",")
    if len(parts) != len(GABOR_CSV_COLUMNS):
        raise ValueError(f"expected {len(GABOR_CSV_COLUMNS)} columns, got {len(parts)}")
    return GaborParams(**{col: float(val) for col, val in zip(GABOR_CSV_COLUMNS, parts)})


def save_bank_csv(path, filters) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(GABOR_CSV_COLUMNS) + "\n")
        for params in filters:
            fh.write(gabor_csv_row(params) + "\n")


def load_bank_csv(path) -> list[GaborParams]:
    filters = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.split(",") != list(GABOR_CSV_COLUMNS):
            raise ValueError(f"{path}: unexpected bank header {header!r}")
        for line in fh:
            if line.strip():
                filters.append(gabor_from_csv_row(line))
    return filters
