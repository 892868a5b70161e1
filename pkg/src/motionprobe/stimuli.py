"""Probe stimulus synthesis.

Translating, dilating and rotating plane waves, occlusion patterns, and
moving bars, all sampled on the centered grid of :mod:`motionprobe.volume`.
Wave values are zero-mean in [-1, 1]; mapping to a particular consumer's
input range is the consumer's job.

The translating wave is
``cos(2*pi*(F*x_r - f_t*t) + phase)`` with ``x_r`` the coordinate rotated
into the wave's orientation. A positive orientation rotates clockwise with
respect to the positive x-axis:

    x_r =  x*cos(a) + y*sin(a)
    y_r = -x*sin(a) + y*cos(a)

The dilating wave replaces the moving carrier with a scaling one,
``cos(2*pi*F*(x_r - alpha*x_r*t) + phase)`` where ``alpha = 1 - 1/h`` and
``h`` is the per-frame-pair affine scale factor. The rotating wave spins
the orientation at a constant angular rate: ``x_r(t)`` uses angle
``a + omega*t``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .volume import Volume, coordinate_grids, require_odd_spatial, spatial_coords, validate_extent

TWO_PI = 2.0 * math.pi

#: Default probe extent: the receptive field of the deepest-layer unit the
#: default grids were designed around, two frames deep.
DEFAULT_EXTENT = (383, 383, 2)

#: Canvas for bar pairs, matching the standard flow-network input.
BAR_EXTENT = (512, 384, 2)


class AliasedStimulusError(ValueError):
    """Temporal frequency at or beyond Nyquist without an explicit override."""


@dataclass(frozen=True)
class TranslatingWaveParams:
    """Plane wave moving at constant velocity.

    spatial_frequency: cycles/pixel (> 0)
    orientation: radians, normalized to [0, 2*pi)
    temporal_frequency: cycles/frame
    phase: radians
    """

    spatial_frequency: float
    orientation: float
    temporal_frequency: float
    phase: float = 0.0

    def __post_init__(self):
        if not self.spatial_frequency > 0:
            raise ValueError(f"spatial_frequency must be > 0, got {self.spatial_frequency}")
        object.__setattr__(self, "orientation", float(self.orientation) % TWO_PI)

    @property
    def half_wavelength(self) -> float:
        return 1.0 / (2.0 * self.spatial_frequency)

    @property
    def velocity(self) -> float:
        """Speed along the wave normal, pixels/frame."""
        return self.temporal_frequency / self.spatial_frequency


@dataclass(frozen=True)
class DilatingWaveParams:
    """Wave whose pattern scales by ``scale_factor`` per frame pair."""

    spatial_frequency: float
    orientation: float
    scale_factor: float
    phase: float = 0.0

    def __post_init__(self):
        if not self.spatial_frequency > 0:
            raise ValueError(f"spatial_frequency must be > 0, got {self.spatial_frequency}")
        if self.scale_factor == 0:
            raise ValueError("scale_factor must be nonzero")
        object.__setattr__(self, "orientation", float(self.orientation) % TWO_PI)

    @property
    def dilation_rate(self) -> float:
        """alpha = 1 - 1/h, the fractional shrink per frame."""
        return 1.0 - 1.0 / self.scale_factor


@dataclass(frozen=True)
class RotatingWaveParams:
    """Wave whose orientation advances by ``angular_frequency`` per frame."""

    spatial_frequency: float
    orientation: float
    angular_frequency: float
    phase: float = 0.0

    def __post_init__(self):
        if not self.spatial_frequency > 0:
            raise ValueError(f"spatial_frequency must be > 0, got {self.spatial_frequency}")
        object.__setattr__(self, "orientation", float(self.orientation) % TWO_PI)


@dataclass(frozen=True)
class OcclusionParams:
    """Two waves split by a moving step edge under a Gaussian window.

    The boundary is a vertical line starting at ``boundary_x`` and
    translating with the occluder wave's horizontal velocity component.
    ``envelope_sigma`` defaults to the occluder's full wavelength.
    """

    occluder: TranslatingWaveParams
    occluded: TranslatingWaveParams
    boundary_x: float = 0.0
    envelope_sigma: float | None = None

    def __post_init__(self):
        if self.envelope_sigma is not None and not self.envelope_sigma > 0:
            raise ValueError("envelope_sigma must be positive")


def rotate_coords(x, y, angle):
    """Rotate coordinates clockwise with respect to the positive x-axis."""
    c = np.cos(angle)
    s = np.sin(angle)
    return x * c + y * s, -x * s + y * c


def _check_nyquist(temporal_frequency: float, allow_aliasing: bool) -> None:
    if abs(temporal_frequency) > 0.5 + 1e-12 and not allow_aliasing:
        raise AliasedStimulusError(
            f"|temporal_frequency|={abs(temporal_frequency)} exceeds the Nyquist limit of "
            "0.5 cycles/frame; pass allow_aliasing=True to generate it anyway")


def translating_wave_batch(freqs, orients, temp_freqs, phases, extent, *,
                           time_origin: float = 0.0) -> np.ndarray:
    """Vectorized translating waves; returns (n, T, H, W) float64.

    ``time_origin`` shifts the temporal phase reference; frame indexing
    starts the clock at frame 0 (the default), spectral simulations
    reference the sequence center instead.
    """
    require_odd_spatial(extent)
    x, y, t = coordinate_grids(extent)
    f = np.asarray(freqs, dtype=np.float64)[:, None, None, None]
    a = np.asarray(orients, dtype=np.float64)[:, None, None, None]
    ft = np.asarray(temp_freqs, dtype=np.float64)[:, None, None, None]
    ph = np.asarray(phases, dtype=np.float64)[:, None, None, None]
    xr = x[None] * np.cos(a) + y[None] * np.sin(a)      # (n, 1, H, W)
    arg = TWO_PI * (f * xr - ft * (t[None] - time_origin)) + ph   # (n, T, H, W)
    return np.cos(arg)


def dilating_wave_batch(freqs, orients, scale_factors, phases, extent, *,
                        time_origin: float = 0.0) -> np.ndarray:
    require_odd_spatial(extent)
    x, y, t = coordinate_grids(extent)
    f = np.asarray(freqs, dtype=np.float64)[:, None, None, None]
    a = np.asarray(orients, dtype=np.float64)[:, None, None, None]
    h = np.asarray(scale_factors, dtype=np.float64)[:, None, None, None]
    ph = np.asarray(phases, dtype=np.float64)[:, None, None, None]
    if np.any(h == 0):
        raise ValueError("scale factors must be nonzero")
    alpha = 1.0 - 1.0 / h
    xr = x[None] * np.cos(a) + y[None] * np.sin(a)
    arg = TWO_PI * f * (xr - alpha * xr * (t[None] - time_origin)) + ph
    return np.cos(arg)


def rotating_wave_batch(freqs, orients, angular_freqs, phases, extent, *,
                        time_origin: float = 0.0) -> np.ndarray:
    require_odd_spatial(extent)
    x, y, t = coordinate_grids(extent)
    f = np.asarray(freqs, dtype=np.float64)[:, None, None, None]
    a = np.asarray(orients, dtype=np.float64)[:, None, None, None]
    om = np.asarray(angular_freqs, dtype=np.float64)[:, None, None, None]
    ph = np.asarray(phases, dtype=np.float64)[:, None, None, None]
    angle = a + om * (t[None] - time_origin)             # (n, T, 1, 1)
    xr = x[None] * np.cos(angle) + y[None] * np.sin(angle)
    arg = TWO_PI * f * xr + ph
    return np.cos(arg)


def gen_translating_wave(params: TranslatingWaveParams, extent=DEFAULT_EXTENT, *,
                         allow_aliasing: bool = False) -> Volume:
    _check_nyquist(params.temporal_frequency, allow_aliasing)
    samples = translating_wave_batch(
        [params.spatial_frequency], [params.orientation],
        [params.temporal_frequency], [params.phase], extent)[0]
    return Volume(samples)


def gen_dilating_wave(params: DilatingWaveParams, extent=DEFAULT_EXTENT) -> Volume:
    samples = dilating_wave_batch(
        [params.spatial_frequency], [params.orientation],
        [params.scale_factor], [params.phase], extent)[0]
    return Volume(samples)


def gen_rotating_wave(params: RotatingWaveParams, extent=DEFAULT_EXTENT) -> Volume:
    samples = rotating_wave_batch(
        [params.spatial_frequency], [params.orientation],
        [params.angular_frequency], [params.phase], extent)[0]
    return Volume(samples)


def probe_wave(fx: float, fy: float, ft: float, phase: float, extent, *,
               time_origin: float = 0.0) -> Volume:
    """Wave from raw signed frequency components (spectral-analysis probe)."""
    require_odd_spatial(extent)
    w, h, t_n = validate_extent(extent)
    x, y, t = coordinate_grids(extent)
    arg = TWO_PI * (fx * x + fy * y - ft * (t - time_origin)) + phase
    return Volume(np.cos(np.broadcast_to(arg, (t_n, h, w))))


def gen_occlusion_stimulus(params: OcclusionParams, extent=(65, 65, 8)) -> Volume:
    """Occluder wave over a moving step edge, occluded wave behind it.

    The Gaussian window keeps the pattern local; the step travels with the
    occluder so the edge and the occluding texture move together.
    """
    require_odd_spatial(extent)
    a, b = params.occluder, params.occluded
    if (a.spatial_frequency == b.spatial_frequency
            and a.orientation == b.orientation
            and a.temporal_frequency == b.temporal_frequency):
        warnings.warn("occluder and occluded waves are identical; the boundary is invisible",
                      stacklevel=2)
    sigma = params.envelope_sigma
    if sigma is None:
        sigma = 1.0 / a.spatial_frequency
    x, y, t = coordinate_grids(extent)
    wave_a = gen_translating_wave(a, extent, allow_aliasing=True).samples
    wave_b = gen_translating_wave(b, extent, allow_aliasing=True).samples
    envelope = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    boundary = params.boundary_x + a.velocity * np.cos(a.orientation) * t
    step = (x >= boundary).astype(np.float64)            # (T, 1, W)
    mixed = step * wave_a + (1.0 - step) * wave_b
    return Volume(envelope * mixed)


_BAR_AXIS = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))


def bar_width_for_scale(scale: float) -> float:
    """Bar width: scale/6 rounded, at least 3 px."""
    return float(max(3, round(scale / 6.0)))


def gen_bar_sequence(scale: float, motion, extent=BAR_EXTENT, width: float | None = None):
    """Two frames of a diagonal bar displaced by ``motion``, plus dense flow.

    The bar (foreground 1.0, background 0.0) has length ``scale``, runs at
    45 degrees, and is centered on the canvas in the first frame. Ground
    truth equals ``motion`` on the union of the two frames' bar pixels and
    zero elsewhere, channel order (u, v).

    Returns (Volume with T=2, flow array of shape (2, H, W)).
    """
    w, h, t = validate_extent(extent)
    if t != 2:
        raise ValueError("bar sequences are frame pairs; extent frames must be 2")
    if scale <= 0:
        raise ValueError("scale must be positive")
    ux, uy = (float(motion[0]), float(motion[1]))
    if math.hypot(ux, uy) >= min(w, h) / 2:
        raise ValueError("motion magnitude must stay below half the frame size")
    if width is None:
        width = bar_width_for_scale(scale)
    if width <= 0:
        raise ValueError("width must be positive")

    ax, ay = _BAR_AXIS
    # Frame centers: frame 0 at the canvas center, frame 1 displaced by u.
    centers = ((0.0, 0.0), (ux, uy))
    half_len = scale / 2.0
    half_wid = width / 2.0
    for cx, cy in centers:
        reach_x = abs(cx) + half_len * abs(ax) + half_wid * abs(ay)
        reach_y = abs(cy) + half_len * abs(ay) + half_wid * abs(ax)
        if reach_x > (w - 1) / 2.0 or reach_y > (h - 1) / 2.0:
            raise ValueError(f"bar of scale {scale} exceeds the {w}x{h} frame")

    x, y = spatial_coords((w, h, t))
    xg = x[None, :]
    yg = y[:, None]
    frames = np.zeros((2, h, w), dtype=np.float64)
    masks = []
    for frame, (cx, cy) in enumerate(centers):
        dx = xg - cx
        dy = yg - cy
        along = dx * ax + dy * ay
        across = -dx * ay + dy * ax
        mask = (np.abs(along) <= half_len) & (np.abs(across) <= half_wid)
        frames[frame][mask] = 1.0
        masks.append(mask)
    union = masks[0] | masks[1]
    flow = np.zeros((2, h, w), dtype=np.float64)
    flow[0][union] = ux
    flow[1][union] = uy
    return Volume(frames), flow


def dilation_alias_check(scale_factor: float, wavelength: float, x_max: float) -> bool:
    """Per-frame displacement of a dilating wave stays below half a wavelength.

    The fastest-moving point sits at ``x_max``; its displacement per frame is
    ``(h - 1) * x_max``.
    """
    if wavelength <= 0 or x_max <= 0:
        raise ValueError("wavelength and x_max must be positive")
    return (scale_factor - 1.0) * x_max <= 0.5 * wavelength


def rotation_alias_check(angular_frequency: float, m_max: float, wavelength: float) -> bool:
    """Rim velocity ``omega * m_max`` stays below half a wavelength per frame."""
    if wavelength <= 0 or m_max <= 0:
        raise ValueError("wavelength and m_max must be positive")
    return angular_frequency * m_max <= 0.5 * wavelength


# --- grid-tuple plumbing -------------------------------------------------
#
# Grid axes use presentation units (pixels, degrees); synthesis uses
# cycles/pixel and radians. The converters below are the only place the
# two meet.

def convert_axis_value(name: str, values):
    values = np.asarray(values, dtype=np.float64)
    if name == "half_wavelength":
        return 1.0 / (2.0 * values)
    if name in ("orientation", "phase"):
        return np.deg2rad(values)
    if name in ("temporal_frequency", "scale_factor", "angular_frequency"):
        return values
    raise ValueError(f"unknown grid axis {name!r}")


def grid_stimulus_batch(kind: str, names, rows, extent) -> np.ndarray:
    """Synthesize a chunk of grid stimuli; rows are (n, 4) in axis units."""
    rows = np.asarray(rows, dtype=np.float64)
    cols = {name: convert_axis_value(name, rows[:, i]) for i, name in enumerate(names)}
    freqs = cols["half_wavelength"]
    orients = cols["orientation"]
    phases = cols["phase"]
    if kind == "translation":
        return translating_wave_batch(freqs, orients, cols["temporal_frequency"], phases, extent)
    if kind == "dilation":
        return dilating_wave_batch(freqs, orients, cols["scale_factor"], phases, extent)
    if kind == "rotation":
        return rotating_wave_batch(freqs, orients, cols["angular_frequency"], phases, extent)
    raise ValueError(f"unknown motion kind {kind!r}")
