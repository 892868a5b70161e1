"""Frequency-domain analysis of space-time filters.

The rectified dot product of a probe wave with a filter can be read off
the filter's 3-D DFT: a unit-amplitude wave at an integer multiple of the
volume's fundamental frequencies has exactly one powered coefficient pair,
so by the convolution theorem the dot product reduces to the projection of
that coefficient onto the filter's coefficient at the same bin. The angle
``psi`` between the two coefficients (treated as real 2-vectors) decides
whether the rectified response survives: components 90 degrees or more
out of phase contribute nothing.

Phase maps and response maps tabulate ``psi``, the filter's spectral
power, and the rectified response over a lattice of probe frequencies.
Coefficients with negligible power carry no meaningful phase and are
masked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .gabor import GaborParams, gabor_kernel, gaussian_envelope
from .grids import Axis, GridSpec
from .stimuli import (OcclusionParams, TranslatingWaveParams, dilating_wave_batch,
                      gen_occlusion_stimulus, rotating_wave_batch,
                      translating_wave_batch)
from .volume import Volume, validate_extent

TWO_PI = 2.0 * math.pi


class NonIntegerFrequencyError(ValueError):
    """Probe frequency is not an integer multiple of the fundamental."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """3-D DFT coefficients, numpy fftn layout (no shift), axes (t, y, x)."""

    coefficients: np.ndarray
    extent: tuple[int, int, int]

    @property
    def amplitude(self) -> np.ndarray:
        return np.abs(self.coefficients)

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.coefficients)


def dft3(volume: Volume) -> Spectrum:
    return Spectrum(np.fft.fftn(volume.samples), volume.extent)


def idft3(spectrum: Spectrum) -> Volume:
    return Volume(np.fft.ifftn(spectrum.coefficients).real)


def phase_difference(p: complex, q: complex) -> float:
    """Angle in [0, pi] between two complex numbers as real 2-vectors."""
    ap = abs(p)
    aq = abs(q)
    if ap == 0 or aq == 0:
        raise ValueError("phase difference undefined for zero-magnitude coefficients")
    inner = (p.real * q.real + p.imag * q.imag) / (ap * aq)
    return math.acos(min(1.0, max(-1.0, inner)))


def unit_response_spectral(params: GaborParams, stimulus: Volume) -> float:
    """Rectified model response computed through the frequency domain."""
    kernel = gabor_kernel(params, stimulus.extent)
    s = np.fft.fftn(stimulus.samples)
    g = np.fft.fftn(kernel.samples)
    dot = float(np.sum(s * np.conj(g)).real) / stimulus.samples.size
    return max(0.0, params.gain * (dot + params.bias))


def spectral_probe_grid(extent, spatial_indices=None, temporal_indices=None) -> GridSpec:
    """Probe-wave lattice at integer multiples of the fundamental frequencies.

    Axes hold physical frequencies (cycles/pixel along +x, cycles/frame);
    values are built as index/size so they are exactly representable
    multiples of the fundamentals.
    """
    w, h, t = validate_extent(extent)
    if spatial_indices is None:
        kmax = (w - 1) // 2
        spatial_indices = np.arange(-kmax, kmax + 1)
    if temporal_indices is None:
        ktmax = max(t // 2 - 1, 0)
        temporal_indices = np.arange(-ktmax, ktmax + 1)
    spatial_indices = np.asarray(spatial_indices, dtype=int)
    temporal_indices = np.asarray(temporal_indices, dtype=int)
    return GridSpec("translation", (
        Axis("spatial_frequency", "cycles/pixel",
             float(spatial_indices[0]) / w, float(spatial_indices[-1]) / w,
             points=len(spatial_indices)),
        Axis("temporal_frequency", "cycles/frame",
             float(temporal_indices[0]) / t, float(temporal_indices[-1]) / t,
             points=len(temporal_indices)),
    ))


def _integer_indices(values: np.ndarray, size: int, label: str) -> np.ndarray:
    scaled = np.asarray(values, dtype=float) * size
    rounded = np.rint(scaled)
    if np.any(np.abs(scaled - rounded) > 1e-6):
        raise NonIntegerFrequencyError(
            f"{label} values must be integer multiples of 1/{size}")
    return rounded.astype(int)


@dataclass(frozen=True, eq=False)
class PhaseMap:
    """Per-probe-frequency phase difference with a power mask.

    Arrays are (n_temporal, n_spatial). ``psi`` is NaN where masked;
    ``out_of_phase`` marks unmasked entries with ``psi >= pi/2``.
    """

    spatial_frequencies: np.ndarray    # cycles/pixel, signed (along +x)
    temporal_frequencies: np.ndarray   # cycles/frame
    psi: np.ndarray
    power: np.ndarray
    masked: np.ndarray
    out_of_phase: np.ndarray


@dataclass(frozen=True, eq=False)
class ResponseMap:
    """Rectified convolution response over the same probe lattice."""

    spatial_frequencies: np.ndarray
    temporal_frequencies: np.ndarray
    response: np.ndarray
    power: np.ndarray


def _probe_lattice(filter_volume: Volume, wave_grid: GridSpec):
    w, h, t = filter_volume.extent
    axes = {ax.name: ax for ax in wave_grid.axes}
    if set(axes) != {"spatial_frequency", "temporal_frequency"}:
        raise ValueError("probe grid needs spatial_frequency and temporal_frequency axes")
    fx = axes["spatial_frequency"].values()
    ft = axes["temporal_frequency"].values()
    kx = _integer_indices(fx, w, "spatial_frequency")
    kt = _integer_indices(ft, t, "temporal_frequency")
    return fx, ft, kx, kt


def _analyze(filter_volume: Volume, wave_grid: GridSpec, probe_phase: float,
             mask_fraction: float, time_origin: float):
    """Shared worker: coefficients, psi, rectified response on the lattice."""
    w, h, t = filter_volume.extent
    fx, ft, kx, kt = _probe_lattice(filter_volume, wave_grid)
    coeffs = np.fft.fftn(filter_volume.samples)

    # Probe wave cos(2*pi*(fx*x - ft*(t - t0)) + phase) on centered spatial
    # coords lands on DFT bin (t: -kt, y: 0, x: kx) with coefficient
    # (N/2) * exp(i * effective_phase); the centering offsets fold into the
    # effective phase.
    cx = (w - 1) / 2.0
    q = coeffs[np.ix_((-kt) % t, [0], kx % w)][:, 0, :]          # (n_kt, n_kx)
    phase_eff = (probe_phase - TWO_PI * (kx[None, :] / w) * cx
                 + TWO_PI * (kt[:, None] / t) * time_origin)      # (n_kt, n_kx)
    unit = np.exp(1j * phase_eff)

    power = np.abs(q)
    with np.errstate(invalid="ignore", divide="ignore"):
        inner = (unit.real * q.real + unit.imag * q.imag) / power
    psi = np.arccos(np.clip(inner, -1.0, 1.0))
    masked = power < mask_fraction * power.max() if power.size else power.astype(bool)
    psi = np.where(masked, np.nan, psi)
    out_of_phase = (~masked) & (psi >= math.pi / 2)

    # Rectified dot product: Re(unit * conj(q)) for a conjugate pair of
    # powered coefficients; self-conjugate bins (2k = 0 mod N on every
    # axis) carry a single real coefficient instead.
    dot = (unit * np.conj(q)).real
    self_conj = ((2 * kx[None, :]) % w == 0) & ((2 * kt[:, None]) % t == 0)
    if np.any(self_conj):
        single = np.cos(phase_eff) * q.real
        dot = np.where(self_conj, single, dot)
    response = np.maximum(0.0, dot)
    return fx, ft, psi, power, masked, out_of_phase, response


def phase_map(filter_volume: Volume, wave_grid: GridSpec, *,
              probe_phase: float = 0.0, mask_fraction: float = 0.01,
              time_origin: float = 0.0) -> PhaseMap:
    fx, ft, psi, power, masked, oop, _ = _analyze(
        filter_volume, wave_grid, probe_phase, mask_fraction, time_origin)
    return PhaseMap(fx, ft, psi, power, masked, oop)


def freq_response_map(filter_volume: Volume, wave_grid: GridSpec, *,
                      probe_phase: float = 0.0, mask_fraction: float = 0.01,
                      time_origin: float = 0.0) -> ResponseMap:
    fx, ft, _, power, _, _, response = _analyze(
        filter_volume, wave_grid, probe_phase, mask_fraction, time_origin)
    return ResponseMap(fx, ft, response, power)


def out_of_phase_fraction(pmap: PhaseMap) -> float:
    """Share of powered (unmasked) coefficients at or beyond 90 degrees."""
    n_powered = int(np.count_nonzero(~pmap.masked))
    if n_powered == 0:
        return 0.0
    return float(np.count_nonzero(pmap.out_of_phase)) / n_powered


def count_response_lobes(rmap: ResponseMap, *, threshold_fraction: float = 0.5,
                         positive_spatial_only: bool = False):
    """Connected superthreshold components of a response map.

    Returns a list of (mean spatial frequency, mean temporal frequency,
    cell count) per lobe, strongest-response-first.
    """
    response = rmap.response
    cols = np.arange(response.shape[1])
    if positive_spatial_only:
        cols = cols[rmap.spatial_frequencies > 0]
    sub = response[:, cols]
    if sub.size == 0 or sub.max() <= 0:
        return []
    mask = sub >= threshold_fraction * sub.max()
    labels, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    lobes = []
    for lab in range(1, n + 1):
        rows_i, cols_i = np.nonzero(labels == lab)
        weight = sub[rows_i, cols_i]
        fx = float(np.average(rmap.spatial_frequencies[cols[cols_i]], weights=weight))
        ft = float(np.average(rmap.temporal_frequencies[rows_i], weights=weight))
        lobes.append((fx, ft, len(rows_i), float(weight.max())))
    lobes.sort(key=lambda l: -l[3])
    return [(fx, ft, n_cells) for fx, ft, n_cells, _ in lobes]


# --- builtin simulation filters ---------------------------------------------
#
# The map figures probe synthesized filters, not measured ones: a
# Gaussian-windowed dilating/rotating wave stands in for a dilation or
# rotation filter, the step-edge stimulus for an occlusion filter. Eight
# frames (not two) so temporal frequency structure is resolvable, and
# carriers are referenced to the sequence center (see sim_time_origin) so
# the phase structure reflects the motion shape, not frame indexing.

SIM_EXTENT = (65, 65, 8)


def sim_time_origin(extent) -> float:
    """Temporal phase reference of the builtin simulations: mid-sequence."""
    return (extent[2] - 1) / 2.0


def _window(extent, sigma_spatial: float, sigma_t: float) -> np.ndarray:
    probe = GaborParams(spatial_frequency=0.01, orientation=0.0, temporal_frequency=0.0,
                        phase=0.0, sigma_x=sigma_spatial, sigma_y=sigma_spatial,
                        sigma_t=sigma_t)
    return gaussian_envelope(probe, extent).samples


def translation_sim_filter(extent=SIM_EXTENT, *, half_wavelength: float = 8.0,
                           orientation: float = 0.0, temporal_frequency: float = 0.0,
                           phase: float = 0.0, sigma_spatial: float = 12.0,
                           sigma_t: float = 6.0) -> Volume:
    wave = translating_wave_batch(
        [1.0 / (2.0 * half_wavelength)], [orientation], [temporal_frequency], [phase],
        extent, time_origin=sim_time_origin(extent))[0]
    return Volume(_window(extent, sigma_spatial, sigma_t) * wave)


def dilation_sim_filter(extent=SIM_EXTENT, *, half_wavelength: float = 8.0,
                        orientation: float = 0.0, scale_factor: float = 1.1,
                        phase: float = 0.0, sigma_spatial: float = 12.0,
                        sigma_t: float = 6.0) -> Volume:
    wave = dilating_wave_batch(
        [1.0 / (2.0 * half_wavelength)], [orientation], [scale_factor], [phase],
        extent, time_origin=sim_time_origin(extent))[0]
    return Volume(_window(extent, sigma_spatial, sigma_t) * wave)


def rotation_sim_filter(extent=SIM_EXTENT, *, half_wavelength: float = 8.0,
                        orientation: float = 0.0, angular_frequency: float = 0.2,
                        phase: float = 0.0, sigma_spatial: float = 12.0,
                        sigma_t: float = 6.0) -> Volume:
    wave = rotating_wave_batch(
        [1.0 / (2.0 * half_wavelength)], [orientation], [angular_frequency], [phase],
        extent, time_origin=sim_time_origin(extent))[0]
    return Volume(_window(extent, sigma_spatial, sigma_t) * wave)


def occlusion_sim_filter(extent=SIM_EXTENT, *, envelope_sigma: float = 12.0) -> Volume:
    """Occlusion pattern with two waves pinned to exact lattice frequencies.

    The step boundary is positioned so its trajectory is centered on the
    window over the sequence; otherwise the occluder sweeps itself out of
    the Gaussian and its spectral lobe collapses.
    """
    w, _, t = validate_extent(extent)
    occluder = TranslatingWaveParams(
        spatial_frequency=8.0 / w, orientation=0.0, temporal_frequency=2.0 / t)
    occluded = TranslatingWaveParams(
        spatial_frequency=4.0 / w, orientation=0.0, temporal_frequency=-1.0 / t)
    boundary_x = -occluder.velocity * (t - 1) / 2.0
    return gen_occlusion_stimulus(
        OcclusionParams(occluder, occluded, boundary_x=boundary_x,
                        envelope_sigma=envelope_sigma), extent)


SIM_FILTERS = {
    "translation": translation_sim_filter,
    "dilation": dilation_sim_filter,
    "rotation": rotation_sim_filter,
    "occlusion": occlusion_sim_filter,
}
