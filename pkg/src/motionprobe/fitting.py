"""Two-step tuning estimation: gridsearch peak, then bounded least squares.

Step one scans a response table for each filter's peak activation and the
wave parameters that produced it. Step two measures three response curves
through that peak (sweeping spatial frequency, orientation, and temporal
frequency with the phase held fixed) and fits the nine-parameter rectified
Gabor model by minimizing the summed squared error over the three curves:

    L = L_spatial + L_orientation + L_temporal

with a bounded trust-region-reflective solver. Costs are reported per
curve and normalized by the squared peak activation so filters of
different gain can be compared.

The four wave parameters are seeded from the grid peak and refined jointly
with the Gaussian/gain parameters; the grid steps are coarse relative to
the precision the curves support, so freezing them would dominate the
residual error.

With two-frame probes the temporal Gaussian factor is the same constant on
both frames, so ``sigma_t`` only rescales the kernel and is absorbed
exactly by the gain: it is structurally unidentifiable. The fit detects
this and holds ``sigma_t`` at its initial value (flagged on the result)
instead of letting it wander along the flat direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .gabor import GaborParams
from .grids import GridSpec, grid_spec_hash
from .probe import IncompleteTableError, ResponseProvider, ResponseTable
from .stimuli import convert_axis_value, translating_wave_batch


class InactiveFilterError(ValueError):
    """Filter never rose above zero anywhere on the grid."""


@dataclass(frozen=True)
class PeakResponse:
    """Grid location and value of a filter's maximum activation."""

    filter_id: int
    stimulus_id: int
    grid_indices: tuple[int, ...]
    params: dict[str, float]          # axis-name keyed, grid units
    activation: float


def find_peak(table: ResponseTable, filter_id: int) -> PeakResponse:
    """Global maximum over the grid; ties break toward the lowest id."""
    if not table.is_complete(filter_id):
        raise IncompleteTableError(f"filter {filter_id} has missing rows")
    usable = table.evaluated[:, filter_id] & ~table.excluded
    values = np.where(usable, table.activations[:, filter_id], -np.inf)
    sid = int(np.argmax(values))      # first occurrence = lowest stimulus_id
    peak = float(values[sid])
    if peak <= 0:
        raise InactiveFilterError(f"filter {filter_id} is inactive over this grid")
    shape = tuple(ax.size() for ax in table.spec.axes)
    indices = np.unravel_index(sid, shape)
    params = {ax.name: float(ax.values()[k]) for ax, k in zip(table.spec.axes, indices)}
    return PeakResponse(filter_id, sid, tuple(int(k) for k in indices), params, peak)


# --- spectral response profiles --------------------------------------------

#: Default profile sweeps in grid units: 50 half-wavelengths over the grid's
#: wavelength range, all 36 orientations, 50 temporal frequencies across the
#: full alias-free band.
PROFILE_SWEEPS = {
    "half_wavelength": np.linspace(16.0, 800.0, 50),
    "orientation": np.arange(0.0, 351.0, 10.0),
    "temporal_frequency": np.linspace(-0.5, 0.5, 50),
}

PROFILE_AXES = ("spatial_frequency", "orientation", "temporal_frequency")


@dataclass(frozen=True)
class ProfileCurve:
    axis: str                  # one of PROFILE_AXES
    values: np.ndarray         # model units (cycles/pixel, radians, cycles/frame)
    activations: np.ndarray


@dataclass(frozen=True)
class SpectralProfile:
    filter_id: int
    peak: PeakResponse
    curves: tuple[ProfileCurve, ProfileCurve, ProfileCurve]

    def curve(self, axis: str) -> ProfileCurve:
        for c in self.curves:
            if c.axis == axis:
                return c
        raise KeyError(axis)


def _insert_value(values: np.ndarray, value: float) -> np.ndarray:
    """Sorted insert of the peak value unless already sampled."""
    if np.any(np.isclose(values, value, rtol=0, atol=1e-9)):
        return values
    return np.sort(np.append(values, value))


def extract_profiles(provider: ResponseProvider, peak: PeakResponse, *,
                     sweeps=None) -> SpectralProfile:
    """Measure the three tuning curves through a filter's grid peak.

    Each sweep varies one wave parameter with the others pinned at the
    peak's values (phase included); the peak point itself is inserted into
    every sweep so all three curves pass through the peak stimulus.
    """
    sweeps = dict(PROFILE_SWEEPS if sweeps is None else sweeps)
    extent = provider.required_extent
    base_freq = float(convert_axis_value("half_wavelength", peak.params["half_wavelength"]))
    base_theta = float(convert_axis_value("orientation", peak.params["orientation"]))
    base_ft = float(peak.params["temporal_frequency"])
    base_phase = float(convert_axis_value("phase", peak.params["phase"]))

    sweep_freq = convert_axis_value(
        "half_wavelength", _insert_value(np.asarray(sweeps["half_wavelength"], dtype=float),
                                         peak.params["half_wavelength"]))
    sweep_freq = np.sort(sweep_freq)
    sweep_theta = convert_axis_value(
        "orientation", _insert_value(np.asarray(sweeps["orientation"], dtype=float),
                                     peak.params["orientation"]))
    sweep_ft = _insert_value(np.asarray(sweeps["temporal_frequency"], dtype=float), base_ft)

    curves = []
    for axis, values in (("spatial_frequency", sweep_freq),
                         ("orientation", sweep_theta),
                         ("temporal_frequency", sweep_ft)):
        n = len(values)
        freqs = np.full(n, base_freq)
        thetas = np.full(n, base_theta)
        fts = np.full(n, base_ft)
        phases = np.full(n, base_phase)
        if axis == "spatial_frequency":
            freqs = values
        elif axis == "orientation":
            thetas = values
        else:
            fts = values
        stimuli = translating_wave_batch(freqs, thetas, fts, phases, extent)
        try:
            responses = provider.respond(stimuli)[:, peak.filter_id]
        except Exception as exc:
            raise RuntimeError(
                f"provider failed on the {axis} sweep of filter "
                f"{peak.filter_id} ({n} stimuli)") from exc
        curves.append(ProfileCurve(axis, np.asarray(values, dtype=float),
                                   np.asarray(responses, dtype=float)))
    return SpectralProfile(peak.filter_id, peak, tuple(curves))


# --- model fit --------------------------------------------------------------

@dataclass(frozen=True)
class FitBounds:
    """Box constraints keeping the solver in physically sensible territory."""

    spatial_frequency: tuple[float, float] = (1.0 / 1600.0, 1.0 / 32.0)
    temporal_frequency: tuple[float, float] = (-0.5, 0.5)
    sigma_x: tuple[float, float] = (4.0, 800.0)
    sigma_y: tuple[float, float] = (4.0, 800.0)
    sigma_t: tuple[float, float] = (0.25, 8.0)
    gain: tuple[float, float] = (1e-12, 1e6)
    orientation_halfwidth: float = math.pi / 2   # about the seed
    phase_halfwidth: float = math.pi / 2
    bias_factor: tuple[float, float] = (-10.0, 1.0)  # times the peak activation


_PARAM_ORDER = ("spatial_frequency", "orientation", "temporal_frequency", "phase",
                "sigma_x", "sigma_y", "sigma_t", "gain", "bias")


@dataclass(frozen=True)
class FitResult:
    params: GaborParams
    cost: float
    cost_spatial: float
    cost_orientation: float
    cost_temporal: float
    cost_normalized: float
    converged: bool
    at_bounds: dict[str, str] = field(default_factory=dict)
    iterations: int = 0
    sigma_t_fixed: bool = False


def normalized_cost(cost: float, peak_activation: float) -> float:
    """Cost divided by the squared peak activation."""
    if not peak_activation > 0:
        raise ValueError("peak activation must be positive")
    return cost / (peak_activation * peak_activation)


class _ModelEvaluator:
    """Caches coordinate grids and the profile stimulus matrix for one fit."""

    def __init__(self, profile: SpectralProfile, extent):
        self.extent = extent
        w, h, t = extent
        x = np.arange(w, dtype=float) - (w - 1) / 2.0
        y = np.arange(h, dtype=float) - (h - 1) / 2.0
        self.x = x[None, None, :]
        self.y = y[None, :, None]
        tc = np.arange(t, dtype=float) - (t - 1) / 2.0
        self.tc = tc[:, None, None]
        self.t = np.arange(t, dtype=float)[:, None, None]

        chunks = []
        self.segments = []
        offset = 0
        peak = profile.peak
        for curve in profile.curves:
            n = len(curve.values)
            freqs = np.full(n, convert_axis_value("half_wavelength",
                                                  peak.params["half_wavelength"]))
            thetas = np.full(n, convert_axis_value("orientation", peak.params["orientation"]))
            fts = np.full(n, peak.params["temporal_frequency"])
            if curve.axis == "spatial_frequency":
                freqs = curve.values
            elif curve.axis == "orientation":
                thetas = curve.values
            else:
                fts = curve.values
            phases = np.full(n, convert_axis_value("phase", peak.params["phase"]))
            waves = translating_wave_batch(freqs, thetas, fts, phases, extent)
            chunks.append(waves.reshape(n, -1))
            self.segments.append((curve.axis, slice(offset, offset + n)))
            offset += n
        self.stimuli = np.concatenate(chunks, axis=0)
        self.measured = np.concatenate([c.activations for c in profile.curves])

    def kernel(self, freq, theta, ft, phase, sx, sy, st) -> np.ndarray:
        c = math.cos(theta)
        s = math.sin(theta)
        xr = self.x * c + self.y * s
        yr = -self.x * s + self.y * c
        env = np.exp(-((xr / sx) ** 2 + (yr / sy) ** 2 + (self.tc / st) ** 2))
        wave = np.cos(2.0 * math.pi * (freq * xr - ft * self.t) + phase)
        return (env * wave).ravel()

    def model(self, vec) -> np.ndarray:
        freq, theta, ft, phase, sx, sy, st, gain, bias = vec
        pre = self.stimuli @ self.kernel(freq, theta, ft, phase, sx, sy, st)
        return np.maximum(0.0, gain * (pre + bias))

    def residuals(self, vec) -> np.ndarray:
        return self.model(vec) - self.measured


def _grid_seed_window(spec: GridSpec) -> dict:
    """Per-axis refinement half-widths: one grid step around the peak."""
    window = {}
    for ax in spec.axes:
        if ax.step is not None:
            window[ax.name] = float(ax.step)
        elif ax.points > 1:
            window[ax.name] = float(ax.stop - ax.start) / (ax.points - 1)
        else:
            window[ax.name] = 0.0
    return window


def fit_gabor(profile: SpectralProfile, peak: PeakResponse, *,
              extent=None, bounds: FitBounds | None = None,
              seed_window: dict | None = None,
              wave_seed_override: tuple[float, float] | None = None,
              max_iterations: int = 500) -> FitResult:
    """Fit the nine-parameter model to a filter's three tuning curves.

    The fit runs in two stages: first the Gaussian/gain/bias parameters
    with the wave parameters frozen at the grid peak, then a joint
    refinement of everything. When ``seed_window`` gives per-axis grid
    steps, the wave parameters are confined to one step around the seed
    during refinement; the true optimum lies within half a step of the
    seed, and the window keeps the solver out of the model's gauge
    freedoms (phase/temporal-frequency trades that leave two-frame
    kernels' responses unchanged).

    Deterministic for identical inputs. Never raises on slow convergence:
    hitting the iteration cap returns ``converged=False``.
    """
    if extent is None:
        raise ValueError("fit_gabor needs the stimulus extent the profile was measured at")
    bounds = bounds or FitBounds()
    ev = _ModelEvaluator(profile, extent)

    freq0 = float(convert_axis_value("half_wavelength", peak.params["half_wavelength"]))
    theta0 = float(convert_axis_value("orientation", peak.params["orientation"]))
    ft0 = float(peak.params["temporal_frequency"])
    phase0 = float(convert_axis_value("phase", peak.params["phase"]))
    if wave_seed_override is not None:
        ft0, phase0 = (float(wave_seed_override[0]), float(wave_seed_override[1]))
    half_wl = peak.params["half_wavelength"]

    sigma0 = min(max(half_wl / 2.0, bounds.sigma_x[0]), bounds.sigma_x[1])
    sigma_t0 = min(max(1.0, bounds.sigma_t[0]), bounds.sigma_t[1])
    # Gain seed: measured peak over the unit-gain, zero-bias model peak.
    peak_stimulus = ev.stimuli[int(np.argmax(ev.measured))]
    d0 = float(np.dot(ev.kernel(freq0, theta0, ft0, phase0, sigma0, sigma0, sigma_t0),
                      peak_stimulus))
    gain0 = peak.activation / d0 if d0 > 0 else 1.0
    gain0 = min(max(gain0, bounds.gain[0]), bounds.gain[1])

    if seed_window is None:
        theta_hw = bounds.orientation_halfwidth
        phase_hw = bounds.phase_halfwidth
        freq_lo, freq_hi = bounds.spatial_frequency
        ft_lo, ft_hi = bounds.temporal_frequency
    else:
        theta_hw = math.radians(seed_window.get("orientation", 0.0)) or bounds.orientation_halfwidth
        phase_hw = math.radians(seed_window.get("phase", 0.0)) or bounds.phase_halfwidth
        wl_step = seed_window.get("half_wavelength", 0.0)
        if wl_step > 0:
            # the grid certifies the peak's neighborhood, so the one-step
            # window supersedes the canonical frequency caps
            freq_lo = 1.0 / (2.0 * (half_wl + wl_step))
            freq_hi = (1.0 / (2.0 * (half_wl - wl_step)) if half_wl - wl_step > 0
                       else 0.5)
        else:
            freq_lo, freq_hi = bounds.spatial_frequency
        ft_step = seed_window.get("temporal_frequency", 0.0)
        if ft_step > 0:
            ft_lo = max(ft0 - ft_step, bounds.temporal_frequency[0])
            ft_hi = min(ft0 + ft_step, bounds.temporal_frequency[1])
        else:
            ft_lo, ft_hi = bounds.temporal_frequency

    lower = [freq_lo, theta0 - theta_hw, ft_lo, phase0 - phase_hw,
             bounds.sigma_x[0], bounds.sigma_y[0], bounds.sigma_t[0],
             bounds.gain[0], bounds.bias_factor[0] * peak.activation]
    upper = [freq_hi, theta0 + theta_hw, ft_hi, phase0 + phase_hw,
             bounds.sigma_x[1], bounds.sigma_y[1], bounds.sigma_t[1],
             bounds.gain[1], bounds.bias_factor[1] * peak.activation]
    seed = np.asarray([
        min(max(freq0, lower[0]), upper[0]), theta0,
        min(max(ft0, lower[2]), upper[2]), phase0,
        sigma0, sigma0, sigma_t0, gain0, 0.0])

    sigma_t_fixed = extent[2] == 2
    envelope_free = [4, 5, 7, 8] if sigma_t_fixed else [4, 5, 6, 7, 8]
    all_free = [i for i in range(9) if not (sigma_t_fixed and i == 6)]

    def solve(free, start, budget):
        free_arr = np.asarray(free)

        def residuals(x_free):
            vec = start.copy()
            vec[free_arr] = x_free
            return ev.residuals(vec)

        result = least_squares(
            residuals, start[free_arr],
            bounds=(np.asarray(lower)[free_arr], np.asarray(upper)[free_arr]),
            method="trf", x_scale="jac",
            ftol=1e-10, xtol=1e-10, gtol=1e-12,
            max_nfev=budget * (len(free) + 1))
        vec = start.copy()
        vec[free_arr] = result.x
        return vec, result

    stage1, first = solve(envelope_free, seed, max_iterations)
    vec, result = solve(all_free, stage1, max_iterations)
    total_nfev = int(first.nfev) + int(result.nfev)
    res = ev.residuals(vec)
    costs = {}
    for axis, seg in ev.segments:
        costs[axis] = float(np.sum(res[seg] ** 2))
    cost = float(np.sum(res ** 2))

    at_bounds = {}
    for i, name in enumerate(_PARAM_ORDER):
        if sigma_t_fixed and name == "sigma_t":
            continue
        lo, hi = lower[i], upper[i]
        span = max(hi - lo, 1e-30)
        if abs(vec[i] - lo) <= 1e-9 * span:
            at_bounds[name] = "lower"
        elif abs(vec[i] - hi) <= 1e-9 * span:
            at_bounds[name] = "upper"

    params = GaborParams(
        spatial_frequency=float(vec[0]), orientation=float(vec[1] % (2 * math.pi)),
        temporal_frequency=float(vec[2]), phase=float(vec[3]),
        sigma_x=float(vec[4]), sigma_y=float(vec[5]), sigma_t=float(vec[6]),
        gain=float(vec[7]), bias=float(vec[8]))
    return FitResult(
        params=params,
        cost=cost,
        cost_spatial=costs["spatial_frequency"],
        cost_orientation=costs["orientation"],
        cost_temporal=costs["temporal_frequency"],
        cost_normalized=normalized_cost(cost, peak.activation),
        converged=result.status > 0,
        at_bounds=at_bounds,
        iterations=total_nfev,
        sigma_t_fixed=sigma_t_fixed,
    )


def model_profile_responses(params: GaborParams, profile: SpectralProfile, extent):
    """Model activations along a profile's curves, matching the fit's
    stimulus conventions; returns one array per curve."""
    ev = _ModelEvaluator(profile, extent)
    vec = np.asarray([params.spatial_frequency, params.orientation,
                      params.temporal_frequency, params.phase, params.sigma_x,
                      params.sigma_y, params.sigma_t, params.gain, params.bias])
    model = ev.model(vec)
    return tuple(model[seg] for _, seg in ev.segments)


def _phase_column(table: ResponseTable, peak: PeakResponse):
    """Measured activations over the phase axis at the peak's other values."""
    axes = table.spec.axes
    sizes = tuple(ax.size() for ax in axes)
    names = table.spec.axis_names()
    phase_axis = names.index("phase")
    indices = list(peak.grid_indices)
    phase_values = axes[phase_axis].values()
    flat = []
    for k in range(len(phase_values)):
        indices[phase_axis] = k
        flat.append(np.ravel_multi_index(tuple(indices), sizes))
    measured = table.activations[np.asarray(flat), peak.filter_id].astype(np.float64)
    return np.deg2rad(phase_values), measured


def _phase_column_sse(params: GaborParams, peak: PeakResponse, phase_values,
                      measured, extent) -> float:
    n = len(phase_values)
    freq = float(convert_axis_value("half_wavelength", peak.params["half_wavelength"]))
    theta = float(convert_axis_value("orientation", peak.params["orientation"]))
    ft = float(peak.params["temporal_frequency"])
    waves = translating_wave_batch(np.full(n, freq), np.full(n, theta),
                                   np.full(n, ft), phase_values, extent)
    from .gabor import gabor_kernel
    kernel = gabor_kernel(params, extent).samples.ravel()
    model = np.maximum(0.0, params.gain * (waves.reshape(n, -1) @ kernel + params.bias))
    return float(np.sum((model - measured) ** 2))


def fit_with_disambiguation(profile: SpectralProfile, peak: PeakResponse,
                            table: ResponseTable, extent, *,
                            bounds: FitBounds | None = None) -> FitResult:
    """Fit the model and, for frame pairs, resolve the phase-reflection twin.

    Frame-pair probing admits a twin solution: reflecting the phase about
    the probe phase and shifting the temporal frequency to keep the
    second-frame phase reproduces all three single-phase curves exactly.
    The measured responses across the grid's phase axis do separate the
    twins, so both candidates are fitted and the one matching the phase
    column is kept.
    """
    window = _grid_seed_window(table.spec)
    fit = fit_gabor(profile, peak, extent=extent, bounds=bounds, seed_window=window)
    if extent[2] != 2:
        return fit

    probe_phase = float(convert_axis_value("phase", peak.params["phase"]))
    mirror_phase = 2.0 * probe_phase - fit.params.phase
    mirror_ft = fit.params.temporal_frequency + (probe_phase - fit.params.phase) / math.pi
    if abs(mirror_ft) > 0.5 or (
            abs(mirror_ft - fit.params.temporal_frequency) < 1e-9
            and abs(mirror_phase - fit.params.phase) < 1e-9):
        return fit
    mirror_fit = fit_gabor(profile, peak, extent=extent, bounds=bounds,
                           seed_window=window,
                           wave_seed_override=(mirror_ft, mirror_phase))
    phase_values, measured = _phase_column(table, peak)
    sse_direct = _phase_column_sse(fit.params, peak, phase_values, measured, extent)
    sse_mirror = _phase_column_sse(mirror_fit.params, peak, phase_values, measured, extent)
    return mirror_fit if sse_mirror < sse_direct else fit


def fit_filter(provider: ResponseProvider, table: ResponseTable, filter_id: int, *,
               bounds: FitBounds | None = None, sweeps=None) -> tuple[PeakResponse, SpectralProfile, FitResult]:
    """Peak, profile, and fit for one filter (the per-filter pipeline)."""
    extent = provider.required_extent
    peak = find_peak(table, filter_id)
    profile = extract_profiles(provider, peak, sweeps=sweeps)
    fit = fit_with_disambiguation(profile, peak, table, extent, bounds=bounds)
    return peak, profile, fit


def load_profile_responses(manifest_path, responses_path, peaks) -> dict:
    """Rebuild per-filter profiles from an adapter's measured sweep file.

    ``manifest_path`` is the file written by :func:`export_profile_manifest`;
    ``responses_path`` holds ``stimulus_id,filter_id,activation`` rows for
    (at least) each manifest stimulus's own target filter. Returns
    {filter_id: SpectralProfile} for the given peaks.
    """
    import json

    peaks_by_id = {p.filter_id: p for p in peaks}
    with open(manifest_path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        records = [json.loads(line) for line in fh if line.strip()]

    measured = {}
    expect_hash = header.get("grid_spec_hash")
    with open(responses_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line == "stimulus_id,filter_id,activation":
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key == "grid_spec_hash" and expect_hash and val != expect_hash:
                    raise ValueError(
                        f"{responses_path}: hash {val!r} does not match the "
                        f"profile manifest hash {expect_hash!r}")
                continue
            sid, fid, value = line.split(",")
            measured[(int(sid), int(fid))] = float(value)

    axis_of = {"half_wavelength": "spatial_frequency",
               "orientation": "orientation",
               "temporal_frequency": "temporal_frequency"}
    collected = {}
    for record in records:
        fid = record["filter_id"]
        if fid not in peaks_by_id:
            continue
        key = (record["stimulus_id"], fid)
        if key not in measured:
            raise ValueError(f"profile responses missing stimulus {key[0]} "
                             f"for filter {fid}")
        sweep = record["sweep_axis"]
        value = float(convert_axis_value(sweep, record["params"][sweep]))
        collected.setdefault(fid, {}).setdefault(axis_of[sweep], []).append(
            (value, measured[key]))

    profiles = {}
    for fid, by_axis in collected.items():
        curves = []
        for axis in PROFILE_AXES:
            pairs = by_axis.get(axis, [])
            if not pairs:
                raise ValueError(f"filter {fid}: manifest has no {axis} sweep")
            values = np.asarray([p[0] for p in pairs])
            acts = np.asarray([p[1] for p in pairs])
            order = np.argsort(values, kind="stable")
            curves.append(ProfileCurve(axis, values[order], acts[order]))
        profiles[fid] = SpectralProfile(fid, peaks_by_id[fid], tuple(curves))
    return profiles


def export_profile_manifest(peaks, spec: GridSpec, destination, extent, *, sweeps=None) -> None:
    """Manifest of the per-filter profile sweeps for an external provider.

    One record per (filter, sweep point): the filter id, the swept axis,
    and the full wave parameter tuple in grid units.
    """
    sweeps = dict(PROFILE_SWEEPS if sweeps is None else sweeps)
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f'{{"grid_spec_hash": "{grid_spec_hash(spec)}", "kind": "profiles", '
                 f'"extent": [{extent[0]}, {extent[1]}, {extent[2]}]}}\n')
        stimulus_id = 0
        for peak in peaks:
            for axis_name in ("half_wavelength", "orientation", "temporal_frequency"):
                values = _insert_value(np.asarray(sweeps[axis_name], dtype=float),
                                       peak.params[axis_name])
                for v in values:
                    params = dict(peak.params)
                    params[axis_name] = float(v)
                    body = ", ".join(f'"{k}": {params[k]!r}' for k in
                                     ("half_wavelength", "orientation",
                                      "temporal_frequency", "phase"))
                    fh.write(f'{{"stimulus_id": {stimulus_id}, '
                             f'"filter_id": {peak.filter_id}, "sweep_axis": "{axis_name}", '
                             f'"motion_kind": "translation", "params": {{{body}}}}}\n')
                    stimulus_id += 1
