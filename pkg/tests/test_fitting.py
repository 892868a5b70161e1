"""Peak search, spectral profiles, and the bounded model fit."""

import math

import numpy as np
import pytest

from motionprobe import (GaborParams, SyntheticBank, extract_profiles, find_peak,
                         fit_gabor, gabor_kernel, normalized_cost, run_gridsearch)
from motionprobe.fitting import InactiveFilterError, fit_filter
from motionprobe.grids import Axis, GridSpec
from motionprobe.probe import IncompleteTableError

EXTENT = (49, 49, 2)


def fit_spec() -> GridSpec:
    return GridSpec("translation", (
        Axis("half_wavelength", "pixels", 8.0, 32.0, step=8.0),
        Axis("orientation", "degrees", 0.0, 340.0, step=20.0),
        Axis("temporal_frequency", "cycles/frame", 0.0, 0.5, step=0.05),
        Axis("phase", "degrees", -180.0, 160.0, step=20.0),
    ))


def recoverable_gabor(rng) -> GaborParams:
    """A filter whose envelope holds enough carrier periods to localize."""
    half_wl = rng.uniform(9.0, 15.0)
    wavelength = 2 * half_wl
    return GaborParams(
        spatial_frequency=1 / wavelength,
        orientation=rng.uniform(0, 2 * math.pi),
        temporal_frequency=rng.uniform(0.05, 0.45),
        phase=rng.uniform(math.radians(-170), math.radians(150)),
        sigma_x=wavelength * rng.uniform(0.30, 0.36),
        sigma_y=wavelength * rng.uniform(0.30, 0.36),
        sigma_t=1.0)


def wrapped_angle_error(a: float, b: float) -> float:
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


@pytest.fixture(scope="module")
def planted_run():
    rng = np.random.default_rng(21)
    filters = tuple(recoverable_gabor(rng) for _ in range(5))
    bank = SyntheticBank(filters, EXTENT)
    table = run_gridsearch(bank, fit_spec(), chunk=512)
    return bank, table


class TestFindPeak:
    def test_planted_node_is_found(self):
        # filter matched exactly to a grid node responds strongest there
        g = GaborParams(1 / 32, math.radians(40), 0.2, math.radians(-60),
                        10.0, 10.0, 1.0)
        bank = SyntheticBank((g,), EXTENT)
        table = run_gridsearch(bank, fit_spec(), chunk=512)
        peak = find_peak(table, 0)
        assert peak.params["half_wavelength"] == 16.0
        assert peak.params["orientation"] == 40.0
        assert peak.params["temporal_frequency"] == pytest.approx(0.2)
        assert peak.params["phase"] == -60.0
        assert peak.activation == table.activations[:, 0].max()

    def test_tie_breaks_to_lowest_stimulus_id(self, planted_run):
        _, table = planted_run
        clone = type(table)(table.spec, table.grid_hash, table.activations.copy(),
                            table.evaluated.copy(), excluded=table.excluded.copy())
        col = clone.activations[:, 0]
        peak_value = col.max()
        first = int(np.argmax(col))
        col[first + 5] = peak_value
        peak = find_peak(clone, 0)
        assert peak.stimulus_id == first

    def test_inactive_filter_is_an_error(self, planted_run):
        _, table = planted_run
        clone = type(table)(table.spec, table.grid_hash, table.activations.copy(),
                            table.evaluated.copy(), excluded=table.excluded.copy())
        clone.activations[:, 1] = 0.0
        with pytest.raises(InactiveFilterError):
            find_peak(clone, 1)

    def test_incomplete_filter_is_an_error(self, planted_run):
        _, table = planted_run
        clone = type(table)(table.spec, table.grid_hash, table.activations.copy(),
                            table.evaluated.copy(), excluded=table.excluded.copy())
        clone.evaluated[3, 0] = False
        with pytest.raises(IncompleteTableError):
            find_peak(clone, 0)


class TestProfiles:
    def test_orientation_curve_peaks_near_truth(self, planted_run):
        bank, table = planted_run
        g = bank.filters[0]
        peak = find_peak(table, 0)
        profile = extract_profiles(bank, peak)
        curve = profile.curve("orientation")
        best = curve.values[int(np.argmax(curve.activations))]
        assert wrapped_angle_error(best, g.orientation) <= math.radians(10.0) + 1e-9

    def test_curves_contain_peak_value(self, planted_run):
        bank, table = planted_run
        peak = find_peak(table, 2)
        profile = extract_profiles(bank, peak)
        for curve in profile.curves:
            # the table quantizes activations to float32; curves are float64
            assert np.max(curve.activations) >= peak.activation * (1 - 1e-6)
            assert np.any(np.isclose(curve.activations, peak.activation, rtol=1e-5))

    def test_static_even_filter_symmetric_in_temporal_frequency(self):
        g = GaborParams(1 / 16, 0.0, 0.0, 0.0, 10.0, 10.0, 1.0)
        bank = SyntheticBank((g,), EXTENT)
        table = run_gridsearch(bank, fit_spec(), chunk=512)
        profile = extract_profiles(bank, find_peak(table, 0))
        curve = profile.curve("temporal_frequency")
        values = curve.values
        for ft, act in zip(values, curve.activations):
            mirrored = np.isclose(values, -ft, atol=1e-12)
            if mirrored.any():
                assert act == pytest.approx(
                    float(curve.activations[mirrored][0]), rel=1e-9, abs=1e-9)


class TestFitGabor:
    def test_noiseless_recovery(self, planted_run):
        bank, table = planted_run
        for fid, g in enumerate(bank.filters):
            peak, profile, fit = fit_filter(bank, table, fid)
            p = fit.params
            assert fit.converged
            assert abs(p.spatial_frequency - g.spatial_frequency) <= 0.02 * g.spatial_frequency
            assert wrapped_angle_error(p.orientation, g.orientation) <= math.radians(2.0)
            assert abs(p.temporal_frequency - g.temporal_frequency) <= 0.02
            assert wrapped_angle_error(p.phase, g.phase) <= math.radians(10.0)
            assert abs(p.sigma_x - g.sigma_x) <= 0.10 * g.sigma_x
            assert abs(p.sigma_y - g.sigma_y) <= 0.10 * g.sigma_y
            assert fit.cost_normalized < 1e-4

    def test_cost_decomposition_sums(self, planted_run):
        bank, table = planted_run
        _, _, fit = fit_filter(bank, table, 1)
        total = fit.cost_spatial + fit.cost_orientation + fit.cost_temporal
        assert fit.cost == pytest.approx(total, rel=1e-12, abs=1e-12)
        assert fit.cost_normalized == pytest.approx(fit.cost / find_peak(table, 1).activation ** 2)

    def test_refit_of_model_curves_is_a_fixed_point(self, planted_run):
        """Feeding a fitted model's own curves back in leaves zero cost."""
        from motionprobe.fitting import (ProfileCurve, SpectralProfile,
                                         _grid_seed_window, model_profile_responses)
        bank, table = planted_run
        peak, profile, fit = fit_filter(bank, table, 0)
        model_acts = model_profile_responses(fit.params, profile, EXTENT)
        synth_curves = [ProfileCurve(curve.axis, curve.values, acts)
                        for curve, acts in zip(profile.curves, model_acts)]
        synth = SpectralProfile(0, peak, tuple(synth_curves))
        refit = fit_gabor(synth, peak, extent=EXTENT,
                          seed_window=_grid_seed_window(table.spec))
        assert refit.cost_normalized < 1e-8

    def test_bounds_respected_and_flagged(self, planted_run):
        bank, table = planted_run
        from motionprobe.fitting import FitBounds
        tight = FitBounds(sigma_x=(4.0, 6.0))   # planted sigma_x is far above 6
        peak = find_peak(table, 0)
        profile = extract_profiles(bank, peak)
        fit = fit_gabor(profile, peak, extent=EXTENT, bounds=tight)
        assert 4.0 - 1e-9 <= fit.params.sigma_x <= 6.0 + 1e-9
        flag = fit.at_bounds.get("sigma_x")
        assert flag in ("lower", "upper")
        pinned = 4.0 if flag == "lower" else 6.0
        assert fit.params.sigma_x == pytest.approx(pinned, abs=1e-6)

    def test_deterministic_rerun(self, planted_run):
        bank, table = planted_run
        _, _, fit_a = fit_filter(bank, table, 3)
        _, _, fit_b = fit_filter(bank, table, 3)
        assert fit_a.params == fit_b.params
        assert fit_a.cost == fit_b.cost
        assert fit_a.iterations == fit_b.iterations

    def test_budget_increase_never_raises_cost(self, planted_run):
        """The trust-region path only accepts cost-decreasing steps, so a
        larger evaluation budget can only end at an equal or lower cost."""
        from motionprobe.fitting import _grid_seed_window
        bank, table = planted_run
        peak = find_peak(table, 4)
        profile = extract_profiles(bank, peak)
        window = _grid_seed_window(table.spec)
        costs = [fit_gabor(profile, peak, extent=EXTENT, seed_window=window,
                           max_iterations=budget).cost
                 for budget in (2, 5, 10, 40, 200)]
        assert all(a >= b - 1e-9 * max(abs(a), 1.0) for a, b in zip(costs, costs[1:]))

    def test_sigma_t_held_for_frame_pairs(self, planted_run):
        bank, table = planted_run
        _, _, fit = fit_filter(bank, table, 0)
        assert fit.sigma_t_fixed
        assert fit.params.sigma_t == 1.0

    def test_polarity_invariant_filter_shows_opposite_orientation_error(self):
        """A filter built as the max of two opposed model filters responds at
        both spatial frequencies; the single-model fit leaves its orientation
        error concentrated half a turn from the peak."""

        class PolarityInvariantBank:
            def __init__(self, params, extent):
                self.params = params
                # opposite spatial frequency: orientation flipped half a
                # turn, temporal frequency unchanged
                self.twin = GaborParams(
                    params.spatial_frequency,
                    (params.orientation + math.pi) % (2 * math.pi),
                    params.temporal_frequency, params.phase,
                    params.sigma_x, params.sigma_y, params.sigma_t)
                self.extent = extent
                self._kernels = np.stack([
                    gabor_kernel(p, extent).samples.ravel()
                    for p in (self.params, self.twin)], axis=-1)

            required_extent = property(lambda self: self.extent)
            filter_count = 1

            def respond(self, stimuli):
                from motionprobe.probe import as_stimulus_array
                arr = as_stimulus_array(stimuli, self.extent)
                if arr.shape[0] == 0:
                    return np.zeros((0, 1))
                pre = arr.reshape(arr.shape[0], -1) @ self._kernels
                return np.maximum(0.0, pre).max(axis=1, keepdims=True)

        g = GaborParams(1 / 24, math.radians(60), 0.25, math.radians(-90),
                        8.5, 8.5, 1.0)
        bank = PolarityInvariantBank(g, EXTENT)
        table = run_gridsearch(bank, fit_spec(), chunk=512)
        peak, profile, fit = fit_filter(bank, table, 0)
        from motionprobe.fitting import model_profile_responses
        curve = profile.curve("orientation")
        model = model_profile_responses(fit.params, profile, EXTENT)[1]
        residuals = (model - curve.activations) ** 2
        worst = curve.values[int(np.argmax(residuals))]
        opposite = (math.radians(peak.params["orientation"]) + math.pi) % (2 * math.pi)
        assert wrapped_angle_error(worst, opposite) <= math.radians(30.0)
        assert fit.cost_orientation > 0.1 * fit.cost


class TestNormalizedCost:
    def test_zero_cost(self):
        assert normalized_cost(0.0, 3.0) == 0.0

    def test_arithmetic(self):
        assert normalized_cost(4.0, 2.0) == pytest.approx(1.0)

    def test_rejects_nonpositive_peak(self):
        with pytest.raises(ValueError):
            normalized_cost(1.0, 0.0)

    def test_scaling_invariance_through_refit(self, planted_run):
        """Scaling all activations by c rescales the fitted gain and leaves
        the normalized cost unchanged."""
        from motionprobe.fitting import (PeakResponse, ProfileCurve, SpectralProfile,
                                         _grid_seed_window)
        bank, table = planted_run
        peak, profile, fit = fit_filter(bank, table, 2)
        c = 3.7
        scaled_curves = tuple(
            ProfileCurve(k.axis, k.values, c * k.activations) for k in profile.curves)
        scaled_peak = PeakResponse(peak.filter_id, peak.stimulus_id, peak.grid_indices,
                                   peak.params, c * peak.activation)
        refit = fit_gabor(SpectralProfile(2, scaled_peak, scaled_curves), scaled_peak,
                          extent=EXTENT, seed_window=_grid_seed_window(table.spec))
        assert refit.cost_normalized == pytest.approx(fit.cost_normalized, rel=1e-3, abs=1e-9)
        assert refit.params.gain == pytest.approx(c * fit.params.gain, rel=1e-3)
