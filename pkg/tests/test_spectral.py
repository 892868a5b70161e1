"""3-D DFT, phase angles, and frequency-domain response maps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motionprobe import (GaborParams, TranslatingWaveParams, Volume, dft3,
                         gen_translating_wave, idft3, phase_difference)
from motionprobe.grids import Axis, GridSpec
from motionprobe.spectral import (NonIntegerFrequencyError, count_response_lobes,
                                  dilation_sim_filter, freq_response_map,
                                  occlusion_sim_filter, out_of_phase_fraction,
                                  phase_map, rotation_sim_filter, sim_time_origin,
                                  spectral_probe_grid, translation_sim_filter)
from motionprobe.stimuli import probe_wave

EXTENT = (33, 33, 8)


class TestDft3:
    def test_constant_volume_all_power_at_dc(self):
        spec = dft3(Volume(np.full((4, 9, 9), 2.5)))
        power = np.abs(spec.coefficients)
        assert power[0, 0, 0] == pytest.approx(2.5 * 4 * 9 * 9)
        power[0, 0, 0] = 0.0
        assert power.max() < 1e-9

    def test_pure_cosine_two_coefficients(self):
        wave = probe_wave(3 / 9, 0.0, 1 / 4, 0.7, (9, 9, 4))
        coeff = dft3(wave).coefficients
        power = np.abs(coeff) ** 2
        flat = np.sort(power.ravel())[::-1]
        assert flat[0] == pytest.approx(flat[1], rel=1e-9)
        assert flat[2] < 1e-12 * flat[0]

    def test_parseval_on_random_volume(self):
        rng = np.random.default_rng(9)
        vol = Volume(rng.normal(size=(5, 11, 7)))
        spec = dft3(vol)
        lhs = float(np.sum(np.abs(spec.coefficients) ** 2)) / vol.samples.size
        rhs = float(np.sum(vol.samples ** 2))
        assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_round_trip(self):
        rng = np.random.default_rng(10)
        vol = Volume(rng.normal(size=(3, 9, 9)))
        back = idft3(dft3(vol))
        np.testing.assert_allclose(back.samples, vol.samples, rtol=0, atol=1e-12)

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(11)
        vol = Volume(rng.normal(size=(4, 5, 5)))
        coeff = dft3(vol).coefficients
        for idx in [(1, 2, 3), (2, 0, 4), (3, 4, 1)]:
            neg = tuple((-k) % n for k, n in zip(idx, coeff.shape))
            assert coeff[idx] == pytest.approx(np.conj(coeff[neg]), rel=1e-9)


class TestPhaseDifference:
    def test_equal_vectors(self):
        assert phase_difference(1 + 2j, 1 + 2j) == pytest.approx(0.0, abs=1e-7)

    def test_orthogonal(self):
        q = 0.3 - 1.1j
        assert phase_difference(1j * q, q) == pytest.approx(math.pi / 2)

    def test_antiparallel(self):
        q = 2.0 + 0.5j
        assert phase_difference(-q, q) == pytest.approx(math.pi)

    def test_zero_magnitude_rejected(self):
        with pytest.raises(ValueError):
            phase_difference(0j, 1 + 1j)

    @given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3,
                              allow_nan=False, allow_infinity=False),
           st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3,
                              allow_nan=False, allow_infinity=False),
           st.floats(0.01, 100), st.floats(0.01, 100))
    @settings(max_examples=60)
    def test_symmetric_and_scale_invariant(self, p, q, a, b):
        psi = phase_difference(p, q)
        assert 0.0 <= psi <= math.pi
        assert phase_difference(q, p) == pytest.approx(psi, abs=1e-9)
        assert phase_difference(a * p, b * q) == pytest.approx(psi, abs=1e-7)


class TestMaps:
    def test_matched_filter_in_phase_at_peak(self):
        g = GaborParams(4 / 33, 0.0, 2 / 8, 0.0, 8.0, 8.0, 2.0)
        from motionprobe.gabor import gabor_kernel
        filt = gabor_kernel(g, EXTENT)
        grid = spectral_probe_grid(EXTENT)
        pmap = phase_map(filt, grid)
        j = int(np.argmin(np.abs(pmap.spatial_frequencies - 4 / 33)))
        i = int(np.argmin(np.abs(pmap.temporal_frequencies - 2 / 8)))
        assert not pmap.masked[i, j]
        assert pmap.psi[i, j] == pytest.approx(0.0, abs=1e-6)

    def test_non_integer_frequency_rejected(self):
        filt = translation_sim_filter(EXTENT)
        grid = GridSpec("translation", (
            Axis("spatial_frequency", "cycles/pixel", 0.1, 0.2, points=3),
            Axis("temporal_frequency", "cycles/frame", 0.0, 0.25, points=2),
        ))
        with pytest.raises(NonIntegerFrequencyError):
            phase_map(filt, grid)

    def test_response_equals_direct_dot_product(self):
        rng = np.random.default_rng(30)
        filt = Volume(rng.normal(size=(8, 33, 33)))
        grid = spectral_probe_grid(EXTENT)
        rmap = freq_response_map(filt, grid)
        for _ in range(25):
            i = rng.integers(0, len(rmap.temporal_frequencies))
            j = rng.integers(0, len(rmap.spatial_frequencies))
            wave = probe_wave(rmap.spatial_frequencies[j], 0.0,
                              rmap.temporal_frequencies[i], 0.0, EXTENT)
            direct = max(0.0, float(np.vdot(wave.samples, filt.samples)))
            assert rmap.response[i, j] == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_response_handles_self_conjugate_bins(self):
        rng = np.random.default_rng(31)
        filt = Volume(rng.normal(size=(8, 33, 33)))
        grid = GridSpec("translation", (
            Axis("spatial_frequency", "cycles/pixel", 0.0, 0.0, points=1),
            Axis("temporal_frequency", "cycles/frame", -0.5, 0.5, points=9),
        ))
        rmap = freq_response_map(filt, grid)
        for i, ft in enumerate(rmap.temporal_frequencies):
            wave = probe_wave(0.0, 0.0, ft, 0.0, EXTENT)
            direct = max(0.0, float(np.vdot(wave.samples, filt.samples)))
            assert rmap.response[i, 0] == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_quarter_turn_phase_means_zero_response(self):
        g = GaborParams(4 / 33, 0.0, 2 / 8, 0.0, 8.0, 8.0, 2.0)
        from motionprobe.gabor import gabor_kernel
        filt = gabor_kernel(g, EXTENT)
        grid = spectral_probe_grid(EXTENT)
        rmap_quarter = freq_response_map(filt, grid, probe_phase=math.pi / 2)
        pmap_quarter = phase_map(filt, grid, probe_phase=math.pi / 2)
        j = int(np.argmin(np.abs(rmap_quarter.spatial_frequencies - 4 / 33)))
        i = int(np.argmin(np.abs(rmap_quarter.temporal_frequencies - 2 / 8)))
        assert pmap_quarter.psi[i, j] == pytest.approx(math.pi / 2, abs=1e-6)
        assert rmap_quarter.response[i, j] == pytest.approx(0.0, abs=1e-6)


class TestSimulations:
    def test_dilation_more_out_of_phase_than_translation(self):
        ext = (65, 65, 8)
        origin = sim_time_origin(ext)
        grid = spectral_probe_grid(ext)
        dil = phase_map(dilation_sim_filter(ext), grid, time_origin=origin)
        tra = phase_map(translation_sim_filter(ext), grid, time_origin=origin)
        assert out_of_phase_fraction(dil) > out_of_phase_fraction(tra)

    def test_dilation_out_of_phase_grows_off_axis(self):
        """The out-of-phase region widens away from the principal temporal
        axis: the diamond shape."""
        ext = (65, 65, 8)
        pmap = phase_map(dilation_sim_filter(ext), spectral_probe_grid(ext),
                         time_origin=sim_time_origin(ext))
        center_row = np.abs(pmap.temporal_frequencies).argmin()
        off_rows = [i for i in range(len(pmap.temporal_frequencies)) if i != center_row]
        frac_center = np.mean(pmap.out_of_phase[center_row][~pmap.masked[center_row]])
        frac_off = np.concatenate(
            [pmap.out_of_phase[i][~pmap.masked[i]] for i in off_rows]).mean()
        assert frac_off > frac_center

    def test_rotation_two_lobes_at_opposite_orientations(self):
        ext = (65, 65, 8)
        rmap = freq_response_map(rotation_sim_filter(ext), spectral_probe_grid(ext),
                                 time_origin=sim_time_origin(ext))
        lobes = count_response_lobes(rmap)
        assert len(lobes) == 2
        (fx1, ft1, _), (fx2, ft2, _) = lobes
        assert fx1 == pytest.approx(-fx2, rel=0.15)
        assert abs(ft1) <= 1 / 8 and abs(ft2) <= 1 / 8
        assert rmap.response.max() > 0

    def test_occlusion_two_lobes_distinct_frequencies(self):
        ext = (65, 65, 8)
        rmap = freq_response_map(occlusion_sim_filter(ext), spectral_probe_grid(ext))
        lobes = count_response_lobes(rmap, positive_spatial_only=True)
        assert len(lobes) == 2
        (fx1, ft1, _), (fx2, ft2, _) = lobes
        assert abs(fx1 - fx2) > 1 / 65 or abs(ft1 - ft2) > 1 / 8

    def test_occlusion_tails_out_of_phase(self):
        ext = (65, 65, 8)
        pmap = phase_map(occlusion_sim_filter(ext), spectral_probe_grid(ext))
        assert np.count_nonzero(pmap.out_of_phase) > 0
        assert out_of_phase_fraction(pmap) > 0.1


class TestSpectralUnitResponse:
    def test_matches_direct_for_wave_stimuli(self):
        from motionprobe import unit_response, unit_response_spectral
        rng = np.random.default_rng(12)
        for _ in range(5):
            g = GaborParams(rng.uniform(0.05, 0.2), rng.uniform(0, 2 * math.pi),
                            rng.uniform(-0.4, 0.4), rng.uniform(-3, 3),
                            rng.uniform(4, 10), rng.uniform(4, 10), rng.uniform(1, 3),
                            gain=rng.uniform(0.5, 2), bias=rng.uniform(-3, 1))
            stim = gen_translating_wave(TranslatingWaveParams(
                rng.uniform(0.05, 0.2), rng.uniform(0, 2 * math.pi),
                rng.uniform(-0.5, 0.5), rng.uniform(-3, 3)), (65, 65, 8))
            assert unit_response_spectral(g, stim) == pytest.approx(
                unit_response(g, stim), rel=1e-6, abs=1e-9)
