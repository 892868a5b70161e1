"""Provider contract, synthetic bank, manifests, response tables."""

import json
import math

import numpy as np
import pytest

from motionprobe import (GaborParams, SyntheticBank, TranslatingWaveParams,
                         active_filters, export_manifest, export_responses,
                         gen_translating_wave, ingest_responses, run_gridsearch,
                         synthetic_respond, unit_response)
from motionprobe.grids import Axis, GridSpec, grid_size, grid_spec_hash
from motionprobe.probe import (DuplicateRowError, ExtentMismatchError,
                               GridHashMismatchError, IncompleteTableError,
                               InvalidActivationError)

EXTENT = (33, 33, 2)


def small_bank() -> SyntheticBank:
    filters = (
        GaborParams(1 / 16, 0.0, 0.2, 0.0, 9.0, 9.0, 1.0),
        GaborParams(1 / 12, math.pi / 3, 0.35, 0.5, 8.0, 10.0, 1.0, bias=-2.0),
        GaborParams(1 / 20, math.pi, 0.1, -0.5, 11.0, 9.0, 1.0, gain=2.0),
    )
    return SyntheticBank(filters, EXTENT)


def small_spec() -> GridSpec:
    return GridSpec("translation", (
        Axis("half_wavelength", "pixels", 6.0, 12.0, step=2.0),
        Axis("orientation", "degrees", 0.0, 300.0, step=60.0),
        Axis("temporal_frequency", "cycles/frame", 0.0, 0.4, step=0.1),
        Axis("phase", "degrees", -180.0, 120.0, step=60.0),
    ))


class TestSyntheticBank:
    def test_matrix_matches_unit_response(self):
        bank = small_bank()
        stimuli = [gen_translating_wave(TranslatingWaveParams(0.06, 0.4, 0.2, 0.1), EXTENT),
                   gen_translating_wave(TranslatingWaveParams(1 / 16, 0.0, 0.2, 0.0), EXTENT)]
        matrix = synthetic_respond(bank, stimuli)
        assert matrix.shape == (2, 3)
        for i, stim in enumerate(stimuli):
            for j, params in enumerate(bank.filters):
                assert matrix[i, j] == pytest.approx(unit_response(params, stim), rel=1e-12)

    def test_matched_wave_positive(self):
        bank = small_bank()
        g = bank.filters[0]
        stim = gen_translating_wave(TranslatingWaveParams(
            g.spatial_frequency, g.orientation, g.temporal_frequency, g.phase), EXTENT)
        assert synthetic_respond(bank, [stim])[0, 0] > 0

    def test_quadrature_wave_zero(self):
        bank = small_bank()
        g = bank.filters[0]
        stim = gen_translating_wave(TranslatingWaveParams(
            g.spatial_frequency, g.orientation, g.temporal_frequency,
            g.phase + math.pi), EXTENT)
        assert synthetic_respond(bank, [stim])[0, 0] == 0.0

    def test_empty_batch(self):
        matrix = synthetic_respond(small_bank(), [])
        assert matrix.shape == (0, 3)

    def test_extent_mismatch(self):
        stim = gen_translating_wave(TranslatingWaveParams(0.06, 0.4, 0.2, 0.1), (17, 17, 2))
        with pytest.raises(ExtentMismatchError):
            synthetic_respond(small_bank(), [stim])

    def test_batch_order_permutes_rows(self):
        bank = small_bank()
        stims = [gen_translating_wave(TranslatingWaveParams(0.05 + 0.01 * k, 0.3, 0.1, 0.0),
                                      EXTENT) for k in range(4)]
        forward = bank.respond(stims)
        backward = bank.respond(stims[::-1])
        np.testing.assert_array_equal(forward, backward[::-1])


class TestManifest:
    def test_record_count_and_hash(self, tmp_path):
        spec = small_spec()
        path = tmp_path / "manifest.jsonl"
        export_manifest(spec, path, EXTENT)
        lines = path.read_text().splitlines()
        header = json.loads(lines[0])
        assert header["grid_spec_hash"] == grid_spec_hash(spec)
        assert header["stimulus_count"] == grid_size(spec)
        assert len(lines) == 1 + grid_size(spec)
        record = json.loads(lines[1])
        assert record["stimulus_id"] == 0
        assert set(record["params"]) == set(spec.axis_names())

    def test_single_tuple_manifest(self, tmp_path):
        spec = GridSpec("translation", (
            Axis("half_wavelength", "pixels", 10.0, 10.0, points=1),
            Axis("orientation", "degrees", 0.0, 0.0, points=1),
            Axis("temporal_frequency", "cycles/frame", 0.1, 0.1, points=1),
            Axis("phase", "degrees", 0.0, 0.0, points=1),
        ))
        path = tmp_path / "one.jsonl"
        export_manifest(spec, path, EXTENT)
        assert len(path.read_text().splitlines()) == 2

    def test_reexport_byte_identical(self, tmp_path):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        export_manifest(small_spec(), a, EXTENT)
        export_manifest(small_spec(), b, EXTENT)
        assert a.read_bytes() == b.read_bytes()


class TestResponseTableIO:
    def run_small(self):
        return run_gridsearch(small_bank(), small_spec(), chunk=64)

    def test_round_trip_bit_exact(self, tmp_path):
        table = self.run_small()
        path = tmp_path / "responses.csv"
        export_responses(table, path)
        back = ingest_responses(path, small_spec())
        np.testing.assert_array_equal(back.activations, table.activations)
        np.testing.assert_array_equal(back.evaluated, table.evaluated)
        assert back.grid_hash == table.grid_hash

    def test_hash_mismatch_rejected(self, tmp_path):
        table = self.run_small()
        path = tmp_path / "responses.csv"
        export_responses(table, path)
        other = GridSpec("translation", (
            Axis("half_wavelength", "pixels", 6.0, 12.0, step=3.0),
            Axis("orientation", "degrees", 0.0, 300.0, step=60.0),
            Axis("temporal_frequency", "cycles/frame", 0.0, 0.4, step=0.1),
            Axis("phase", "degrees", -180.0, 120.0, step=60.0),
        ))
        with pytest.raises(GridHashMismatchError):
            ingest_responses(path, other)

    def test_nan_rejected_with_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(f"# grid_spec_hash={grid_spec_hash(small_spec())}\n"
                        "# filter_count=2\n"
                        "stimulus_id,filter_id,activation\n"
                        "0,0,1.5\n"
                        "0,1,nan\n")
        with pytest.raises(InvalidActivationError, match=":5"):
            ingest_responses(path, small_spec())

    def test_negative_rejected(self, tmp_path):
        path = tmp_path / "neg.csv"
        path.write_text(f"# grid_spec_hash={grid_spec_hash(small_spec())}\n"
                        "# filter_count=1\n"
                        "stimulus_id,filter_id,activation\n"
                        "3,0,-0.25\n")
        with pytest.raises(InvalidActivationError):
            ingest_responses(path, small_spec())

    def test_duplicate_rejected(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text(f"# grid_spec_hash={grid_spec_hash(small_spec())}\n"
                        "# filter_count=1\n"
                        "stimulus_id,filter_id,activation\n"
                        "0,0,1\n"
                        "0,0,1\n")
        with pytest.raises(DuplicateRowError):
            ingest_responses(path, small_spec())

    def test_out_of_range_id_rejected(self, tmp_path):
        path = tmp_path / "oob.csv"
        path.write_text(f"# grid_spec_hash={grid_spec_hash(small_spec())}\n"
                        "# filter_count=1\n"
                        "stimulus_id,filter_id,activation\n"
                        f"{grid_size(small_spec())},0,1\n")
        with pytest.raises(InvalidActivationError):
            ingest_responses(path, small_spec())

    def test_missing_rows_tolerated(self, tmp_path):
        path = tmp_path / "partial.csv"
        path.write_text(f"# grid_spec_hash={grid_spec_hash(small_spec())}\n"
                        "# filter_count=2\n"
                        "stimulus_id,filter_id,activation\n"
                        "0,0,1.5\n")
        table = ingest_responses(path, small_spec())
        assert table.evaluated[0, 0]
        assert not table.evaluated[0, 1]
        assert not table.is_complete(1)


class TestActiveFilters:
    def test_synthetic_bank_fully_active(self):
        table = run_gridsearch(small_bank(), small_spec(), chunk=64)
        assert active_filters(table) == {0, 1, 2}

    def test_all_zero_filter_excluded(self):
        table = run_gridsearch(small_bank(), small_spec(), chunk=64)
        table.activations[:, 1] = 0.0
        assert active_filters(table) == {0, 2}

    def test_single_positive_row_included(self):
        table = run_gridsearch(small_bank(), small_spec(), chunk=64)
        table.activations[:, 2] = 0.0
        table.activations[7, 2] = 1e-6
        assert 2 in active_filters(table)

    def test_incomplete_table_rejected(self):
        table = run_gridsearch(small_bank(), small_spec(), chunk=64)
        table.evaluated[0, 0] = False
        with pytest.raises(IncompleteTableError):
            active_filters(table)
