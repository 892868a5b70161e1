"""Filter banks under test, and the files that carry their responses.

The toolkit never talks to a network directly; it talks to a
:class:`ResponseProvider`, something with a required stimulus extent, a
filter count, and a batched ``respond``. Two implementations matter:

* :class:`SyntheticBank` - a bank of planted model Gabors. This is the
  verification oracle: every pipeline stage can be checked against ground
  truth because the tuning of each filter is known by construction.
* file-based - an external adapter renders stimuli from an exported
  manifest and writes a response table CSV, which :func:`ingest_responses`
  validates back into a :class:`ResponseTable`.

Wire formats (both carry the grid hash on a comment line):

* manifest: JSON lines, one header record then one record per stimulus;
* response table: CSV ``stimulus_id,filter_id,activation`` with
  activations printed to 9 significant digits (exact for float32).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from .gabor import GaborParams, gabor_kernel
from .grids import GridSpec, grid_array, grid_size, grid_spec_hash
from .stimuli import DEFAULT_EXTENT, grid_stimulus_batch
from .volume import Volume


class ExtentMismatchError(ValueError):
    """Stimulus extent differs from the provider's required extent."""


class IngestError(ValueError):
    """A response file failed validation."""


class GridHashMismatchError(IngestError):
    """Response file was produced from a different grid."""


class InvalidActivationError(IngestError):
    """Activation is NaN, negative, or keyed outside the grid."""


class DuplicateRowError(IngestError):
    """Two rows carry the same (stimulus_id, filter_id)."""


class IncompleteTableError(ValueError):
    """Operation requires rows that were never ingested."""


@runtime_checkable
class ResponseProvider(Protocol):
    """Batch response contract for a filter bank under test."""

    @property
    def required_extent(self) -> tuple[int, int, int]: ...

    @property
    def filter_count(self) -> int: ...

    def respond(self, stimuli) -> np.ndarray:
        """Activation matrix of shape (n_stimuli, filter_count), all >= 0."""
        ...


def as_stimulus_array(stimuli, extent) -> np.ndarray:
    """Stack stimuli into (n, T, H, W) and check the extent."""
    w, h, t = extent
    if isinstance(stimuli, np.ndarray):
        arr = stimuli
    else:
        arr = np.stack([s.samples if isinstance(s, Volume) else np.asarray(s)
                        for s in stimuli]) if len(stimuli) else np.zeros((0, t, h, w))
    if arr.ndim != 4 or arr.shape[1:] != (t, h, w):
        raise ExtentMismatchError(
            f"stimulus batch shape {arr.shape} does not match extent {extent} "
            f"(expected (n, {t}, {h}, {w}))")
    return arr


@dataclass
class SyntheticBank:
    """A bank of planted model filters with a common probing extent."""

    filters: tuple[GaborParams, ...]
    extent: tuple[int, int, int] = DEFAULT_EXTENT

    def __post_init__(self):
        self.filters = tuple(self.filters)
        if not self.filters:
            raise ValueError("bank needs at least one filter")
        self._kernels = None
        self._gains = np.asarray([f.gain for f in self.filters])
        self._biases = np.asarray([f.bias for f in self.filters])

    @property
    def required_extent(self) -> tuple[int, int, int]:
        return self.extent

    @property
    def filter_count(self) -> int:
        return len(self.filters)

    def kernel_matrix(self) -> np.ndarray:
        """(n_samples, n_filters) kernel stack, built once."""
        if self._kernels is None:
            cols = [gabor_kernel(f, self.extent).samples.ravel() for f in self.filters]
            self._kernels = np.stack(cols, axis=-1)
        return self._kernels

    def respond(self, stimuli) -> np.ndarray:
        arr = as_stimulus_array(stimuli, self.extent)
        if arr.shape[0] == 0:
            return np.zeros((0, self.filter_count))
        pre = arr.reshape(arr.shape[0], -1) @ self.kernel_matrix()
        return np.maximum(0.0, self._gains * (pre + self._biases))


def synthetic_respond(bank: SyntheticBank, stimuli) -> np.ndarray:
    """Activation matrix of a synthetic bank: entry (i, j) is filter j's
    rectified response to stimulus i."""
    return bank.respond(stimuli)


@dataclass
class ResponseTable:
    """Measured activations over a grid, with per-pair bookkeeping.

    ``evaluated`` marks (stimulus, filter) pairs that carry data;
    ``excluded`` marks whole stimuli skipped on purpose (aliasing
    constraints). A filter is complete when every non-excluded stimulus
    was evaluated for it.
    """

    spec: GridSpec
    grid_hash: str
    activations: np.ndarray              # float32 (n_stimuli, n_filters)
    evaluated: np.ndarray                # bool (n_stimuli, n_filters)
    excluded: np.ndarray = field(default=None)  # bool (n_stimuli,)

    def __post_init__(self):
        if self.excluded is None:
            self.excluded = np.zeros(self.activations.shape[0], dtype=bool)
        n_stim, n_filt = self.activations.shape
        if self.evaluated.shape != (n_stim, n_filt) or self.excluded.shape != (n_stim,):
            raise ValueError("table bookkeeping arrays have inconsistent shapes")

    @property
    def stimulus_count(self) -> int:
        return self.activations.shape[0]

    @property
    def filter_count(self) -> int:
        return self.activations.shape[1]

    def is_complete(self, filter_id: int) -> bool:
        return bool(np.all(self.evaluated[~self.excluded, filter_id]))

    def all_complete(self) -> bool:
        return bool(np.all(self.evaluated[~self.excluded, :]))


def run_gridsearch(provider: ResponseProvider, spec: GridSpec, *,
                   admissible: np.ndarray | None = None,
                   chunk: int = 512) -> ResponseTable:
    """Measure every (admissible) grid stimulus through the provider."""
    rows = grid_array(spec)
    names = spec.axis_names()
    extent = provider.required_extent
    n_stim = rows.shape[0]
    n_filt = provider.filter_count
    if admissible is None:
        admissible = np.ones(n_stim, dtype=bool)
    activations = np.zeros((n_stim, n_filt), dtype=np.float32)
    evaluated = np.zeros((n_stim, n_filt), dtype=bool)
    idx = np.flatnonzero(admissible)
    for lo in range(0, len(idx), chunk):
        sel = idx[lo:lo + chunk]
        stimuli = grid_stimulus_batch(spec.motion_kind, names, rows[sel], extent)
        activations[sel] = provider.respond(stimuli).astype(np.float32)
        evaluated[sel] = True
    return ResponseTable(spec, grid_spec_hash(spec), activations, evaluated,
                         excluded=~admissible)


def active_filters(table: ResponseTable) -> set[int]:
    """Filters whose maximum activation over the grid is strictly positive."""
    if not table.all_complete():
        raise IncompleteTableError("table has missing rows; cannot decide activity")
    usable = ~table.excluded
    if not np.any(usable):
        return set()
    peaks = table.activations[usable].max(axis=0)
    return {int(j) for j in np.flatnonzero(peaks > 0)}


# --- manifest -------------------------------------------------------------

def export_manifest(spec: GridSpec, destination, extent=DEFAULT_EXTENT) -> None:
    """Write the stimulus manifest (JSON lines) for a grid.

    The first record describes the grid (hash, kind, extent, axes with
    units); each following record is one stimulus with its id and full
    parameter tuple. Output is byte-deterministic for a given spec.
    """
    names = spec.axis_names()
    header_axes = []
    for ax in spec.axes:
        rng = (f'"step": {float(ax.step)!r}' if ax.step is not None
               else f'"points": {ax.points}')
        header_axes.append(
            f'{{"name": "{ax.name}", "unit": "{ax.unit}", '
            f'"start": {float(ax.start)!r}, "stop": {float(ax.stop)!r}, {rng}}}')
    header = (
        f'{{"grid_spec_hash": "{grid_spec_hash(spec)}", '
        f'"motion_kind": "{spec.motion_kind}", '
        f'"extent": [{extent[0]}, {extent[1]}, {extent[2]}], '
        f'"stimulus_count": {grid_size(spec)}, '
        f'"axes": [{", ".join(header_axes)}]}}\n')
    kind = spec.motion_kind
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header)
        rows = grid_array(spec).tolist()
        for i, row in enumerate(rows):
            params = ", ".join(f'"{name}": {value!r}' for name, value in zip(names, row))
            fh.write(f'{{"stimulus_id": {i}, "motion_kind": "{kind}", '
                     f'"params": {{{params}}}}}\n')


# --- response table files ---------------------------------------------------

RESPONSE_HEADER = "stimulus_id,filter_id,activation"


def export_responses(table: ResponseTable, destination) -> None:
    """Write all evaluated pairs as CSV; excluded stimuli are omitted."""
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# grid_spec_hash={table.grid_hash}\n")
        fh.write(f"# filter_count={table.filter_count}\n")
        fh.write(RESPONSE_HEADER + "\n")
        evaluated = table.evaluated
        activations = table.activations
        for i in range(table.stimulus_count):
            row_eval = np.flatnonzero(evaluated[i])
            for j in row_eval:
                fh.write(f"{i},{j},{activations[i, j]:.9g}\n")


def ingest_responses(path, spec: GridSpec, *, filter_count: int | None = None,
                     excluded: np.ndarray | None = None) -> ResponseTable:
    """Validate and load a response CSV produced for ``spec``.

    Distinct failures raise distinct errors: a hash from another grid,
    NaN/negative activations or out-of-range ids (with the offending line),
    and duplicate (stimulus, filter) keys. Missing pairs are tolerated and
    tracked in the completeness bitmap.
    """
    expect_hash = grid_spec_hash(spec)
    n_stim = grid_size(spec)
    file_hash = None
    file_filters = None
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key == "grid_spec_hash":
                    file_hash = val
                elif key == "filter_count":
                    file_filters = int(val)
                continue
            if line == RESPONSE_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise InvalidActivationError(f"{path}:{lineno}: malformed row {line!r}")
            entries.append((lineno, int(parts[0]), int(parts[1]), parts[2]))

    if file_hash is None or file_hash != expect_hash:
        raise GridHashMismatchError(
            f"{path}: grid hash {file_hash!r} does not match spec hash {expect_hash!r}")
    if filter_count is None:
        if file_filters is not None:
            filter_count = file_filters
        elif entries:
            filter_count = max(e[2] for e in entries) + 1
        else:
            raise IngestError(f"{path}: empty table and no filter_count header")

    activations = np.zeros((n_stim, filter_count), dtype=np.float32)
    evaluated = np.zeros((n_stim, filter_count), dtype=bool)
    for lineno, sid, fid, text in entries:
        if not (0 <= sid < n_stim) or not (0 <= fid < filter_count):
            raise InvalidActivationError(
                f"{path}:{lineno}: ids ({sid}, {fid}) outside grid "
                f"({n_stim} stimuli x {filter_count} filters)")
        value = np.float32(text)
        if not math.isfinite(value) or value < 0:
            raise InvalidActivationError(
                f"{path}:{lineno}: activation {text!r} for stimulus {sid}, filter {fid} "
                "must be finite and non-negative")
        if evaluated[sid, fid]:
            raise DuplicateRowError(
                f"{path}:{lineno}: duplicate entry for stimulus {sid}, filter {fid}")
        activations[sid, fid] = value
        evaluated[sid, fid] = True
    return ResponseTable(spec, expect_hash, activations, evaluated, excluded=excluded)
