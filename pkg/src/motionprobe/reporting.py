"""Data-file and raster emission for analysis runs.

Data files (CSV/JSON) are byte-deterministic for identical inputs; raster
images are best-effort visual aids and carry no such guarantee.
"""

from __future__ import annotations

import json
import math

import numpy as np

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .aperture import LEVEL_FACTORS  # noqa: E402
from .gabor import GABOR_CSV_COLUMNS, gabor_csv_row  # noqa: E402


def five_number_summary(values) -> dict:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return {"count": 0}
    q1, q2, q3 = (float(np.percentile(values, p)) for p in (25, 50, 75))
    return {
        "count": int(values.size),
        "min": float(values.min()),
        "q1": q1,
        "median": q2,
        "q3": q3,
        "max": float(values.max()),
    }


def write_json(payload, destination) -> None:
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- fit tables -------------------------------------------------------------

FIT_CSV_HEADER = (
    "filter_id," + ",".join(GABOR_CSV_COLUMNS)
    + ",peak_activation,cost,cost_spatial,cost_orientation,cost_temporal,"
      "cost_normalized,converged,iterations,sigma_t_fixed,at_bounds"
)


def export_fit_table(results, destination) -> None:
    """One CSV row per filter: parameters, costs, and solver flags.

    ``results`` is an iterable of (filter_id, PeakResponse, FitResult).
    """
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(FIT_CSV_HEADER + "\n")
        for filter_id, peak, fit in results:
            bound_str = ";".join(f"{k}:{v}" for k, v in sorted(fit.at_bounds.items()))
            fh.write(
                f"{filter_id},{gabor_csv_row(fit.params)},{peak.activation:.9g},"
                f"{fit.cost:.9g},{fit.cost_spatial:.9g},{fit.cost_orientation:.9g},"
                f"{fit.cost_temporal:.9g},{fit.cost_normalized:.9g},"
                f"{int(fit.converged)},{fit.iterations},{int(fit.sigma_t_fixed)},"
                f"{bound_str}\n")


def export_bandwidth_table(rows, destination) -> None:
    """``rows``: iterable of (filter_id, Bandwidths)."""
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("filter_id,spatial_octaves,orientation_degrees,temporal_cycles,"
                 "truncated_spatial,truncated_orientation,truncated_temporal,"
                 "multilobe_spatial,multilobe_orientation,multilobe_temporal\n")
        for filter_id, bw in rows:
            fh.write(f"{filter_id},{bw.spatial_octaves:.9g},{bw.orientation_degrees:.9g},"
                     f"{bw.temporal_cycles:.9g},"
                     f"{int(bw.truncated[0])},{int(bw.truncated[1])},{int(bw.truncated[2])},"
                     f"{int(bw.multi_lobe[0])},{int(bw.multi_lobe[1])},{int(bw.multi_lobe[2])}\n")


def export_peaks_csv(peaks, axis_names, destination) -> None:
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("filter_id,stimulus_id," + ",".join(axis_names) + ",activation\n")
        for peak in peaks:
            params = ",".join(f"{peak.params[name]:g}" for name in axis_names)
            fh.write(f"{peak.filter_id},{peak.stimulus_id},{params},{peak.activation:.9g}\n")


# --- frequency maps -----------------------------------------------------------

def export_map_csv(spatial, temporal, grid, destination, value_format="%.9g") -> None:
    """Grid CSV: first row the spatial frequencies, first column temporal."""
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("temporal\\spatial," + ",".join(f"{v:.9g}" for v in spatial) + "\n")
        for i, ft in enumerate(temporal):
            cells = ",".join("nan" if np.isnan(v) else value_format % v for v in grid[i])
            fh.write(f"{ft:.9g},{cells}\n")


def save_phase_map_raster(pmap, destination, *, title="") -> None:
    """Darkness-coded phase angle with a red low-power mask, plus power."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    extent = [pmap.spatial_frequencies[0], pmap.spatial_frequencies[-1],
              pmap.temporal_frequencies[0], pmap.temporal_frequencies[-1]]
    axes[0].imshow(pmap.power, origin="lower", extent=extent, aspect="auto", cmap="gray")
    axes[0].set_title("power")
    shade = 1.0 - np.clip(np.nan_to_num(pmap.psi, nan=0.0) / (math.pi / 2), 0, 1)
    rgb = np.stack([shade, shade, shade], axis=-1)
    rgb[pmap.masked] = (1.0, 0.2, 0.2)
    axes[1].imshow(rgb, origin="lower", extent=extent, aspect="auto")
    axes[1].set_title("phase angle (dark = out of phase)")
    for ax in axes:
        ax.set_xlabel("spatial frequency (cycles/pixel)")
        ax.set_ylabel("temporal frequency (cycles/frame)")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)


def save_response_map_raster(rmap, destination, *, title="") -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    extent = [rmap.spatial_frequencies[0], rmap.spatial_frequencies[-1],
              rmap.temporal_frequencies[0], rmap.temporal_frequencies[-1]]
    im = ax.imshow(rmap.response, origin="lower", extent=extent, aspect="auto",
                   cmap="viridis")
    fig.colorbar(im, ax=ax, label="rectified response")
    ax.set_xlabel("spatial frequency (cycles/pixel)")
    ax.set_ylabel("temporal frequency (cycles/frame)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)


# --- flow rendering -----------------------------------------------------------

def _color_wheel() -> np.ndarray:
    """55-entry RY/YG/GC/CB/BM/MR wheel used for flow visualization."""
    ry, yg, gc, cb, bm, mr = 15, 6, 4, 11, 13, 6
    wheel = np.zeros((ry + yg + gc + cb + bm + mr, 3))
    col = 0
    wheel[0:ry, 0] = 255
    wheel[0:ry, 1] = np.floor(255 * np.arange(ry) / ry)
    col += ry
    wheel[col:col + yg, 0] = 255 - np.floor(255 * np.arange(yg) / yg)
    wheel[col:col + yg, 1] = 255
    col += yg
    wheel[col:col + gc, 1] = 255
    wheel[col:col + gc, 2] = np.floor(255 * np.arange(gc) / gc)
    col += gc
    wheel[col:col + cb, 1] = 255 - np.floor(255 * np.arange(cb) / cb)
    wheel[col:col + cb, 2] = 255
    col += cb
    wheel[col:col + bm, 2] = 255
    wheel[col:col + bm, 0] = np.floor(255 * np.arange(bm) / bm)
    col += bm
    wheel[col:col + mr, 2] = 255 - np.floor(255 * np.arange(mr) / mr)
    wheel[col:col + mr, 0] = 255
    return wheel


def flow_to_color(flow: np.ndarray, *, max_magnitude: float | None = None) -> np.ndarray:
    """Standard angular color coding of a (H, W, 2) flow field."""
    u = flow[..., 0]
    v = flow[..., 1]
    magnitude = np.hypot(u, v)
    if max_magnitude is None:
        max_magnitude = max(float(magnitude.max()), 1e-9)
    u = u / max_magnitude
    v = v / max_magnitude
    magnitude = np.hypot(u, v)
    wheel = _color_wheel()
    n = wheel.shape[0]
    angle = np.arctan2(-v, -u) / math.pi
    fk = (angle + 1.0) / 2.0 * (n - 1)
    k0 = np.floor(fk).astype(int) % n
    k1 = (k0 + 1) % n
    frac = fk - np.floor(fk)
    img = np.zeros(flow.shape[:2] + (3,), dtype=np.uint8)
    for c in range(3):
        col0 = wheel[k0, c] / 255.0
        col1 = wheel[k1, c] / 255.0
        col = (1 - frac) * col0 + frac * col1
        col = 1 - np.clip(magnitude, 0, 1) * (1 - col)
        img[..., c] = np.floor(255 * col)
    return img


def save_flow_raster(flow: np.ndarray, destination, *, max_magnitude=None) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.imshow(flow_to_color(flow, max_magnitude=max_magnitude), origin="upper")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)


def save_epe_curves(rows, destination, *, title="") -> None:
    """EPE versus bar scale, one line per flow level."""
    fig, ax = plt.subplots(figsize=(6, 4))
    levels = sorted({row.level for row in rows}, key=lambda lv: LEVEL_FACTORS[lv])
    for level in levels:
        pts = sorted((row.scale, row.epe_mean) for row in rows if row.level == level)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=level)
    ax.set_xlabel("bar scale (pixels)")
    ax.set_ylabel("center EPE (pixels)")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)
