"""Command-line front end.

Subcommands mirror the pipeline stages: ``grid`` runs or exports a
gridsearch, ``fit`` turns a response table into model fits and bandwidth
statistics, ``phase`` emits frequency-domain maps, ``aperture`` evaluates
bar-stimulus flow maps. Every run writes its resolved configuration next
to its outputs; identical inputs produce byte-identical data files.

Exit codes: 0 success, 1 computational failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import aperture as ap
from . import fitting, motion_search, probe, reporting, spectral
from .gabor import half_magnitude_bandwidths, load_bank_csv
from .grids import (DEFAULT_GRIDS, GridSpec, grid_size, grid_spec_hash,
                    parse_grid_spec, serialize_grid_spec)
from .probe import SyntheticBank, active_filters, ingest_responses
from .stimuli import DEFAULT_EXTENT
from .volume import read_volume, write_volume

USAGE_ERROR = 2
FAILURE = 1

OUTPUT_ROOT_ENV = "MOTIONPROBE_OUT"


class ConfigError(Exception):
    """Bad command configuration (maps to exit code 2)."""


def _parse_extent(text: str) -> tuple[int, int, int]:
    try:
        w, h, t = (int(p) for p in text.lower().split("x"))
        return (w, h, t)
    except ValueError as exc:
        raise ConfigError(f"bad extent {text!r}, expected WxHxT") from exc


def _load_spec(args, kind: str) -> GridSpec:
    if getattr(args, "spec", None):
        path = Path(args.spec)
        if not path.exists():
            raise ConfigError(f"grid spec file not found: {path}")
        spec = parse_grid_spec(path.read_text(encoding="utf-8"))
        if spec.motion_kind != kind:
            raise ConfigError(f"spec file is for {spec.motion_kind}, command asked for {kind}")
        return spec
    return DEFAULT_GRIDS[kind]()


def _load_provider(text: str, extent) -> SyntheticBank:
    scheme, _, arg = text.partition(":")
    if scheme != "synthetic" or not arg:
        raise ConfigError(f"unknown provider {text!r} (expected synthetic:<bank.csv>)")
    path = Path(arg)
    if not path.exists():
        raise ConfigError(f"bank file not found: {path}")
    return SyntheticBank(tuple(load_bank_csv(path)), extent)


def _resolve_out(args, command: str, token: str) -> Path:
    if args.out:
        out = Path(args.out)
    else:
        root = os.environ.get(OUTPUT_ROOT_ENV, ".")
        out = Path(root) / f"{command}-{token}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(out: Path, payload: dict) -> None:
    reporting.write_json(payload, out / "config.json")


def cmd_grid(args) -> int:
    kind = args.kind
    extent = _parse_extent(args.extent) if args.extent else DEFAULT_EXTENT
    spec = _load_spec(args, kind)

    if args.export_manifest:
        probe.export_manifest(spec, args.export_manifest, extent)
        print(f"wrote manifest for {grid_size(spec)} stimuli to {args.export_manifest}")
        return 0

    if not args.provider:
        raise ConfigError("grid needs either --provider or --export-manifest")
    provider = _load_provider(args.provider, extent)
    out = _resolve_out(args, "grid", f"{kind}-{grid_spec_hash(spec)}")
    _echo_config(out, {
        "command": "grid", "kind": kind, "extent": list(extent),
        "grid_spec_hash": grid_spec_hash(spec),
        "spec": serialize_grid_spec(spec),
        "provider": args.provider,
    })

    if kind == "translation":
        table = probe.run_gridsearch(provider, spec, chunk=args.chunk)
        reasons = {}
    else:
        table, reasons = motion_search.run_motion_gridsearch(
            provider, spec, kind, chunk=args.chunk)
        motion_search.export_exclusion_log(reasons, out / "excluded.csv")
    probe.export_responses(table, out / "responses.csv")

    peaks = []
    for fid in sorted(active_filters(table)):
        peaks.append(fitting.find_peak(table, fid))
    reporting.export_peaks_csv(peaks, spec.axis_names(), out / "peaks.csv")

    if args.compare_translation:
        trans_spec = DEFAULT_GRIDS["translation"]()
        if args.translation_spec:
            trans_spec = parse_grid_spec(Path(args.translation_spec).read_text())
        trans_table = ingest_responses(args.compare_translation, trans_spec)
        prefs = []
        for fid in sorted(active_filters(table) & active_filters(trans_table)):
            prefs.append(motion_search.compare_motion_preference(trans_table, table, fid))
        motion_search.export_motion_scatter(prefs, kind, out / "motion_scatter.csv")

    print(f"grid run complete: {len(peaks)} active filters, "
          f"{len(reasons)} excluded stimuli, outputs in {out}")
    return 0


def cmd_fit(args) -> int:
    kind = "translation"
    extent = _parse_extent(args.extent) if args.extent else DEFAULT_EXTENT
    spec = _load_spec(args, kind)
    table = ingest_responses(args.responses, spec)
    out = _resolve_out(args, "fit", grid_spec_hash(spec))
    _echo_config(out, {
        "command": "fit", "responses": str(args.responses),
        "grid_spec_hash": grid_spec_hash(spec), "extent": list(extent),
        "provider": args.provider or "",
    })

    ids = sorted(active_filters(table))
    if not ids:
        reporting.write_json({"active_filters": 0, "note": "no active filters"},
                             out / "summary.json")
        print("no active filters in the response table")
        return 0

    peaks = [fitting.find_peak(table, fid) for fid in ids]
    if args.export_profile_manifest:
        fitting.export_profile_manifest(peaks, spec, args.export_profile_manifest, extent)
        print(f"wrote profile manifest for {len(peaks)} filters")
        return 0

    if args.profiles:
        if not args.profile_manifest:
            raise ConfigError("--profiles needs --profile-manifest to map stimuli")
        by_filter = fitting.load_profile_responses(args.profile_manifest,
                                                   args.profiles, peaks)
        missing = [p.filter_id for p in peaks if p.filter_id not in by_filter]
        if missing:
            raise ConfigError(f"profile responses missing filters {missing[:8]}")
        profiles = [by_filter[p.filter_id] for p in peaks]
    elif args.provider:
        provider = _load_provider(args.provider, extent)
        profiles = [fitting.extract_profiles(provider, peak) for peak in peaks]
    else:
        raise ConfigError("fit needs --provider, --profiles, or "
                          "--export-profile-manifest")

    jobs = args.jobs or (os.cpu_count() or 1)
    if jobs > 1 and len(peaks) > 1:
        from joblib import Parallel, delayed
        fits = Parallel(n_jobs=jobs)(
            delayed(fitting.fit_with_disambiguation)(profile, peak, table, extent)
            for profile, peak in zip(profiles, peaks))
    else:
        fits = [fitting.fit_with_disambiguation(profile, peak, table, extent)
                for profile, peak in zip(profiles, peaks)]
    rows = [(peak.filter_id, peak, fit) for peak, fit in zip(peaks, fits)]
    bw_rows = []
    reporting.export_fit_table(rows, out / "fits.csv")

    costs = np.asarray([fit.cost_normalized for _, _, fit in rows])
    keep = max(1, int(np.floor(0.75 * len(rows))))
    order = np.argsort(costs, kind="stable")
    selected = [rows[i] for i in order[:keep]]
    for fid, peak, fit in selected:
        bw = half_magnitude_bandwidths(fit.params, peak.activation, extent,
                                       samples=args.bandwidth_samples)
        bw_rows.append((fid, bw))
    reporting.export_bandwidth_table(bw_rows, out / "bandwidths.csv")

    summary = {
        "active_filters": len(ids),
        "cost_normalized": reporting.five_number_summary(costs),
        "bandwidth_subset_size": keep,
        "spatial_octaves": reporting.five_number_summary(
            [bw.spatial_octaves for _, bw in bw_rows]),
        "orientation_degrees": reporting.five_number_summary(
            [bw.orientation_degrees for _, bw in bw_rows]),
        "temporal_cycles": reporting.five_number_summary(
            [bw.temporal_cycles for _, bw in bw_rows]),
        "converged": int(sum(fit.converged for _, _, fit in rows)),
    }
    reporting.write_json(summary, out / "summary.json")
    print(f"fit {len(rows)} filters; median normalized cost "
          f"{summary['cost_normalized']['median']:.3g}; outputs in {out}")
    return 0


def cmd_phase(args) -> int:
    if bool(args.builtin) == bool(args.filter_volume):
        raise ConfigError("phase needs exactly one of --builtin or --filter-volume")
    if args.builtin:
        if args.builtin not in spectral.SIM_FILTERS:
            raise ConfigError(f"unknown builtin {args.builtin!r}; "
                              f"choose from {sorted(spectral.SIM_FILTERS)}")
        volume = spectral.SIM_FILTERS[args.builtin]()
        token = args.builtin
    else:
        path = Path(args.filter_volume)
        if not path.exists():
            raise ConfigError(f"filter volume not found: {path}")
        volume = read_volume(path)
        token = path.stem
    out = _resolve_out(args, "phase", token)
    _echo_config(out, {
        "command": "phase", "source": token, "extent": list(volume.extent),
        "mask_fraction": args.mask_threshold,
    })

    grid = spectral.spectral_probe_grid(volume.extent)
    pmap = spectral.phase_map(volume, grid, mask_fraction=args.mask_threshold)
    rmap = spectral.freq_response_map(volume, grid, mask_fraction=args.mask_threshold)
    reporting.export_map_csv(pmap.spatial_frequencies, pmap.temporal_frequencies,
                             pmap.psi, out / "psi.csv")
    reporting.export_map_csv(pmap.spatial_frequencies, pmap.temporal_frequencies,
                             pmap.power, out / "power.csv")
    reporting.export_map_csv(rmap.spatial_frequencies, rmap.temporal_frequencies,
                             rmap.response, out / "response.csv")
    reporting.save_phase_map_raster(pmap, out / "phase_map.png", title=token)
    reporting.save_response_map_raster(rmap, out / "response_map.png", title=token)
    print(f"phase analysis of {token}: "
          f"{spectral.out_of_phase_fraction(pmap):.1%} of powered coefficients "
          f"out of phase; outputs in {out}")
    return 0


def cmd_aperture(args) -> int:
    scales = [float(s) for s in args.scales.split(",") if s]
    if not scales:
        raise ConfigError("aperture needs at least one scale")
    input_size = _parse_extent(args.input_size + "x2")[:2] if args.input_size else (512, 384)
    levels = tuple(args.levels.split(",")) if args.levels else ("f6", "f4", "f2")
    for level in levels:
        if level not in ap.LEVEL_FACTORS:
            raise ConfigError(f"unknown flow level {level!r}")

    if args.emit_bars:
        bars_dir = Path(args.emit_bars)
        bars_dir.mkdir(parents=True, exist_ok=True)
        for scale in scales:
            for direction in ap.DIRECTIONS:
                case = ap.make_case(scale, direction, input_size=input_size,
                                    magnitude=args.magnitude)
                volume, gt = ap.bar_pair_for_case(case, input_size=input_size)
                stem = f"scale{scale:g}_{direction}"
                write_volume(bars_dir / f"{stem}.stvl", volume)
                ap.write_flo(bars_dir / f"{stem}_gt.flo", np.moveaxis(gt, 0, -1))
        print(f"wrote bar stimuli for {len(scales)} scales to {bars_dir}")
        return 0

    if not args.flow_dir:
        raise ConfigError("aperture needs --flow-dir (or --emit-bars)")
    source = ap.DirectoryFlowSource(args.flow_dir)
    out = _resolve_out(args, "aperture", Path(args.flow_dir).name or "flows")
    _echo_config(out, {
        "command": "aperture", "flow_dir": str(args.flow_dir), "scales": scales,
        "levels": list(levels), "input_size": list(input_size),
        "magnitude": args.magnitude, "provider_tag": args.provider_tag,
    })
    rows = ap.run_sweep(scales, source, levels=levels, input_size=input_size,
                        magnitude=args.magnitude, provider_tag=args.provider_tag)
    ap.export_sweep_csv(rows, out / "sweep.csv", provider_tag=args.provider_tag)
    reporting.save_epe_curves(rows, out / "epe_curves.png", title=args.provider_tag)
    if args.render_flows:
        renders = out / "renders"
        renders.mkdir(exist_ok=True)
        for scale in scales:
            for direction in ap.DIRECTIONS:
                for level in levels:
                    flow = source.get(scale, direction, level)
                    reporting.save_flow_raster(
                        flow.values, renders / f"scale{scale:g}_{direction}_{level}.png",
                        max_magnitude=args.magnitude)
    print(f"aperture sweep: {len(rows)} rows; outputs in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motionprobe",
        description="Probe spatiotemporal filter banks with moving-wave stimuli")
    sub = parser.add_subparsers(dest="command", required=True)

    p_grid = sub.add_parser("grid", help="run or export a stimulus gridsearch")
    p_grid.add_argument("--kind", required=True,
                        choices=("translation", "dilation", "rotation"))
    p_grid.add_argument("--spec", help="grid spec file (defaults to the canonical grid)")
    p_grid.add_argument("--extent", help="stimulus extent WxHxT (default 383x383x2)")
    p_grid.add_argument("--provider", help="filter bank, e.g. synthetic:bank.csv")
    p_grid.add_argument("--export-manifest", help="write the stimulus manifest and stop")
    p_grid.add_argument("--compare-translation",
                        help="translation response CSV for dominance comparison")
    p_grid.add_argument("--translation-spec", help="spec of the translation table")
    p_grid.add_argument("--chunk", type=int, default=512)
    p_grid.add_argument("--out")
    p_grid.set_defaults(func=cmd_grid)

    p_fit = sub.add_parser("fit", help="fit response models to a measured table")
    p_fit.add_argument("--responses", required=True)
    p_fit.add_argument("--spec")
    p_fit.add_argument("--extent")
    p_fit.add_argument("--provider")
    p_fit.add_argument("--export-profile-manifest",
                       help="write profile sweep manifest for an external provider")
    p_fit.add_argument("--profiles", help="measured profile responses CSV")
    p_fit.add_argument("--profile-manifest",
                       help="the manifest the profile responses were measured from")
    p_fit.add_argument("--bandwidth-samples", type=int, default=2001)
    p_fit.add_argument("--jobs", type=int, default=0,
                       help="parallel fit workers (default: all cores)")
    p_fit.add_argument("--out")
    p_fit.set_defaults(func=cmd_fit)

    p_phase = sub.add_parser("phase", help="phase/response maps of a filter volume")
    p_phase.add_argument("--builtin", help="dilation | rotation | occlusion | translation")
    p_phase.add_argument("--filter-volume", help="STVL volume to analyze")
    p_phase.add_argument("--mask-threshold", type=float, default=0.01)
    p_phase.add_argument("--out")
    p_phase.set_defaults(func=cmd_phase)

    p_ap = sub.add_parser("aperture", help="EPE-vs-scale sweep from flow maps")
    p_ap.add_argument("--flow-dir")
    p_ap.add_argument("--scales", required=True, help="comma-separated bar scales")
    p_ap.add_argument("--levels", help="comma-separated flow levels (default f6,f4,f2)")
    p_ap.add_argument("--input-size", help="canvas WxH (default 512x384)")
    p_ap.add_argument("--magnitude", type=float, default=ap.DEFAULT_MAGNITUDE)
    p_ap.add_argument("--provider-tag", default="")
    p_ap.add_argument("--emit-bars", help="write bar stimuli + ground truth and stop")
    p_ap.add_argument("--render-flows", action="store_true",
                      help="also write color-wheel renders of every flow map")
    p_ap.add_argument("--out")
    p_ap.set_defaults(func=cmd_aperture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":
    sys.exit(main())
