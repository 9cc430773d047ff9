"""Command-line entry point: convert, reflect, simulate, evaluate, rsr, ndvi.

Exit status contract: 0 success, 1 usage or configuration error, 2 partial
data failure (some images processed, some failed), 3 total failure (every
image failed).  Batch commands continue past per-image errors and name the
failures in their log file; all outputs are byte-identical across reruns of
identical inputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import SuascalError
from .evaluate import (METHOD_LEVELS, aggregate, ndvi, read_samples,
                       write_reports)
from .imageio import read_pgm16, read_plane, write_pgm16, write_plane
from .manifest import FlightManifest, ImageEntry, load_manifest
from .radiance import RadianceImage, RawImage, dc_to_radiance
from .reflectance import (SELECTION_MODES, CalibrationImage, PanelObservation,
                          apply_elm, dls_correct, dls_distance, extract_panel,
                          fit_elm_1pt, fit_elm_2pt, aarr,
                          out_of_range_fraction, panel_band_reflectance,
                          reflectance_to_pgm_counts, select_calibration,
                          ReflectanceImage)
from .rsr import (DEFAULT_SHIFT_SCALE, MonochromatorRun, SpectralCurve,
                  is_degenerate, normalize_counts, peak_normalize,
                  relative_response, write_spectral_curve)
from .simulate import (SimulationGrid, band_statistics,
                       grouped_absolute_error, run_maarr_grid, summary_rows)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2
EXIT_TOTAL = 3

RADIANCE_UNITS = "W/m^2/sr/nm"


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    partial data failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _plane_name(image_id: str, band_index: int) -> str:
    return f"{image_id}_b{band_index}.f32"


def _load_radiance(entry: ImageEntry) -> dict[int, RadianceImage]:
    """Read and convert all five bands of one manifest image."""
    planes = {}
    for band in entry.bands:
        pixels = read_pgm16(band.path)
        raw = RawImage(width=pixels.shape[1], height=pixels.shape[0],
                       band_index=band.band_index, pixels=pixels,
                       bits_per_pixel=band.metadata.bits_per_pixel)
        planes[band.band_index] = dc_to_radiance(raw, band.metadata)
    return planes


def _batch_exit(ok: int, failed: int) -> int:
    if failed == 0:
        return EXIT_OK
    return EXIT_TOTAL if ok == 0 else EXIT_PARTIAL


def _map_images(entries, worker, threads: int):
    """Apply worker to each image entry, harvesting per-image failures.

    Returns ``(results, failures)`` keyed by image id; thread fan-out does
    not change either mapping since both are keyed, not ordered.
    """
    results: dict[str, object] = {}
    failures: dict[str, str] = {}

    def run(entry):
        try:
            return entry.image_id, worker(entry), None
        except SuascalError as exc:
            return entry.image_id, None, str(exc)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, entries))
    else:
        outcomes = [run(entry) for entry in entries]
    for image_id, value, error in outcomes:
        if error is None:
            results[image_id] = value
        else:
            failures[image_id] = error
    return results, failures


def cmd_convert(args) -> int:
    manifest = load_manifest(args.manifest)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not manifest.images:
        print("warning: manifest lists no images; nothing to convert",
              file=sys.stderr)
        _write_json(out / "conversion_log.json", {"images": {}, "failures": {}})
        return EXIT_OK

    results, failures = _map_images(manifest.images, _load_radiance,
                                    args.threads)
    log: dict[str, dict] = {}
    for entry in manifest.images:
        if entry.image_id not in results:
            continue
        bands = {}
        for band_index, plane in sorted(results[entry.image_id].items()):
            name = _plane_name(entry.image_id, band_index)
            write_plane(out / name, plane.pixels, band_index, RADIANCE_UNITS)
            bands[str(band_index)] = {
                "path": name,
                "clamped_pixels": plane.clamped_pixel_count,
            }
        log[entry.image_id] = {"bands": bands}
    _write_json(out / "conversion_log.json",
                {"images": log, "failures": failures})
    for image_id, message in sorted(failures.items()):
        print(f"error: image {image_id}: {message}", file=sys.stderr)
    return _batch_exit(len(results), len(failures))


def _calibration_candidates(manifest: FlightManifest,
                            rsr_set: dict[int, SpectralCurve],
                            need_dark: bool) -> list[CalibrationImage]:
    bands = sorted(rsr_set)
    candidates = []
    for entry in manifest.calibration_images:
        if need_dark and entry.calibration_dark is None:
            continue
        planes = _load_radiance(entry)

        def observe(placement) -> PanelObservation:
            spectrum = manifest.panel_spectrum(placement.panel_id)
            truth = panel_band_reflectance(spectrum, rsr_set)
            radiance = np.array([extract_panel(planes[b], placement.roi)
                                 for b in bands])
            return PanelObservation(panel_id=placement.panel_id,
                                    ground_reflectance=truth,
                                    mean_radiance=radiance,
                                    roi=placement.roi)

        dark = entry.calibration_dark
        candidates.append(CalibrationImage(
            image_id=entry.image_id, timestamp=entry.timestamp,
            bright=observe(entry.calibration_bright),
            dls=entry.dls,
            dark=observe(dark) if dark is not None else None))
    return candidates


def cmd_reflect(args) -> int:
    manifest = load_manifest(args.manifest)
    rsr_set = manifest.rsr_set()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not manifest.images:
        print("warning: manifest lists no images; nothing to process",
              file=sys.stderr)
        _write_json(out / "reflectance_report.json",
                    {"method": args.method, "selection": args.selection,
                     "images": {}, "failures": {}})
        return EXIT_OK

    candidates: list[CalibrationImage] = []
    if args.method in ("elm1", "elm2"):
        candidates = _calibration_candidates(manifest, rsr_set,
                                             need_dark=args.method == "elm2")
        if not candidates:
            dark_note = " with a dark panel" if args.method == "elm2" else ""
            print(f"error: method {args.method} needs at least one "
                  f"calibration image{dark_note}", file=sys.stderr)
            return EXIT_USAGE

    def process(entry: ImageEntry) -> dict:
        planes = _load_radiance(entry)
        record: dict[str, object] = {"method": args.method}
        if args.method == "aarr":
            if entry.dls is None:
                raise SuascalError("aarr requires a dls record")
            reflectance = {b: aarr(plane, entry.dls)
                           for b, plane in planes.items()}
        else:
            selected = select_calibration(
                candidates, args.selection, image_dls=entry.dls,
                image_timestamp=entry.timestamp,
                designated_id=args.designated_id)
            fit = fit_elm_1pt if args.method == "elm1" else fit_elm_2pt
            model = fit(selected)
            reflectance = {b: apply_elm(model, plane)
                           for b, plane in planes.items()}
            record["calibration_image"] = selected.image_id
            record["selection"] = args.selection
            if args.selection == "dls" and entry.dls is not None:
                record["selection_metric"] = dls_distance(
                    dls_correct(entry.dls), dls_correct(selected.dls))
            elif args.selection == "time":
                record["selection_metric"] = abs(
                    selected.timestamp - entry.timestamp)
        bands = {}
        for band_index, image in sorted(reflectance.items()):
            name = _plane_name(entry.image_id, band_index)
            write_plane(out / name, image.pixels, band_index, "reflectance")
            if args.write_pgm:
                counts = reflectance_to_pgm_counts(image, args.pgm_scale)
                write_pgm16(out / f"{entry.image_id}_b{band_index}.pgm",
                            counts)
            bands[str(band_index)] = {
                "path": name,
                "out_of_range_fraction": image.out_of_range_fraction,
            }
        record["bands"] = bands
        return record

    results, failures = _map_images(manifest.images, process, args.threads)
    _write_json(out / "reflectance_report.json",
                {"method": args.method, "selection": args.selection,
                 "images": results, "failures": failures})
    for image_id, message in sorted(failures.items()):
        print(f"error: image {image_id}: {message}", file=sys.stderr)
    return _batch_exit(len(results), len(failures))


_ROW_FIELDS = ("atmosphere", "day", "time_utc", "visibility_km",
               "sensor_altitude_km", "target", "band_index",
               "true_reflectance", "recovered_reflectance", "signed_error")


def cmd_simulate(args) -> int:
    config = {}
    if args.grid_config:
        config = json.loads(Path(args.grid_config).read_text(
            encoding="utf-8"))
    grid = SimulationGrid.from_config(config)
    rows = run_maarr_grid(grid, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with (out / "errors.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_ROW_FIELDS)
        for row in rows:
            writer.writerow([row.atmosphere, row.day, repr(row.time_utc),
                             repr(row.visibility_km),
                             repr(row.sensor_altitude_km), row.target,
                             row.band_index, repr(row.true_reflectance),
                             repr(row.recovered_reflectance),
                             repr(row.signed_error)])

    kept = summary_rows(rows, grid.summary_exclude_altitudes_km)
    with (out / "summary_band.csv").open("w", newline="",
                                         encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["band_index", "mean_signed", "std_signed",
                         "mean_absolute", "std_absolute", "n"])
        for band, stats in band_statistics(kept).items():
            writer.writerow([band, repr(stats["mean_signed"]),
                             repr(stats["std_signed"]),
                             repr(stats["mean_absolute"]),
                             repr(stats["std_absolute"]), stats["n"]])

    for attribute in ("atmosphere", "day", "time_utc", "visibility_km",
                      "sensor_altitude_km", "target"):
        grouped = grouped_absolute_error(rows, attribute)
        with (out / f"summary_{attribute}.csv").open(
                "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([attribute, "mean_absolute_error"])
            for key, value in grouped.items():
                writer.writerow([key, repr(value)])
    return EXIT_OK


def cmd_evaluate(args) -> int:
    samples = read_samples(args.samples)
    group_by = tuple(part.strip() for part in args.group_by.split(",")
                     if part.strip())
    reports = aggregate(samples, group_by, sample_std=args.sample_std)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_reports(out / "report.csv", reports)

    if group_by == ("method",):
        # Overall-errors layout: one column per method, one row per statistic.
        by_method = {dict(r.group)["method"]: r for r in reports}
        methods = [m for m in METHOD_LEVELS if m in by_method]
        with (out / "overall_by_method.csv").open(
                "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["statistic"] + methods)
            for stat in ("mean_signed", "std_signed", "mean_absolute",
                         "std_absolute", "n"):
                row = [stat]
                for method in methods:
                    value = getattr(by_method[method], stat)
                    row.append(value if stat == "n" else repr(value))
                writer.writerow(row)
    elif set(group_by) == {"band_index", "method"}:
        # Per-band layout: band rows, method mean/std column pairs.
        cells = {(dict(r.group)["band_index"], dict(r.group)["method"]): r
                 for r in reports}
        bands = sorted({band for band, _ in cells})
        methods = [m for m in METHOD_LEVELS
                   if any(method == m for _, method in cells)]
        header = ["band_index"]
        for method in methods:
            header += [f"{method}_mean_signed", f"{method}_std_signed"]
        with (out / "per_band_by_method.csv").open(
                "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for band in bands:
                row = [band]
                for method in methods:
                    report = cells.get((band, method))
                    if report is None:
                        row += ["", ""]
                    else:
                        row += [repr(report.mean_signed),
                                repr(report.std_signed)]
                writer.writerow(row)
    return EXIT_OK


def cmd_rsr(args) -> int:
    run_dir = Path(args.run_dir)
    band_files = sorted(run_dir.glob("band_*.json"))
    if not band_files:
        print(f"error: no band_*.json sweeps under {run_dir}",
              file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log: dict[str, dict] = {}
    for band_file in band_files:
        payload = json.loads(band_file.read_text(encoding="utf-8"))
        samples = payload["samples"]
        run = MonochromatorRun(
            wavelengths_nm=[s[0] for s in samples],
            mean_counts=[s[1] for s in samples],
            power_w=[s[2] for s in samples],
            gain=float(payload["gain"]),
            exposure_us=float(payload["exposure_us"]),
            band_index=int(payload["band_index"]))
        power = SpectralCurve(run.wavelengths_nm, run.power_w)
        response = relative_response(normalize_counts(run), power,
                                     shift_scale=args.shift_scale)
        degenerate = is_degenerate(response)
        if not degenerate:
            response = peak_normalize(response)
        name = f"rsr_band_{run.band_index}.csv"
        write_spectral_curve(out / name, response)
        log[str(run.band_index)] = {"degenerate": degenerate, "output": name}
        if degenerate:
            print(f"warning: band {run.band_index} sweep is degenerate "
                  "(no positive response)", file=sys.stderr)
    _write_json(out / "rsr_log.json", {"bands": log})
    return EXIT_OK


def cmd_ndvi(args) -> int:
    red_pixels, red_meta = read_plane(args.red)
    nir_pixels, nir_meta = read_plane(args.nir)
    for name, meta, expected in (("red", red_meta, 3), ("nir", nir_meta, 5)):
        if meta["band_index"] != expected:
            print(f"error: {name} plane is band {meta['band_index']}, "
                  f"expected band {expected}", file=sys.stderr)
            return EXIT_USAGE
    red = ReflectanceImage(width=red_meta["width"],
                           height=red_meta["height"], band_index=3,
                           pixels=red_pixels,
                           out_of_range_fraction=out_of_range_fraction(
                               red_pixels))
    nir = ReflectanceImage(width=nir_meta["width"],
                           height=nir_meta["height"], band_index=5,
                           pixels=nir_pixels,
                           out_of_range_fraction=out_of_range_fraction(
                               nir_pixels))
    result = ndvi(red, nir)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_plane(out, result.values, band_index=0, units="ndvi")
    _write_json(Path(str(out) + ".log.json"),
                {"zero_denominator_pixels": result.zero_denominator_count})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="suascal",
                     description="Radiometric calibration toolkit for "
                                 "five-band sUAS imagery")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_threads(p):
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for per-image or per-cell work")

    p = sub.add_parser("convert", help="raw digital counts to radiance")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    add_threads(p)
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("reflect", help="radiance to reflectance")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", required=True, choices=METHOD_LEVELS)
    p.add_argument("--selection", default="dls", choices=SELECTION_MODES)
    p.add_argument("--designated-id", default=None,
                   help="calibration image id for --selection single")
    p.add_argument("--write-pgm", action="store_true",
                   help="also write scaled 16-bit PGM planes")
    p.add_argument("--pgm-scale", type=float, default=10000.0,
                   help="counts per unit reflectance for --write-pgm")
    add_threads(p)
    p.set_defaults(handler=cmd_reflect)

    p = sub.add_parser("simulate", help="run the ratio-error study grid")
    p.add_argument("--out", required=True)
    p.add_argument("--grid-config", default=None,
                   help="JSON overriding the default grid")
    p.add_argument("--seed", type=int, default=None,
                   help="reserved; the simulator is deterministic")
    add_threads(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("evaluate", help="error statistics over samples CSV")
    p.add_argument("--samples", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--group-by", default="",
                   help="comma-separated TargetSample fields")
    p.add_argument("--sample-std", action="store_true",
                   help="sample (ddof=1) instead of population std")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("rsr", help="reduce monochromator sweeps to RSR CSVs")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--shift-scale", type=float, default=DEFAULT_SHIFT_SCALE)
    p.set_defaults(handler=cmd_rsr)

    p = sub.add_parser("ndvi", help="NDVI from red and NIR planes")
    p.add_argument("--red", required=True)
    p.add_argument("--nir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_ndvi)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except SuascalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
