"""Synthetic flight builder shared by the CLI and end-to-end tests.

Builds a complete on-disk flight: five-band 16-bit PGM rasters with bright
and dark panel patches, flat panel spectra, DLS records and the manifest
JSON binding it all.  The numbers are chosen so every recovery route is
exact: the radiance scale is ``a1 / (gain * exposure * 2**16) = 2.5e-6``
per count, panel counts are integers on that scale, both panels sit on a
line through the origin (so 1-point and 2-point fits agree), and the DLS
irradiance is ``pi`` times the radiance a perfect diffuser would see.
"""

import json

import numpy as np

from suascal.imageio import write_pgm16
from suascal.rsr import SpectralCurve, write_spectral_curve

WIDTH, HEIGHT = 64, 48
BRIGHT_ROI = (4, 4, 8, 8)
DARK_ROI = (20, 4, 8, 8)
BRIGHT_RHO = 0.5
DARK_RHO = 0.05
#: Per-band radiance of the bright panel; dark is a tenth of it.
BRIGHT_RADIANCE = (0.10, 0.105, 0.11, 0.115, 0.12)
#: Radiance a 100% diffuser would report under the same illumination.
REFERENCE_RADIANCE = (0.20, 0.21, 0.22, 0.23, 0.24)
COUNT_SCALE = 2.5e-6  # radiance per digital count at the metadata below


def flat_spectrum(value):
    return SpectralCurve(np.array([330.0, 1200.0]), np.full(2, float(value)))


def band_metadata():
    return {
        "a1": 163.84, "a2": 0.0, "a3": 0.0, "gain": 1.0,
        "exposure_us": 1000.0, "dark_level": 0.0, "bits_per_pixel": 16,
        "vignette": {"center_x": 0.0, "center_y": 0.0,
                     "coefficients": [0.0] * 6},
    }


def upright_dls_record(reference_radiance, timestamp):
    """DLS record whose corrected irradiance is exactly pi*reference."""
    return {
        "raw_irradiance": [float(np.pi) * r for r in reference_radiance],
        "solar_elevation_deg": 90.0,
        "sun_sensor_angle_deg": 0.0,
        "timestamp": timestamp,
    }


def panel_raster(band, scale=1.0):
    """Raster for one band: background plus the two panel patches."""
    bright = round(BRIGHT_RADIANCE[band - 1] / COUNT_SCALE * scale)
    dark = round(bright / 10)
    pixels = np.full((HEIGHT, WIDTH), dark, dtype=np.uint16)
    x, y, w, h = BRIGHT_ROI
    pixels[y:y + h, x:x + w] = bright
    x, y, w, h = DARK_ROI
    pixels[y:y + h, x:x + w] = dark
    return pixels


def build_flight(root, field_images=2, with_decoy=False, weather="sunny",
                 altitude_ft=225):
    """Write a flight folder under ``root``; returns the manifest path.

    The flight holds calibration image ``cal_a`` (t=1000), optionally a
    decoy ``cal_b`` (t=5000, 25% brighter illumination), and ``field_images``
    frames (t=1001, 1002, ...) photographing the same panels under cal_a's
    illumination, each carrying cal_a's DLS record.
    """
    root.mkdir(parents=True, exist_ok=True)
    write_spectral_curve(root / "panel_bright.csv", flat_spectrum(BRIGHT_RHO))
    write_spectral_curve(root / "panel_dark.csv", flat_spectrum(DARK_RHO))

    def image_entry(image_id, timestamp, scale, calibration):
        bands = []
        for band in range(1, 6):
            name = f"{image_id}_b{band}.pgm"
            write_pgm16(root / name, panel_raster(band, scale))
            bands.append({"band_index": band, "path": name,
                          "metadata": band_metadata()})
        reference = [r * scale for r in REFERENCE_RADIANCE]
        entry = {"image_id": image_id, "timestamp": timestamp,
                 "bands": bands,
                 "dls": upright_dls_record(reference, timestamp)}
        if calibration:
            entry["calibration"] = {
                "bright": {"panel_id": "bright", "roi": list(BRIGHT_ROI)},
                "dark": {"panel_id": "dark", "roi": list(DARK_ROI)},
            }
        return entry

    images = [image_entry("cal_a", 1000.0, 1.0, True)]
    if with_decoy:
        images.append(image_entry("cal_b", 5000.0, 1.25, True))
    for i in range(field_images):
        # Field frames share cal_a's illumination (scale 1.0), so their DLS
        # vectors match cal_a's and sit 25% away from the decoy's.
        images.append(image_entry(f"field_{i + 1}", 1001.0 + i, 1.0, False))

    manifest = {
        "flight": {"id": "synthetic-flight", "date": "2021-06-20",
                   "weather": weather, "altitude_ft": altitude_ft},
        "panels": {"bright": "panel_bright.csv", "dark": "panel_dark.csv"},
        "images": images,
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return path
