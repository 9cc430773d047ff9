"""Manifest loading and the command-line workflows built on top of it."""

import json

import numpy as np
import pytest

import helpers
from suascal.cli import main
from suascal.errors import ManifestError
from suascal.imageio import read_plane, read_pgm16
from suascal.manifest import load_manifest


@pytest.fixture
def flight(tmp_path):
    return helpers.build_flight(tmp_path / "flight", field_images=2,
                                with_decoy=True)


class TestManifest:
    def test_loads_synthetic_flight(self, flight):
        manifest = load_manifest(flight)
        assert manifest.flight_id == "synthetic-flight"
        assert manifest.weather == "sunny"
        assert manifest.altitude_ft == 225
        assert len(manifest.images) == 4
        assert [img.image_id for img in manifest.calibration_images] == \
            ["cal_a", "cal_b"]
        assert manifest.images[0].band(3).metadata.band_index == 3

    def test_paths_resolve_relative_to_manifest(self, flight):
        manifest = load_manifest(flight)
        for image in manifest.images:
            for band in image.bands:
                assert band.path.is_file(), band.path

    def test_bundled_rsr_fallback(self, flight):
        rsr_set = load_manifest(flight).rsr_set()
        assert sorted(rsr_set) == [1, 2, 3, 4, 5]

    def test_panel_spectrum_lookup(self, flight):
        manifest = load_manifest(flight)
        curve = manifest.panel_spectrum("bright")
        assert np.all(curve.values == helpers.BRIGHT_RHO)
        with pytest.raises(ManifestError, match="library"):
            manifest.panel_spectrum("checkerboard")

    def _mutate(self, flight, edit):
        raw = json.loads(flight.read_text())
        edit(raw)
        flight.write_text(json.dumps(raw))
        return flight

    def test_duplicate_image_id_rejected(self, flight):
        def edit(raw):
            raw["images"].append(dict(raw["images"][0]))
        with pytest.raises(ManifestError, match="duplicate"):
            load_manifest(self._mutate(flight, edit))

    def test_wrong_band_count_rejected(self, flight):
        def edit(raw):
            del raw["images"][0]["bands"][2]
        with pytest.raises(ManifestError, match="band"):
            load_manifest(self._mutate(flight, edit))

    def test_duplicate_band_index_rejected(self, flight):
        def edit(raw):
            raw["images"][0]["bands"][1]["band_index"] = 1
        with pytest.raises(ManifestError, match="1..5"):
            load_manifest(self._mutate(flight, edit))

    def test_unknown_calibration_panel_rejected(self, flight):
        def edit(raw):
            raw["images"][0]["calibration"]["bright"]["panel_id"] = "mystery"
        with pytest.raises(ManifestError, match="panel"):
            load_manifest(self._mutate(flight, edit))

    def test_calibration_without_dls_rejected(self, flight):
        def edit(raw):
            del raw["images"][0]["dls"]
        with pytest.raises(ManifestError, match="dls"):
            load_manifest(self._mutate(flight, edit))

    def test_missing_flight_block_rejected(self, flight):
        def edit(raw):
            del raw["flight"]
        with pytest.raises(ManifestError, match="flight"):
            load_manifest(self._mutate(flight, edit))

    def test_bad_roi_rejected(self, flight):
        def edit(raw):
            raw["images"][0]["calibration"]["bright"]["roi"] = [1, 2, 3]
        with pytest.raises(ManifestError, match="ROI"):
            load_manifest(self._mutate(flight, edit))

    def test_not_json_rejected(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{")
        with pytest.raises(ManifestError, match="JSON"):
            load_manifest(path)


class TestConvertCommand:
    def test_writes_planes_and_log(self, flight, tmp_path):
        out = tmp_path / "radiance"
        assert main(["convert", "--manifest", str(flight),
                     "--out", str(out)]) == 0
        log = json.loads((out / "conversion_log.json").read_text())
        assert sorted(log["images"]) == ["cal_a", "cal_b", "field_1",
                                         "field_2"]
        assert log["failures"] == {}
        pixels, meta = read_plane(out / "cal_a_b1.f32")
        assert meta["units"] == "W/m^2/sr/nm"
        x, y, w, h = helpers.BRIGHT_ROI
        np.testing.assert_allclose(pixels[y:y + h, x:x + w],
                                   helpers.BRIGHT_RADIANCE[0], rtol=1e-7)

    def test_rerun_is_byte_identical(self, flight, tmp_path):
        out = tmp_path / "radiance"
        main(["convert", "--manifest", str(flight), "--out", str(out)])
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        main(["convert", "--manifest", str(flight), "--out", str(out)])
        second = {p.name: p.read_bytes() for p in out.iterdir()}
        assert first == second

    def test_corrupt_band_fails_that_image_only(self, flight, tmp_path):
        (flight.parent / "field_2_b4.pgm").write_bytes(b"P5\n2 2\n")
        out = tmp_path / "radiance"
        code = main(["convert", "--manifest", str(flight),
                     "--out", str(out)])
        assert code == 2
        log = json.loads((out / "conversion_log.json").read_text())
        assert "field_2" in log["failures"]
        assert "field_1" in log["images"]

    def test_empty_manifest_warns_and_succeeds(self, tmp_path, capsys):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps({
            "flight": {"id": "empty", "date": "2021-01-01",
                       "weather": "sunny", "altitude_ft": 150},
            "panels": {}, "images": []}))
        out = tmp_path / "radiance"
        assert main(["convert", "--manifest", str(path),
                     "--out", str(out)]) == 0
        assert "no images" in capsys.readouterr().err
        assert json.loads(
            (out / "conversion_log.json").read_text())["images"] == {}

    def test_missing_manifest_is_usage_error(self, tmp_path):
        assert main(["convert", "--manifest", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "out")]) == 1


def roi_mean(pixels, roi):
    x, y, w, h = roi
    return float(pixels[y:y + h, x:x + w].mean())


class TestReflectCommand:
    @pytest.mark.parametrize("method", ["elm1", "elm2", "aarr"])
    def test_each_method_recovers_panels(self, flight, tmp_path, method):
        out = tmp_path / method
        assert main(["reflect", "--manifest", str(flight), "--out", str(out),
                     "--method", method]) == 0
        report = json.loads((out / "reflectance_report.json").read_text())
        assert report["failures"] == {}
        for image_id in ("field_1", "field_2"):
            for band in range(1, 6):
                pixels, meta = read_plane(out / f"{image_id}_b{band}.f32")
                assert meta["units"] == "reflectance"
                assert roi_mean(pixels, helpers.BRIGHT_ROI) == \
                    pytest.approx(helpers.BRIGHT_RHO, abs=1e-6)
                assert roi_mean(pixels, helpers.DARK_ROI) == \
                    pytest.approx(helpers.DARK_RHO, abs=1e-6)

    def test_dls_selection_skips_decoy(self, flight, tmp_path):
        out = tmp_path / "elm2"
        main(["reflect", "--manifest", str(flight), "--out", str(out),
              "--method", "elm2", "--selection", "dls"])
        report = json.loads((out / "reflectance_report.json").read_text())
        for image_id in ("field_1", "field_2"):
            record = report["images"][image_id]
            assert record["calibration_image"] == "cal_a"
            assert record["selection_metric"] == pytest.approx(0.0)

    def test_time_selection_reports_gap(self, flight, tmp_path):
        out = tmp_path / "elm1"
        main(["reflect", "--manifest", str(flight), "--out", str(out),
              "--method", "elm1", "--selection", "time"])
        report = json.loads((out / "reflectance_report.json").read_text())
        record = report["images"]["field_2"]
        assert record["calibration_image"] == "cal_a"
        assert record["selection_metric"] == pytest.approx(2.0)

    def test_single_selection_uses_designated(self, flight, tmp_path):
        out = tmp_path / "single"
        main(["reflect", "--manifest", str(flight), "--out", str(out),
              "--method", "elm1", "--selection", "single",
              "--designated-id", "cal_b"])
        report = json.loads((out / "reflectance_report.json").read_text())
        assert report["images"]["field_1"]["calibration_image"] == "cal_b"
        # The decoy's slope is 0.8x, so the bright patch lands at 0.4.
        pixels, _ = read_plane(out / "field_1_b1.f32")
        assert roi_mean(pixels, helpers.BRIGHT_ROI) == \
            pytest.approx(0.4, abs=1e-6)

    def test_write_pgm_option(self, flight, tmp_path):
        out = tmp_path / "pgm"
        main(["reflect", "--manifest", str(flight), "--out", str(out),
              "--method", "aarr", "--write-pgm"])
        counts = read_pgm16(out / "field_1_b1.pgm")
        assert roi_mean(counts, helpers.BRIGHT_ROI) == pytest.approx(5000.0)

    def test_elm_without_calibration_image_is_usage_error(self, tmp_path,
                                                          capsys):
        path = helpers.build_flight(tmp_path / "nocal", field_images=1)
        raw = json.loads(path.read_text())
        for image in raw["images"]:
            image.pop("calibration", None)
        path.write_text(json.dumps(raw))
        assert main(["reflect", "--manifest", str(path),
                     "--out", str(tmp_path / "out"),
                     "--method", "elm2"]) == 1
        assert "calibration" in capsys.readouterr().err


class TestNdviCommand:
    def test_panel_scene_ndvi(self, flight, tmp_path):
        reflect_out = tmp_path / "reflect"
        main(["reflect", "--manifest", str(flight), "--out",
              str(reflect_out), "--method", "aarr"])
        out = tmp_path / "ndvi" / "field_1.f32"
        assert main(["ndvi", "--red", str(reflect_out / "field_1_b3.f32"),
                     "--nir", str(reflect_out / "field_1_b5.f32"),
                     "--out", str(out)]) == 0
        values, meta = read_plane(out)
        assert meta["units"] == "ndvi"
        # Both panels are spectrally flat, so NDVI is 0 everywhere.
        np.testing.assert_allclose(values, 0.0, atol=1e-6)
        log = json.loads((out.parent / (out.name + ".log.json")).read_text())
        assert log["zero_denominator_pixels"] == 0

    def test_band_mismatch_is_usage_error(self, flight, tmp_path, capsys):
        reflect_out = tmp_path / "reflect"
        main(["reflect", "--manifest", str(flight), "--out",
              str(reflect_out), "--method", "aarr"])
        assert main(["ndvi", "--red", str(reflect_out / "field_1_b2.f32"),
                     "--nir", str(reflect_out / "field_1_b5.f32"),
                     "--out", str(tmp_path / "x.f32")]) == 1
        assert "band" in capsys.readouterr().err


class TestEvaluateCommand:
    def _write_samples(self, path):
        rows = ["target_id,band_index,weather,altitude_ft,method,"
                "true_reflectance,estimated_reflectance"]
        rng = np.random.default_rng(53)
        for method in ("elm1", "elm2", "aarr"):
            for band in range(1, 6):
                for i in range(3):
                    err = rng.normal(0, 0.02)
                    rows.append(f"t{i},{band},sunny,225,{method},"
                                f"0.3,{0.3 + err!r}")
        path.write_text("\n".join(rows) + "\n")

    def test_grand_report(self, tmp_path):
        samples = tmp_path / "samples.csv"
        self._write_samples(samples)
        out = tmp_path / "eval"
        assert main(["evaluate", "--samples", str(samples),
                     "--out", str(out)]) == 0
        lines = (out / "report.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("mean_signed")

    def test_overall_by_method_table(self, tmp_path):
        samples = tmp_path / "samples.csv"
        self._write_samples(samples)
        out = tmp_path / "eval"
        main(["evaluate", "--samples", str(samples), "--out", str(out),
              "--group-by", "method"])
        lines = (out / "overall_by_method.csv").read_text().splitlines()
        assert lines[0] == "statistic,elm1,elm2,aarr"
        assert len(lines) == 6
        assert lines[5].split(",") == ["n", "15", "15", "15"]

    def test_per_band_by_method_table(self, tmp_path):
        samples = tmp_path / "samples.csv"
        self._write_samples(samples)
        out = tmp_path / "eval"
        main(["evaluate", "--samples", str(samples), "--out", str(out),
              "--group-by", "band_index,method"])
        lines = (out / "per_band_by_method.csv").read_text().splitlines()
        assert lines[0].split(",")[:3] == \
            ["band_index", "elm1_mean_signed", "elm1_std_signed"]
        assert len(lines) == 6

    def test_unknown_group_field_is_usage_error(self, tmp_path, capsys):
        samples = tmp_path / "samples.csv"
        self._write_samples(samples)
        assert main(["evaluate", "--samples", str(samples),
                     "--out", str(tmp_path / "eval"),
                     "--group-by", "pilot"]) == 1
        assert "group" in capsys.readouterr().err


class TestSimulateCommand:
    GRID = {"atmospheres": ["us-standard"], "days": [171],
            "times_utc": [16.0], "visibilities_km": [5.0, 23.0],
            "sensor_altitudes_km": [0.214, 0.282],
            "summary_exclude_altitudes_km": []}

    def _run(self, tmp_path, config):
        config_path = tmp_path / "grid.json"
        config_path.write_text(json.dumps(config))
        out = tmp_path / "sim"
        code = main(["simulate", "--out", str(out),
                     "--grid-config", str(config_path)])
        return code, out

    def test_tiny_grid_outputs(self, tmp_path):
        code, out = self._run(tmp_path, self.GRID)
        assert code == 0
        lines = (out / "errors.csv").read_text().splitlines()
        assert len(lines) == 1 + 4 * 4 * 5  # cells * targets * bands
        assert lines[0].startswith("atmosphere,day,time_utc")
        band_lines = (out / "summary_band.csv").read_text().splitlines()
        assert len(band_lines) == 6
        for attribute in ("atmosphere", "day", "time_utc", "visibility_km",
                          "sensor_altitude_km", "target"):
            assert (out / f"summary_{attribute}.csv").is_file()

    def test_rerun_is_byte_identical(self, tmp_path):
        _, out = self._run(tmp_path, self.GRID)
        first = (out / "errors.csv").read_bytes()
        self._run(tmp_path, self.GRID)
        assert (out / "errors.csv").read_bytes() == first

    def test_bad_visibility_is_usage_error(self, tmp_path, capsys):
        config = dict(self.GRID, visibilities_km=[0.0])
        code, _ = self._run(tmp_path, config)
        assert code == 1
        assert "visibility" in capsys.readouterr().err

    def test_unknown_config_key_is_usage_error(self, tmp_path):
        code, _ = self._run(tmp_path, dict(self.GRID, wind=3))
        assert code == 1


class TestRsrCommand:
    def _write_run(self, run_dir, band_index, flat_ratio=False):
        run_dir.mkdir(parents=True, exist_ok=True)
        center = 500.0 + 50.0 * band_index
        wavelengths = np.arange(center - 40.0, center + 40.5, 2.0)
        power = np.full(wavelengths.size, 2e-6)
        if flat_ratio:
            counts = np.zeros(wavelengths.size)
        else:
            counts = 4000.0 * np.exp(-0.5 * ((wavelengths - center) / 12) ** 2)
        payload = {"band_index": band_index, "gain": 1.0,
                   "exposure_us": 1000.0,
                   "samples": [[float(w), float(c), float(p)]
                               for w, c, p in zip(wavelengths, counts, power)]}
        (run_dir / f"band_{band_index}.json").write_text(json.dumps(payload))

    def test_reduces_sweeps_to_curves(self, tmp_path):
        run_dir = tmp_path / "run"
        for band in range(1, 6):
            self._write_run(run_dir, band)
        out = tmp_path / "rsr"
        assert main(["rsr", "--run-dir", str(run_dir),
                     "--out", str(out)]) == 0
        log = json.loads((out / "rsr_log.json").read_text())
        assert sorted(log["bands"]) == ["1", "2", "3", "4", "5"]
        from suascal.rsr import read_spectral_curve
        curve = read_spectral_curve(out / "rsr_band_3.csv")
        assert curve.values.max() == pytest.approx(1.0)

    def test_degenerate_sweep_warns_but_succeeds(self, tmp_path, capsys):
        run_dir = tmp_path / "run"
        self._write_run(run_dir, 1, flat_ratio=True)
        out = tmp_path / "rsr"
        assert main(["rsr", "--run-dir", str(run_dir),
                     "--out", str(out)]) == 0
        assert "degenerate" in capsys.readouterr().err
        log = json.loads((out / "rsr_log.json").read_text())
        assert log["bands"]["1"]["degenerate"] is True

    def test_empty_run_dir_is_usage_error(self, tmp_path):
        (tmp_path / "run").mkdir()
        assert main(["rsr", "--run-dir", str(tmp_path / "run"),
                     "--out", str(tmp_path / "rsr")]) == 1


class TestParserContract:
    def test_usage_error_exits_one(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["reflect", "--method", "sorcery"])
        assert excinfo.value.code == 1

    def test_bad_thread_count(self, flight, tmp_path):
        assert main(["convert", "--manifest", str(flight),
                     "--out", str(tmp_path / "o"), "--threads", "0"]) == 1
