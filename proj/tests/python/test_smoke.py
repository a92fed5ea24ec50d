"""Smoke tests for the python bindings and the CLI report schemas."""

import json
import math
import os
import subprocess
import sys

import pytest

try:
    import qpsense as qp
except ImportError:
    import _qpsense as qp

DATA = os.environ.get("QPSENSE_DATA", "data")
SCHEMAS = os.environ.get("QPSENSE_SCHEMAS", "schemas")
CLI = os.environ.get("QPSENSE_CLI")


def test_version():
    assert qp.__version__.count(".") == 2


def test_squeezing_scale():
    assert qp.db_to_linear(9.0) == pytest.approx(0.1259, abs=1e-3)
    assert qp.linear_to_db(qp.db_to_linear(4.0)) == pytest.approx(4.0)


def test_gain_optimization_matches_reference_residual():
    source = qp.TwinBeamSource.from_squeezing(qp.SqueezingLevel.from_db(9.0), 1.0)
    detected = qp.apply_loss(
        qp.source_moments(source, 1.0),
        qp.LossChannel(0.66 * 0.73),
        qp.LossChannel(0.95),
    )
    best = qp.optimize_gain(detected)
    assert best.gain == pytest.approx(0.60, abs=0.03)
    assert best.residual.db == pytest.approx(4.0, abs=0.3)


def test_dispersion_and_budget():
    s = qp.dispersion_S(qp.NanoholeGeometry(400.0, 1, 0, 1.0), qp.MetalPermittivity(-24.5, 1.83))
    assert s == pytest.approx(425.0, abs=3.0)
    b = qp.budget_estimate(0.66, 2.5, 3.0e14, 500.0, 100.0)
    assert b.dn_min_per_rthz == pytest.approx(1.19e-9, rel=0.01)


def test_flux_and_window():
    flux = qp.photon_flux(70e-6, 795.0)
    assert flux == pytest.approx(2.80e14, rel=0.01)
    assert qp.window_counts(flux, 1.0) == pytest.approx(1.40e14, rel=0.01)


def test_spectrum_roundtrip_and_sensor():
    spec = qp.TransmissionSpectrum.from_csv(os.path.join(DATA, "eot_spectrum_approx.csv"))
    assert qp.transmission_at(spec, 795.0) == pytest.approx(0.66, abs=0.02)
    resp = qp.sensor_response(
        spec,
        qp.NanoholeGeometry(400.0, 1, 0, 1.0),
        qp.MetalPermittivity(-24.5, 1.83),
        795.0,
        10.0,
    )
    assert resp.dT_dn == pytest.approx(2.5, abs=0.9)


def test_ramp_pipeline_enhancement():
    spec = qp.TransmissionSpectrum.from_csv(os.path.join(DATA, "eot_spectrum_approx.csv"))
    resp = qp.sensor_response(
        spec,
        qp.NanoholeGeometry(400.0, 1, 0, 1.0),
        qp.MetalPermittivity(-24.5, 1.83),
        795.0,
        10.0,
    )
    scenario = qp.RampScenario()
    scenario.source = qp.TwinBeamSource.from_squeezing(qp.SqueezingLevel.from_db(9.0), 1e15)
    scenario.probe_loss = qp.LossChannel(0.66 * 0.73)
    scenario.conj_loss = qp.LossChannel(0.95)
    scenario.sensor = resp
    scenario.post_sensor_power_w = 70e-6
    scenario.wavelength_nm = 795.0
    analyzer = qp.AnalyzerSettings()
    analyzer.center_freq_hz = 199e3
    analyzer.rbw_hz = 100.0
    analyzer.vbw_hz = 10.0
    analyzer.trace_averages = 50
    scenario.analyzer = analyzer
    scenario.calibration = qp.ChamberCalibration(795.0, 6.35, 2.0, 0.002)
    scenario.detection_bandwidth_hz = 100.0
    scenario.drive_schedule = [qp.DrivePoint(t, t) for t in range(11)]

    report = qp.ramp_sensitivity(scenario, 0.99)
    assert 0.53 <= report.enhancement_vs_balanced <= 0.59
    assert 0.5 < report.coherent.fit.dn_min_per_rthz / 8.6e-10 < 2.0
    assert report.twin.fit.dn_min_per_rthz < report.coherent.fit.dn_min_per_rthz


def test_mc_sampler_reproducible():
    m = qp.TwoModeMoments(1e4, 0.0, 1e4, 0.0, 0.0)
    cfg = qp.mc.TimeSeriesConfig(2048.0, 1.0, 7)
    a = qp.mc.sample_counts(m, cfg)
    b = qp.mc.sample_counts(m, cfg)
    assert a.probe == b.probe
    mean = sum(a.probe) / len(a.probe)
    assert mean == pytest.approx(1e4, rel=0.01)


@pytest.mark.skipif(CLI is None, reason="CLI path not provided")
def test_cli_reports_validate_against_schemas(tmp_path):
    pytest.importorskip("jsonschema")
    from jsonschema import Draft7Validator

    config = os.path.join(DATA, "experiment_scenario.ini")
    reports = {}
    for command in ("budget", "squeezing", "ramp", "calibrate"):
        out = tmp_path / command
        out.mkdir()
        subprocess.run(
            [CLI, command, "--config", config, "--out", str(out)],
            check=True,
            stdout=subprocess.DEVNULL,
        )
        reports[command] = json.loads((out / f"{command}_report.json").read_text())

    manifest_schema = json.loads(
        open(os.path.join(SCHEMAS, "manifest.schema.json")).read()
    )
    for command, report in reports.items():
        schema = json.loads(
            open(os.path.join(SCHEMAS, f"{command}_report.schema.json")).read()
        )
        # Inline the shared manifest schema so validation does not depend
        # on a resolver.
        schema["properties"]["manifest"] = manifest_schema
        Draft7Validator(schema).validate(report)

    ramp = reports["ramp"]
    assert ramp["enhancement_vs_balanced"] == pytest.approx(0.56, abs=0.03)
    assert math.isclose(
        ramp["dn_single_per_rthz"],
        ramp["configurations"][2]["fit"]["dn_min_per_rthz"] / math.sqrt(2.0),
        rel_tol=1e-9,
    )
