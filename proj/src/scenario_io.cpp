#include "qpsense/scenario_io.hpp"

#include <filesystem>

namespace qpsense {

AnalyzerSettings analyzer_from_config(const Config& cfg) {
  AnalyzerSettings s;
  s.center_freq_hz = cfg.get_double("analyzer.center_freq_hz", 199000.0);
  s.rbw_hz = cfg.get_double("analyzer.rbw_hz");
  s.vbw_hz = cfg.get_double("analyzer.vbw_hz");
  s.span_hz = cfg.get_double("analyzer.span_hz", 0.0);
  s.sweep_time_s = cfg.get_double("analyzer.sweep_time_s", 10.0);
  s.trace_averages =
      static_cast<int>(cfg.get_int("analyzer.trace_averages", 1));
  s.validate();
  return s;
}

ChamberCalibration calibration_from_config(const Config& cfg) {
  return ChamberCalibration(
      cfg.get_double("calibration.wavelength_nm", 795.0),
      cfg.get_double("calibration.path_length_mm", 6.35),
      cfg.get_double("calibration.scan_amplitude_v", 2.0),
      cfg.get_double("calibration.modulation_v_per_drive_v"));
}

SensorResponse sensor_from_config(const Config& cfg,
                                  const std::string& base_dir) {
  const double lambda = cfg.get_double("sensor.wavelength_nm", 795.0);
  const double window = cfg.get_double("sensor.slope_window_nm", 10.0);

  TransmissionSpectrum spectrum = [&] {
    if (cfg.has("sensor.spectrum_csv")) {
      std::filesystem::path p(cfg.get_string("sensor.spectrum_csv"));
      if (p.is_relative() && !base_dir.empty()) {
        p = std::filesystem::path(base_dir) / p;
      }
      return TransmissionSpectrum::from_csv(p.string());
    }
    return synth_spectrum(cfg.get_double("sensor.synth_center_nm", lambda),
                          cfg.get_double("sensor.synth_depth", 0.2),
                          cfg.get_double("sensor.synth_width_nm", 20.0),
                          cfg.get_double("sensor.synth_baseline", 0.8));
  }();

  const NanoholeGeometry geom(
      cfg.get_double("sensor.pitch_nm", 400.0),
      static_cast<int>(cfg.get_int("sensor.mode_p", 1)),
      static_cast<int>(cfg.get_int("sensor.mode_q", 0)),
      cfg.get_double("sensor.medium_index", 1.0));
  const MetalPermittivity metal(cfg.get_double("sensor.metal_eps_real", -24.5),
                                cfg.get_double("sensor.metal_eps_imag", 1.83));
  return sensor_response(spectrum, geom, metal, lambda, window);
}

RampScenario scenario_from_config(const Config& cfg,
                                  const std::string& base_dir) {
  RampScenario s;

  const std::string type = cfg.get_string("source.type", "twin");
  if (type == "twin") {
    s.source = TwinBeamSource::from_squeezing(
        SqueezingLevel::from_db(cfg.get_double("source.squeezing_db")),
        cfg.get_double("source.seed_flux_per_s", 1e15));
  } else if (type == "coherent") {
    s.source =
        CoherentPairSpec{cfg.get_double("source.conjugate_power_ratio", 1.0)};
  } else {
    throw ConfigError("source.type must be 'twin' or 'coherent', got '" +
                      type + "'");
  }

  s.probe_loss = LossChannel(cfg.get_double("losses.probe_transmission", 1.0));
  s.conj_loss =
      LossChannel(cfg.get_double("losses.conjugate_transmission", 1.0));
  s.sensor = sensor_from_config(cfg, base_dir);
  s.post_sensor_power_w = cfg.get_double("probe.post_sensor_power_uw") * 1e-6;
  s.wavelength_nm = cfg.get_double("probe.wavelength_nm", 795.0);
  s.analyzer = analyzer_from_config(cfg);
  s.calibration = calibration_from_config(cfg);
  s.detection_bandwidth_hz =
      cfg.get_double("detection.bandwidth_hz", s.analyzer.rbw_hz);
  s.electronic_gain = cfg.get_double("detection.electronic_gain", -1.0);
  s.measurement_windows = static_cast<std::size_t>(
      cfg.get_int("ramp.measurement_windows", 0));
  s.noise_floor_samples = static_cast<std::size_t>(
      cfg.get_int("ramp.noise_floor_samples", 400));

  const double start = cfg.get_double("ramp.drive_start_v", 0.0);
  const double stop = cfg.get_double("ramp.drive_stop_v");
  const auto points = cfg.get_int("ramp.points", 21);
  const double duration = cfg.get_double("ramp.duration_s", 10.0);
  if (points < 2 || stop < start) {
    throw ConfigError("ramp: need points >= 2 and drive_stop_v >= start");
  }
  for (std::int64_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    s.drive_schedule.push_back({f * duration, start + f * (stop - start)});
  }
  s.validate();
  return s;
}

}  // namespace qpsense
