#include "qpsense/experiment.hpp"

#include <cmath>
#include <stdexcept>

#include "qpsense/constants.hpp"
#include "qpsense/math_util.hpp"

namespace qpsense {

ChamberCalibration::ChamberCalibration(double wavelength_nm_,
                                       double path_length_mm_,
                                       double scan_amplitude_v_,
                                       double modulation_v_per_drive_)
    : wavelength_nm(wavelength_nm_), path_length_mm(path_length_mm_),
      scan_amplitude_v(scan_amplitude_v_),
      modulation_v_per_drive(modulation_v_per_drive_) {
  if (!(wavelength_nm > 0.0) || !(path_length_mm > 0.0) ||
      !(scan_amplitude_v > 0.0) || !(modulation_v_per_drive >= 0.0)) {
    throw std::invalid_argument("ChamberCalibration: non-positive parameter");
  }
}

double ChamberCalibration::dn_per_volt() const {
  const double lambda_m = wavelength_nm * kNmToM;
  const double length_m = path_length_mm * kMmToM;
  return lambda_m * modulation_v_per_drive /
         (M_PI * scan_amplitude_v * length_m);
}

double calibrate_dn(const ChamberCalibration& cal, double drive_v) {
  if (!(drive_v >= 0.0)) {
    throw std::invalid_argument("calibrate_dn: drive must be >= 0");
  }
  return cal.dn_per_volt() * drive_v;
}

double photon_flux(double power_w, double wavelength_nm) {
  if (!(power_w >= 0.0) || !(wavelength_nm > 0.0)) {
    throw std::invalid_argument("photon_flux: invalid inputs");
  }
  return power_w * wavelength_nm * kNmToM / (kPlanckJs * kSpeedOfLightMps);
}

double enhancement(double dn_snl, double dn_q) {
  if (!(dn_snl > 0.0) || !(dn_q > 0.0)) {
    throw std::invalid_argument("enhancement: sensitivities must be > 0");
  }
  return (dn_snl - dn_q) / dn_q;
}

double single_coherent_equivalent(double dn_balanced) {
  if (!(dn_balanced >= 0.0)) {
    throw std::invalid_argument(
        "single_coherent_equivalent: sensitivity must be >= 0");
  }
  return dn_balanced / std::sqrt(2.0);
}

BudgetEstimate budget_estimate(double transmission, double dT_dn,
                               double flux_per_s, double n_averages,
                               double bandwidth_hz) {
  if (!(transmission > 0.0 && transmission <= 1.0)) {
    throw std::invalid_argument("budget_estimate: transmission outside (0, 1]");
  }
  if (!(dT_dn > 0.0)) {
    throw std::invalid_argument(
        "budget_estimate: zero sensor slope, sensitivity is infeasible");
  }
  if (!(flux_per_s > 0.0) || !(n_averages >= 1.0) || !(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("budget_estimate: non-positive parameter");
  }
  BudgetEstimate out;
  out.flux_per_s = flux_per_s;
  out.window_counts_1hz = window_counts(flux_per_s, 1.0);
  out.dn_min_per_rthz = std::sqrt(transmission / out.window_counts_1hz) /
                        (dT_dn * std::sqrt(n_averages));
  out.dn_min_raw = out.dn_min_per_rthz * std::sqrt(bandwidth_hz);
  return out;
}

void RampScenario::validate() const {
  analyzer.validate();
  if (!(post_sensor_power_w > 0.0)) {
    throw std::invalid_argument("RampScenario: post-sensor power must be > 0");
  }
  if (!(detection_bandwidth_hz > 0.0)) {
    throw std::invalid_argument(
        "RampScenario: detection bandwidth must be > 0");
  }
  if (!(probe_loss.transmission > 0.0)) {
    throw std::invalid_argument(
        "RampScenario: probe transmission must be > 0");
  }
  if (!(sensor.t_at > 0.0)) {
    throw std::invalid_argument("RampScenario: sensor transmission is zero");
  }
  if (drive_schedule.empty()) {
    throw std::invalid_argument("RampScenario: empty drive schedule");
  }
  double prev_t = -1.0;
  for (const auto& p : drive_schedule) {
    if (!(p.drive_v >= 0.0)) {
      throw std::invalid_argument("RampScenario: negative drive voltage");
    }
    if (!(p.time_s >= prev_t)) {
      throw std::invalid_argument(
          "RampScenario: schedule times must be non-decreasing");
    }
    prev_t = p.time_s;
  }
}

namespace {

std::size_t default_windows(double n_effective) {
  const double z99 = normal_quantile(0.99);
  // Smallest multiple of 4 at or above 2 z99^2 N; a multiple of 4 keeps the
  // quarter-rate demodulation of the sampled ramp exactly balanced.
  const double k = 2.0 * z99 * z99 * n_effective;
  auto rounded = static_cast<std::size_t>(std::ceil(k / 4.0)) * 4;
  return rounded;
}

}  // namespace

RampMeasurementModel build_measurement_model(const RampScenario& s) {
  s.validate();
  const double n_post =
      window_counts(photon_flux(s.post_sensor_power_w, s.wavelength_nm),
                    s.detection_bandwidth_hz);

  TwoModeMoments detected{0.0, 0.0, 0.0, 0.0, 0.0};
  double gain = s.electronic_gain;
  if (const auto* twin = std::get_if<TwinBeamSource>(&s.source)) {
    // Arbitrary window: the stabilization rescale below removes the seed
    // normalization entirely.
    const TwoModeMoments raw = source_moments(*twin, 1.0);
    const TwoModeMoments lossy = apply_loss(raw, s.probe_loss, s.conj_loss);
    detected = lossy.scaled(n_post / lossy.mean_p);
    if (gain < 0.0) {
      gain = optimize_gain(detected).gain;
    }
  } else {
    const auto& pair = std::get<CoherentPairSpec>(s.source);
    if (!(pair.conjugate_mean_ratio >= 0.0)) {
      throw std::invalid_argument(
          "CoherentPairSpec: conjugate/probe ratio must be >= 0");
    }
    const double mc = pair.conjugate_mean_ratio * n_post;
    detected = TwoModeMoments(n_post, mc, n_post, mc, 0.0);
    if (gain < 0.0) {
      gain = mc > 0.0 ? 1.0 : 0.0;
    }
  }

  const auto noise = differential_noise(detected, DifferentialDetector(gain));
  RampMeasurementModel model{detected,
                             gain,
                             noise.variance,
                             noise.snl,
                             detected.mean_p / s.sensor.t_at,
                             effective_averages(s.analyzer),
                             s.measurement_windows};
  if (model.windows == 0) {
    model.windows = default_windows(model.n_effective);
  } else {
    // The quarter-rate demodulator needs a whole number of cycles.
    model.windows = (model.windows + 3) / 4 * 4;
  }
  return model;
}

RampResult run_ramp(const RampScenario& s) {
  const RampMeasurementModel model = build_measurement_model(s);

  RampResult result{.points = {}, .noise = {}, .model = model};
  result.points.reserve(s.drive_schedule.size());
  for (const auto& pt : s.drive_schedule) {
    const double dn = calibrate_dn(s.calibration, pt.drive_v);
    const double amp = transduce(s.sensor, dn, model.input_window_counts);
    const double snr =
        predicted_snr(amp, model.noise_variance, model.n_effective)
            .amplitude();
    result.points.push_back({pt.time_s, pt.drive_v, dn, snr});
  }
  // Analytic noise-only statistics: the amplitude estimate over `windows`
  // windows is unbiased with standard deviation sqrt(N / windows) in the
  // sqrt(N)-scaled SNR units of predicted_snr.
  result.noise.mean_amplitude = 0.0;
  result.noise.std_amplitude =
      std::sqrt(model.n_effective / static_cast<double>(model.windows));
  result.noise.sample_count = 0;
  return result;
}

SensitivityFit fit_and_extract(const std::vector<RampPointResult>& points,
                               const NoiseFloorStats& noise,
                               double confidence, double bandwidth_hz) {
  if (!(confidence > 0.5 && confidence < 1.0)) {
    throw std::invalid_argument(
        "fit_and_extract: confidence must lie in (0.5, 1)");
  }
  if (!(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("fit_and_extract: bandwidth must be > 0");
  }
  const double threshold =
      noise.mean_amplitude + normal_quantile(confidence) * noise.std_amplitude;

  std::size_t above = 0;
  std::vector<double> x, y;
  x.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    x.push_back(p.dn_riu);
    y.push_back(p.snr_amplitude);
    if (p.snr_amplitude > threshold) ++above;
  }
  if (above < 5) {
    throw std::invalid_argument(
        "fit_and_extract: fewer than 5 points above the noise threshold");
  }
  const LineFit line = fit_line(x, y);
  if (!(line.slope > 0.0)) {
    throw std::invalid_argument("fit_and_extract: non-positive SNR slope");
  }
  const double dn_raw = (threshold - line.intercept) / line.slope;
  if (!(dn_raw > 0.0)) {
    throw std::invalid_argument(
        "fit_and_extract: fit crosses the threshold at non-positive dn");
  }
  return SensitivityFit{line.slope, line.intercept, threshold, dn_raw,
                        dn_raw / std::sqrt(bandwidth_hz)};
}

RampScenario coherent_reference_scenario(const RampScenario& twin_scenario) {
  const RampMeasurementModel model = build_measurement_model(twin_scenario);
  RampScenario ref = twin_scenario;
  ref.source = CoherentPairSpec{
      model.detected.mean_p > 0.0
          ? model.detected.mean_c / model.detected.mean_p
          : 0.0};
  ref.electronic_gain = model.gain;
  return ref;
}

RampScenario coherent_balanced_scenario(const RampScenario& twin_scenario) {
  RampScenario ref = twin_scenario;
  ref.source = CoherentPairSpec{1.0};
  ref.electronic_gain = 1.0;
  return ref;
}

namespace {

ConfigurationResult configuration_result(const std::string& label,
                                         const RampScenario& s,
                                         double confidence) {
  const RampResult r = run_ramp(s);
  return ConfigurationResult{
      label, r.model.gain, r.model.noise_variance, r.model.snl_variance,
      fit_and_extract(r.points, r.noise, confidence,
                      s.detection_bandwidth_hz)};
}

}  // namespace

SensitivityReport ramp_sensitivity(const RampScenario& twin_scenario,
                                   double confidence) {
  SensitivityReport rep{
      .twin = configuration_result("twin", twin_scenario, confidence),
      .coherent = configuration_result(
          "coherent", coherent_reference_scenario(twin_scenario), confidence),
      .coherent_balanced = configuration_result(
          "coherent_balanced", coherent_balanced_scenario(twin_scenario),
          confidence),
      .dn_single_per_rthz = 0.0,
      .enhancement_vs_balanced = 0.0,
      .enhancement_vs_single = 0.0,
      .detection_bandwidth_hz = twin_scenario.detection_bandwidth_hz,
      .n_effective = effective_averages(twin_scenario.analyzer)};
  rep.dn_single_per_rthz =
      single_coherent_equivalent(rep.coherent_balanced.fit.dn_min_per_rthz);
  rep.enhancement_vs_balanced =
      enhancement(rep.coherent.fit.dn_min_per_rthz, rep.twin.fit.dn_min_per_rthz);
  rep.enhancement_vs_single =
      enhancement(rep.dn_single_per_rthz, rep.twin.fit.dn_min_per_rthz);
  return rep;
}

}  // namespace qpsense
