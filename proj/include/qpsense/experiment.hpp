#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qpsense/plasmonic.hpp"
#include "qpsense/quantum_noise.hpp"
#include "qpsense/signal_chain.hpp"

namespace qpsense {

/// Mach-Zehnder calibration of the ultrasound chamber: relates the drive
/// voltage of the transducer to the average index modulation along the
/// beam path,
///   dn = lambda * B / (pi * A * L),   B = slope * drive.
struct ChamberCalibration {
  double wavelength_nm;
  double path_length_mm;
  double scan_amplitude_v;         // A: difference signal over a 2*pi scan
  double modulation_v_per_drive;   // B per drive volt

  ChamberCalibration(double wavelength_nm, double path_length_mm,
                     double scan_amplitude_v, double modulation_v_per_drive);

  double dn_per_volt() const;
};

/// Index modulation amplitude for a given drive voltage (linear through
/// the origin).
double calibrate_dn(const ChamberCalibration& cal, double drive_v);

/// F = P * lambda / (h c), photons per second.
double photon_flux(double power_w, double wavelength_nm);

/// Relative enhancement of sensitivity: (dn_snl - dn_q) / dn_q. When the
/// two configurations differ only by the noise ratio R this equals
/// sqrt(1/R) - 1.
double enhancement(double dn_snl, double dn_q);

/// Sensitivity of a single coherent beam carrying the probe power,
/// estimated from a balanced two-beam coherent measurement whose noise
/// floor is twice as large: dn_balanced / sqrt(2).
double single_coherent_equivalent(double dn_balanced);

struct BudgetEstimate {
  double flux_per_s;
  double window_counts_1hz;
  double dn_min_per_rthz;
  double dn_min_raw;  // at the requested detection bandwidth
};

/// Closed-form order-of-magnitude sensitivity for a coherent probe:
///   dn_min = (1 / dT_dn) * sqrt(T / I0) / sqrt(N)   per sqrt(Hz),
/// with I0 the photon count in a 1 Hz window of the given flux.
BudgetEstimate budget_estimate(double transmission, double dT_dn,
                               double flux_per_s, double n_averages,
                               double bandwidth_hz);

/// Classical stand-in for the twin beams: a pair of independent coherent
/// beams whose detected conjugate/probe mean-power ratio is given
/// (ratio 0 = single-beam probing).
struct CoherentPairSpec {
  double conjugate_mean_ratio = 1.0;
};

using SourceSpec = std::variant<CoherentPairSpec, TwinBeamSource>;

struct DrivePoint {
  double time_s;
  double drive_v;
};

/// Everything needed to rerun the voltage-ramp experiment. The probe power
/// is stabilized after the sensor, so the detected probe mean is pinned to
/// post_sensor_power regardless of losses; counts entering the sensor are
/// back-computed as detected counts / T.
struct RampScenario {
  SourceSpec source = CoherentPairSpec{};
  LossChannel probe_loss{1.0};
  LossChannel conj_loss{1.0};
  SensorResponse sensor{795.0, 0.66, 0.0, 0.0};
  double post_sensor_power_w = 0.0;
  double wavelength_nm = 795.0;
  AnalyzerSettings analyzer;
  std::vector<DrivePoint> drive_schedule;
  ChamberCalibration calibration{795.0, 6.35, 2.0, 0.002};
  double detection_bandwidth_hz = 0.0;
  /// Electronic gain; negative selects the default (optimized for twin
  /// beams, 1 for a coherent pair, 0 for a single beam).
  double electronic_gain = -1.0;
  /// Windows accumulated per ramp point in stochastic mode; 0 selects the
  /// default 4 * ceil(z99^2 * N / 2), the measurement length whose
  /// amplitude-estimate scatter places the 99% confidence threshold at
  /// snr_amplitude = 1/sqrt(2) (see fit_and_extract).
  std::size_t measurement_windows = 0;
  /// Modulation-off estimates used for the empirical noise statistics in
  /// stochastic mode.
  std::size_t noise_floor_samples = 400;

  void validate() const;
};

/// Detector-plane quantities shared by every point of a ramp.
struct RampMeasurementModel {
  TwoModeMoments detected;     // per-window moments at the detectors
  double gain;                 // electronic gain actually used
  double noise_variance;       // Var(p - g c) per window
  double snl_variance;         // coherent reference for the same powers/gain
  double input_window_counts;  // detected probe mean / T_sensor
  double n_effective;
  std::size_t windows;         // measurement windows per ramp point
};

RampMeasurementModel build_measurement_model(const RampScenario& s);

struct RampPointResult {
  double time_s;
  double drive_v;
  double dn_riu;
  double snr_amplitude;
};

/// Noise-only statistics of the linear-amplitude SNR estimate. With
/// sample_count == 0 the values are the analytic model (mean 0,
/// std sqrt(N / windows)); otherwise they are empirical.
struct NoiseFloorStats {
  double mean_amplitude = 0.0;
  double std_amplitude = 0.0;
  std::size_t sample_count = 0;
};

struct RampResult {
  std::vector<RampPointResult> points;
  NoiseFloorStats noise;
  RampMeasurementModel model;
};

/// Deterministic ramp: exact predicted SNR amplitudes per schedule point
/// and the analytic noise-floor statistics. Stochastic evaluation of the
/// same scenario lives in the Monte Carlo oracle (sampled_ramp).
RampResult run_ramp(const RampScenario& s);

struct SensitivityFit {
  double slope;        // linear-amplitude SNR per RIU
  double intercept;
  double threshold;    // confidence bound on the noise-only amplitude
  double dn_min_raw;   // RIU at the detection bandwidth
  double dn_min_per_rthz;
};

/// Least-squares line through (dn, snr_amplitude); the sensitivity is the
/// crossing of the fit with threshold = noise mean + z(confidence) * noise
/// std, normalized per sqrt(Hz) of the detection bandwidth. Requires at
/// least 5 points above the threshold and a positive slope.
SensitivityFit fit_and_extract(const std::vector<RampPointResult>& points,
                               const NoiseFloorStats& noise,
                               double confidence, double bandwidth_hz);

struct ConfigurationResult {
  std::string label;
  double gain;
  double noise_variance;
  double snl_variance;
  SensitivityFit fit;
};

/// The three-trace sensitivity comparison of the ramp experiment:
///   twin              - the scenario as given (twin beams, optimized gain)
///   coherent          - coherent pair with the same detected powers and
///                       the same gain (the shot-noise-limited reference)
///   coherent_balanced - coherent pair with conjugate power equal to the
///                       probe, unit gain
/// plus the single-coherent-beam estimate dn_balanced / sqrt(2).
struct SensitivityReport {
  ConfigurationResult twin;
  ConfigurationResult coherent;
  ConfigurationResult coherent_balanced;
  double dn_single_per_rthz;
  double enhancement_vs_balanced;  // twin vs the coherent reference
  double enhancement_vs_single;
  double detection_bandwidth_hz;
  double n_effective;
};

/// Runs run_ramp for the twin scenario and its two derived classical
/// configurations and extracts sensitivities at the given confidence.
SensitivityReport ramp_sensitivity(const RampScenario& twin_scenario,
                                   double confidence);

/// Derived classical scenarios, exposed for the stochastic pipeline.
RampScenario coherent_reference_scenario(const RampScenario& twin_scenario);
RampScenario coherent_balanced_scenario(const RampScenario& twin_scenario);

}  // namespace qpsense
