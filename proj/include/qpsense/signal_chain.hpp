#pragma once

namespace qpsense {

/// Spectrum-analyzer acquisition settings. The effective number of
/// averages is (rbw / vbw) * trace_averages.
struct AnalyzerSettings {
  double center_freq_hz = 0.0;
  double rbw_hz = 0.0;
  double vbw_hz = 0.0;
  double span_hz = 0.0;
  double sweep_time_s = 0.0;
  int trace_averages = 1;

  void validate() const;
};

double effective_averages(const AnalyzerSettings& s);

/// Photon count accumulated over one integration window of a measurement
/// with the given bandwidth. Window convention: tau = 1 / (2 * bandwidth).
double window_counts(double flux_per_s, double bandwidth_hz);

/// SNR carried in both dB and linear-amplitude form,
/// amplitude = sqrt(10^(dB/10)).
class SnrEstimate {
 public:
  static SnrEstimate from_db(double snr_db);
  static SnrEstimate from_amplitude(double amplitude);

  double snr_db() const { return snr_db_; }
  double amplitude() const { return amplitude_; }

 private:
  SnrEstimate(double db, double amp) : snr_db_(db), amplitude_(amp) {}
  double snr_db_;
  double amplitude_;
};

/// sqrt(10^(snr_db/10)).
double snr_amplitude(double snr_db);

/// True SNR of a peak reading over a noise floor, both in dBm. The floor
/// reading contains the noise that also sits under the peak, so with
/// delta = peak - floor the signal-plus-noise identity gives
///   snr_db = 10 log10(10^(delta/10) - 1).
/// The correction delta - snr_db is positive and shrinks as delta grows.
/// `noise_bias_db` is added to the floor reading first; it compensates a
/// log-averaging analyzer, which reads the floor low by about 2.51 dB
/// (default 0: floor taken at face value).
SnrEstimate peak_to_snr(double peak_dbm, double floor_dbm,
                        double noise_bias_db = 0.0);

/// Predicted linear-amplitude SNR of a sinusoidal count modulation of peak
/// amplitude `signal_amplitude` against white noise of per-window variance
/// `noise_variance`, after N effective averages:
///   amplitude = (signal / sqrt(2 * variance)) * sqrt(N).
/// The 1/sqrt(2) is the RMS convention: a sine of peak amplitude a carries
/// power a^2/2. It appears only here.
SnrEstimate predicted_snr(double signal_amplitude, double noise_variance,
                          double n_averages);

/// Power (arbitrary linear units) to the toolkit's dBm-like scale,
/// referenced to kDbmReferencePower.
double power_to_dbm(double power);
double dbm_to_power(double dbm);

}  // namespace qpsense
