#include "qpsense/signal_chain.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpsense/constants.hpp"

namespace qpsense {

void AnalyzerSettings::validate() const {
  if (!(rbw_hz > 0.0)) {
    throw std::invalid_argument("AnalyzerSettings: rbw must be > 0");
  }
  if (!(vbw_hz > 0.0)) {
    throw std::invalid_argument("AnalyzerSettings: vbw must be > 0");
  }
  if (trace_averages < 1) {
    throw std::invalid_argument("AnalyzerSettings: trace_averages must be >= 1");
  }
  if (effective_averages(*this) < 1.0) {
    throw std::invalid_argument("AnalyzerSettings: effective averages < 1");
  }
}

double effective_averages(const AnalyzerSettings& s) {
  return s.rbw_hz / s.vbw_hz * static_cast<double>(s.trace_averages);
}

double window_counts(double flux_per_s, double bandwidth_hz) {
  if (!(flux_per_s >= 0.0)) {
    throw std::invalid_argument("window_counts: flux must be >= 0");
  }
  if (!(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("window_counts: bandwidth must be > 0");
  }
  return flux_per_s / (2.0 * bandwidth_hz);
}

SnrEstimate SnrEstimate::from_db(double snr_db) {
  if (std::isnan(snr_db)) {
    throw std::invalid_argument("SnrEstimate: NaN dB value");
  }
  return SnrEstimate(snr_db, std::pow(10.0, snr_db / 20.0));
}

SnrEstimate SnrEstimate::from_amplitude(double amplitude) {
  if (!(amplitude >= 0.0)) {
    throw std::invalid_argument("SnrEstimate: amplitude must be >= 0");
  }
  const double db = amplitude > 0.0
                        ? 20.0 * std::log10(amplitude)
                        : -std::numeric_limits<double>::infinity();
  return SnrEstimate(db, amplitude);
}

double snr_amplitude(double snr_db) {
  if (std::isnan(snr_db)) {
    throw std::invalid_argument("snr_amplitude: NaN input");
  }
  return std::pow(10.0, snr_db / 20.0);
}

SnrEstimate peak_to_snr(double peak_dbm, double floor_dbm,
                        double noise_bias_db) {
  const double delta = peak_dbm - (floor_dbm + noise_bias_db);
  if (!(delta > 0.0)) {
    throw std::invalid_argument(
        "peak_to_snr: peak not above noise floor (delta <= 0)");
  }
  const double snr_power = std::pow(10.0, delta / 10.0) - 1.0;
  if (!(snr_power > 0.0)) {
    throw std::invalid_argument(
        "peak_to_snr: signal indistinguishable from noise");
  }
  return SnrEstimate::from_db(10.0 * std::log10(snr_power));
}

SnrEstimate predicted_snr(double signal_amplitude, double noise_variance,
                          double n_averages) {
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("predicted_snr: variance must be > 0");
  }
  if (!(n_averages >= 1.0)) {
    throw std::invalid_argument("predicted_snr: averages must be >= 1");
  }
  if (!(signal_amplitude >= 0.0)) {
    throw std::invalid_argument("predicted_snr: amplitude must be >= 0");
  }
  const double amp = signal_amplitude / std::sqrt(2.0 * noise_variance) *
                     std::sqrt(n_averages);
  return SnrEstimate::from_amplitude(amp);
}

double power_to_dbm(double power) {
  if (!(power > 0.0)) {
    throw std::invalid_argument("power_to_dbm: power must be > 0");
  }
  return 10.0 * std::log10(power / kDbmReferencePower);
}

double dbm_to_power(double dbm) {
  return kDbmReferencePower * std::pow(10.0, dbm / 10.0);
}

}  // namespace qpsense
