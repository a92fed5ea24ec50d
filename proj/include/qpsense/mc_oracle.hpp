#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qpsense/experiment.hpp"
#include "qpsense/quantum_noise.hpp"

namespace qpsense::mc {

/// SplitMix64 step; used to derive independent stream seeds from
/// (seed, stream index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Standard-normal generator: mt19937_64 driving the Marsaglia polar
/// transform. Both pieces are fully specified, so sequences are
/// reproducible bit-for-bit within a build and comparable statistically
/// across implementations.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next();

 private:
  std::mt19937_64 rng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

struct TimeSeriesConfig {
  double sample_rate_hz;
  double duration_s;
  std::uint64_t seed;
  struct Modulation {
    double frequency_hz;
    double amplitude_counts;
  };
  std::optional<Modulation> modulation;

  std::size_t sample_count() const;
  void validate() const;  // >= 2^10 samples; modulation below Nyquist
};

struct CountSeries {
  std::vector<double> probe;
  std::vector<double> conj;
  double dt_s;
};

/// Draws aligned probe/conjugate count series from the bivariate normal
/// with the given per-window moments, one window per sample. Valid only in
/// the bright-beam Gaussian regime (mean >= 100 counts per sample for each
/// active arm); outside it the linearized model is wrong and the call is
/// rejected. An optional modulation adds a cosine of the given amplitude
/// to the probe mean.
CountSeries sample_counts(const TwoModeMoments& m,
                          const TimeSeriesConfig& cfg);

enum class AveragingMode { power_average, log_average };

struct SpectralEstimate {
  std::vector<double> frequencies_hz;  // uniform grid, DC excluded
  std::vector<double> power;           // counts^2 per Hz, one-sided
  AveragingMode mode;
  double bin_width_hz;

  /// Integral of the one-sided density over frequency; equals the
  /// time-domain variance for power averaging (Parseval).
  double total_power() const;
};

/// Averaged periodogram over non-overlapping segments (no window
/// function). segment_length must be a power of two and divide into the
/// series at least once; each segment is demeaned, so the DC bin is
/// dropped. log_average averages the decibel value of each bin across
/// segments (the spectrum-analyzer display convention), which sits below
/// the power average on noise by about 2.51 dB.
SpectralEstimate estimate_spectrum(std::span<const double> series,
                                   std::size_t segment_length,
                                   double sample_rate_hz, AveragingMode mode);

/// CSV dumps for offline inspection of sampled data.
void dump_csv(const CountSeries& series, const std::string& path);
void dump_csv(const SpectralEstimate& spectrum, const std::string& path);

/// Stochastic counterpart of run_ramp: each schedule point is measured by
/// demodulating `windows` sampled windows at quarter of the window rate,
/// and the noise statistics are estimated from modulation-off runs.
/// noise_scale scales the sampled fluctuations (1 = physical, 0 =
/// noiseless diagnostics).
RampResult sampled_ramp(const RampScenario& s, std::uint64_t seed,
                        double noise_scale = 1.0);

struct GridCheckPoint {
  double probe_transmission;
  double conj_transmission;
  double gain;
  double measured_ratio;   // empirical Var(p - g c) / analytic SNL
  double expected_ratio;   // analytic
  double standard_error;   // of the measured ratio
  bool pass;               // |measured - expected| <= 3 SE
};

/// Empirical difference-noise ratios across a (T_p, T_c, g) grid versus
/// the analytic values, with 3-standard-error bounds.
std::vector<GridCheckPoint> difference_noise_grid(
    const TwinBeamSource& source, std::span<const double> probe_ts,
    std::span<const double> conj_ts, std::span<const double> gains,
    std::size_t samples, std::uint64_t seed);

struct PipelineCheck {
  std::string name;
  double measured;
  double expected;
  double tolerance;
  bool pass;
};

struct PipelineValidation {
  std::vector<PipelineCheck> checks;
  double ratio_mean = 0.0;  // empirical / deterministic dn_min, twin config
  double ratio_std = 0.0;
  bool pass = false;
};

/// Full-pipeline cross-check: `trials` stochastic ramps per configuration
/// against the deterministic predictions, plus the empirical quantum
/// enhancement against sqrt(1/R) - 1. Requires trials >= 10.
PipelineValidation validate_pipeline(const RampScenario& twin_scenario,
                                     std::size_t trials, std::uint64_t seed,
                                     double noise_scale = 1.0);

}  // namespace qpsense::mc
