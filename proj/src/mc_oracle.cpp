#include "qpsense/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace qpsense::mc {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // SplitMix64 applied to seed + stream * golden-gamma.
  std::uint64_t z = seed + stream * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double GaussianSampler::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Marsaglia polar method on uniforms in (-1, 1). The 53-bit mapping is
  // spelled out so the stream does not depend on the standard library's
  // generate_canonical.
  auto uniform = [this] {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  };
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = v * f;
  has_cached_ = true;
  return u * f;
}

std::size_t TimeSeriesConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
}

void TimeSeriesConfig::validate() const {
  if (!(sample_rate_hz > 0.0) || !(duration_s > 0.0)) {
    throw std::invalid_argument("TimeSeriesConfig: non-positive timing");
  }
  if (sample_count() < (1u << 10)) {
    throw std::invalid_argument("TimeSeriesConfig: need >= 1024 samples");
  }
  if (modulation && !(modulation->frequency_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument(
        "TimeSeriesConfig: modulation above Nyquist frequency");
  }
}

namespace {

struct Cholesky2 {
  double l11, l21, l22;
};

Cholesky2 cholesky(const TwoModeMoments& m) {
  Cholesky2 c{};
  c.l11 = std::sqrt(m.var_p);
  c.l21 = c.l11 > 0.0 ? m.cov / c.l11 : 0.0;
  c.l22 = std::sqrt(std::max(m.var_c - c.l21 * c.l21, 0.0));
  return c;
}

void check_regime(const TwoModeMoments& m) {
  if (m.mean_p < 100.0) {
    throw std::invalid_argument(
        "sample_counts: probe mean below the Gaussian regime (>= 100 "
        "counts per sample required)");
  }
  const bool conj_active = m.mean_c > 0.0 || m.var_c > 0.0;
  if (conj_active && m.mean_c < 100.0) {
    throw std::invalid_argument(
        "sample_counts: conjugate mean below the Gaussian regime");
  }
}

}  // namespace

CountSeries sample_counts(const TwoModeMoments& m,
                          const TimeSeriesConfig& cfg) {
  cfg.validate();
  check_regime(m);
  const std::size_t n = cfg.sample_count();
  const Cholesky2 c = cholesky(m);
  GaussianSampler gauss(cfg.seed);

  CountSeries out;
  out.dt_s = 1.0 / cfg.sample_rate_hz;
  out.probe.resize(n);
  out.conj.resize(n);
  const double w = cfg.modulation
                       ? 2.0 * M_PI * cfg.modulation->frequency_hz * out.dt_s
                       : 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double z1 = gauss.next();
    const double z2 = gauss.next();
    double mp = m.mean_p;
    if (cfg.modulation) {
      mp += cfg.modulation->amplitude_counts * std::cos(w * k);
    }
    out.probe[k] = mp + c.l11 * z1;
    out.conj[k] = m.mean_c + c.l21 * z1 + c.l22 * z2;
  }
  return out;
}

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 FFT, decimation in time.
void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace

double SpectralEstimate::total_power() const {
  double sum = 0.0;
  for (double p : power) sum += p;
  return sum * bin_width_hz;
}

SpectralEstimate estimate_spectrum(std::span<const double> series,
                                   std::size_t segment_length,
                                   double sample_rate_hz, AveragingMode mode) {
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("estimate_spectrum: sample rate must be > 0");
  }
  if (!is_pow2(segment_length)) {
    throw std::invalid_argument(
        "estimate_spectrum: segment length must be a power of two");
  }
  if (segment_length > series.size() || segment_length < 4) {
    throw std::invalid_argument("estimate_spectrum: invalid segmentation");
  }
  const std::size_t n_seg = series.size() / segment_length;
  const std::size_t n_bins = segment_length / 2;  // bins 1 .. L/2
  const double df = sample_rate_hz / static_cast<double>(segment_length);

  std::vector<double> acc(n_bins, 0.0);
  std::vector<std::complex<double>> buf(segment_length);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const double* seg = series.data() + s * segment_length;
    double mean = 0.0;
    for (std::size_t k = 0; k < segment_length; ++k) mean += seg[k];
    mean /= static_cast<double>(segment_length);
    for (std::size_t k = 0; k < segment_length; ++k) {
      buf[k] = {seg[k] - mean, 0.0};
    }
    fft_inplace(buf);
    for (std::size_t k = 1; k <= n_bins; ++k) {
      // One-sided density; the Nyquist bin has no mirror image.
      const double scale = (k == n_bins) ? 1.0 : 2.0;
      const double p = scale * std::norm(buf[k]) /
                       (sample_rate_hz * static_cast<double>(segment_length));
      acc[k - 1] += mode == AveragingMode::power_average
                        ? p
                        : 10.0 * std::log10(std::max(p, 1e-300));
    }
  }
  SpectralEstimate out;
  out.mode = mode;
  out.bin_width_hz = df;
  out.frequencies_hz.resize(n_bins);
  out.power.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    out.frequencies_hz[k] = df * static_cast<double>(k + 1);
    const double avg = acc[k] / static_cast<double>(n_seg);
    out.power[k] = mode == AveragingMode::power_average
                       ? avg
                       : std::pow(10.0, avg / 10.0);
  }
  return out;
}

void dump_csv(const CountSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write series dump: " + path);
  }
  out.precision(12);
  out << "time_s,probe_counts,conjugate_counts\n";
  for (std::size_t k = 0; k < series.probe.size(); ++k) {
    out << k * series.dt_s << ',' << series.probe[k] << ','
        << series.conj[k] << '\n';
  }
}

void dump_csv(const SpectralEstimate& spectrum, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write spectrum dump: " + path);
  }
  out.precision(12);
  out << "frequency_hz,power_counts2_per_hz\n";
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    out << spectrum.frequencies_hz[k] << ',' << spectrum.power[k] << '\n';
  }
}

RampResult sampled_ramp(const RampScenario& s, std::uint64_t seed,
                        double noise_scale) {
  if (!(noise_scale >= 0.0)) {
    throw std::invalid_argument("sampled_ramp: noise scale must be >= 0");
  }
  const RampMeasurementModel model = build_measurement_model(s);
  check_regime(model.detected);
  const std::size_t windows = model.windows;
  const Cholesky2 c = cholesky(model.detected);
  const double g = model.gain;
  const double snr_scale =
      std::sqrt(model.n_effective) /
      std::sqrt(2.0 * model.noise_variance);

  // Quarter-rate demodulation: cos(pi k / 2) cycles 1, 0, -1, 0, so the
  // matched filter reduces to an alternating sum over even windows.
  // windows is kept a multiple of 4 by build_measurement_model, which makes
  // the estimator exactly unbiased.
  auto measure = [&](double amplitude, std::uint64_t stream) {
    GaussianSampler gauss(derive_seed(seed, stream));
    double acc = 0.0;
    for (std::size_t k = 0; k < windows; ++k) {
      const double z1 = gauss.next();
      const double z2 = gauss.next();
      const double d = (k % 2 == 0)
                           ? ((k % 4 == 0) ? 1.0 : -1.0)
                           : 0.0;
      const double p = amplitude * d + noise_scale * c.l11 * z1;
      const double cj = noise_scale * (c.l21 * z1 + c.l22 * z2);
      acc += (p - g * cj) * d;
    }
    const double a_hat = 2.0 * acc / static_cast<double>(windows);
    return a_hat * snr_scale;
  };

  RampResult result{.points = {}, .noise = {}, .model = model};
  result.points.reserve(s.drive_schedule.size());
  std::uint64_t stream = 0;
  for (const auto& pt : s.drive_schedule) {
    const double dn = calibrate_dn(s.calibration, pt.drive_v);
    const double amp = transduce(s.sensor, dn, model.input_window_counts);
    result.points.push_back({pt.time_s, pt.drive_v, dn, measure(amp, stream++)});
  }

  if (noise_scale == 0.0) {
    // Nothing to estimate from an all-zero baseline; fall back to the
    // analytic statistics so the extraction matches run_ramp exactly.
    result.noise.mean_amplitude = 0.0;
    result.noise.std_amplitude = std::sqrt(
        model.n_effective / static_cast<double>(model.windows));
    result.noise.sample_count = 0;
    return result;
  }

  const std::size_t n_noise = std::max<std::size_t>(s.noise_floor_samples, 2);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n_noise; ++i) {
    const double v = measure(0.0, stream++);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / static_cast<double>(n_noise);
  const double var =
      std::max(sum2 / static_cast<double>(n_noise) - mean * mean, 0.0) *
      static_cast<double>(n_noise) / static_cast<double>(n_noise - 1);
  result.noise.mean_amplitude = mean;
  result.noise.std_amplitude = std::sqrt(var);
  result.noise.sample_count = n_noise;
  return result;
}

std::vector<GridCheckPoint> difference_noise_grid(
    const TwinBeamSource& source, std::span<const double> probe_ts,
    std::span<const double> conj_ts, std::span<const double> gains,
    std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) {
    throw std::invalid_argument("difference_noise_grid: too few samples");
  }
  const TwoModeMoments raw = source_moments(source, 1.0);
  std::vector<GridCheckPoint> out;
  std::uint64_t stream = 0;
  for (double tp : probe_ts) {
    for (double tc : conj_ts) {
      const TwoModeMoments m =
          apply_loss(raw, LossChannel(tp), LossChannel(tc));
      check_regime(m);
      const Cholesky2 c = cholesky(m);
      for (double g : gains) {
        const auto analytic =
            differential_noise(m, DifferentialDetector(g));
        GaussianSampler gauss(derive_seed(seed, stream++));
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
          const double z1 = gauss.next();
          const double z2 = gauss.next();
          const double p = m.mean_p + c.l11 * z1;
          const double cj = m.mean_c + c.l21 * z1 + c.l22 * z2;
          const double d = p - g * cj;
          sum += d;
          sum2 += d * d;
        }
        const double n = static_cast<double>(samples);
        const double mean = sum / n;
        const double var = (sum2 / n - mean * mean) * n / (n - 1.0);
        // Gaussian sampling variance of s^2: SE = sigma^2 sqrt(2/(n-1)).
        const double se =
            analytic.variance * std::sqrt(2.0 / (n - 1.0));
        GridCheckPoint pt{tp,
                          tc,
                          g,
                          var / analytic.snl,
                          analytic.variance / analytic.snl,
                          se / analytic.snl,
                          false};
        pt.pass = std::abs(pt.measured_ratio - pt.expected_ratio) <=
                  3.0 * pt.standard_error;
        out.push_back(pt);
      }
    }
  }
  return out;
}

PipelineValidation validate_pipeline(const RampScenario& twin_scenario,
                                     std::size_t trials, std::uint64_t seed,
                                     double noise_scale) {
  if (trials < 10) {
    throw std::invalid_argument(
        "validate_pipeline: at least 10 trials required");
  }
  const double confidence = 0.99;
  PipelineValidation out;

  const RampScenario coh = coherent_reference_scenario(twin_scenario);
  const RampResult det_twin = run_ramp(twin_scenario);
  const RampResult det_coh = run_ramp(coh);
  const double bw = twin_scenario.detection_bandwidth_hz;
  const double det_dn_twin =
      fit_and_extract(det_twin.points, det_twin.noise, confidence, bw)
          .dn_min_per_rthz;
  const double det_dn_coh =
      fit_and_extract(det_coh.points, det_coh.noise, confidence, bw)
          .dn_min_per_rthz;

  double sum = 0.0, sum2 = 0.0;
  double coh_sum = 0.0;
  double slope_ratio_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const RampResult twin_r =
        sampled_ramp(twin_scenario, derive_seed(seed, 2 * t), noise_scale);
    const auto twin_fit =
        fit_and_extract(twin_r.points, twin_r.noise, confidence, bw);
    const double ratio = twin_fit.dn_min_per_rthz / det_dn_twin;
    sum += ratio;
    sum2 += ratio * ratio;

    const RampResult coh_r =
        sampled_ramp(coh, derive_seed(seed, 2 * t + 1), noise_scale);
    const auto coh_fit =
        fit_and_extract(coh_r.points, coh_r.noise, confidence, bw);
    coh_sum += coh_fit.dn_min_per_rthz;
    slope_ratio_sum += twin_fit.slope / coh_fit.slope;
  }
  const double n = static_cast<double>(trials);
  out.ratio_mean = sum / n;
  out.ratio_std = std::sqrt(
      std::max(sum2 / n - out.ratio_mean * out.ratio_mean, 0.0) * n /
      (n - 1.0));

  const double mean_dn_coh = coh_sum / n;
  // Empirical enhancement from the fitted SNR-per-dn slopes: the slope
  // ratio measures sqrt(SNL variance / twin variance) directly, the
  // noise-variance form of the enhancement definition. The
  // threshold-crossing route would carry the intercept estimator's
  // variance on top and needs far more trials for the same precision.
  const double measured_enh = slope_ratio_sum / n - 1.0;

  const RampMeasurementModel model = build_measurement_model(twin_scenario);
  const double residual_r = model.noise_variance / model.snl_variance;
  const double expected_enh = std::sqrt(1.0 / residual_r) - 1.0;

  out.checks.push_back({"dn_min ratio (stochastic / deterministic, twin)",
                        out.ratio_mean, 1.0,
                        noise_scale == 0.0 ? 1e-12 : 0.2, false});
  out.checks.push_back({"coherent dn_min ratio", mean_dn_coh / det_dn_coh, 1.0,
                        noise_scale == 0.0 ? 1e-12 : 0.2, false});
  out.checks.push_back({"quantum enhancement vs sqrt(1/R) - 1", measured_enh,
                        expected_enh, 0.05 * expected_enh, false});
  for (auto& c : out.checks) {
    c.pass = std::abs(c.measured - c.expected) <= c.tolerance;
  }
  out.pass = std::all_of(out.checks.begin(), out.checks.end(),
                         [](const PipelineCheck& c) { return c.pass; });
  return out;
}

}  // namespace qpsense::mc
