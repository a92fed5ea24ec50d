#include "qpsense/quantum_noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsense/math_util.hpp"

namespace qpsense {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

}  // namespace

double db_to_linear(double db) {
  require_finite(db, "db_to_linear");
  return std::pow(10.0, -db / 10.0);
}

double linear_to_db(double ratio) {
  require_finite(ratio, "linear_to_db");
  if (ratio <= 0.0) {
    throw std::invalid_argument("linear_to_db: ratio must be positive");
  }
  return -10.0 * std::log10(ratio);
}

SqueezingLevel SqueezingLevel::from_db(double db) {
  return SqueezingLevel(db, db_to_linear(db));
}

SqueezingLevel SqueezingLevel::from_ratio(double ratio) {
  return SqueezingLevel(linear_to_db(ratio), ratio);
}

TwinBeamSource::TwinBeamSource(double gain_, double seed_flux_)
    : gain(gain_), seed_flux(seed_flux_) {
  if (!(gain >= 1.0)) {
    throw std::invalid_argument("TwinBeamSource: gain must be >= 1");
  }
  if (!(seed_flux > 0.0)) {
    throw std::invalid_argument("TwinBeamSource: seed flux must be > 0");
  }
}

TwinBeamSource TwinBeamSource::from_squeezing(const SqueezingLevel& level,
                                              double seed_flux) {
  // 2G - 1 = 1/R
  const double gain = 0.5 * (1.0 / level.ratio() + 1.0);
  return TwinBeamSource(gain, seed_flux);
}

TwoModeMoments::TwoModeMoments(double mean_p_, double mean_c_, double var_p_,
                               double var_c_, double cov_)
    : mean_p(mean_p_), mean_c(mean_c_), var_p(var_p_), var_c(var_c_),
      cov(cov_) {
  if (!(mean_p >= 0.0) || !(mean_c >= 0.0)) {
    throw std::invalid_argument("TwoModeMoments: negative mean");
  }
  if (!(var_p >= 0.0) || !(var_c >= 0.0)) {
    throw std::invalid_argument("TwoModeMoments: negative variance");
  }
  // Cauchy-Schwarz, with a small relative slack for rounding in composed
  // loss maps.
  const double bound = var_p * var_c;
  if (cov * cov > bound * (1.0 + 1e-9) + 1e-300) {
    throw std::invalid_argument(
        "TwoModeMoments: covariance violates Cauchy-Schwarz");
  }
}

TwoModeMoments TwoModeMoments::scaled(double factor) const {
  if (!(factor >= 0.0)) {
    throw std::invalid_argument("TwoModeMoments::scaled: negative factor");
  }
  return TwoModeMoments(mean_p * factor, mean_c * factor, var_p * factor,
                        var_c * factor, cov * factor);
}

LossChannel::LossChannel(double transmission_) : transmission(transmission_) {
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw std::invalid_argument("LossChannel: transmission outside [0, 1]");
  }
}

DifferentialDetector::DifferentialDetector(double electronic_gain_)
    : electronic_gain(electronic_gain_) {
  if (!(electronic_gain >= 0.0)) {
    throw std::invalid_argument("DifferentialDetector: gain must be >= 0");
  }
}

TwoModeMoments source_moments(const TwinBeamSource& source, double window_s) {
  if (!(window_s > 0.0)) {
    throw std::invalid_argument("source_moments: window must be > 0");
  }
  const double g = source.gain;
  const double n0 = source.seed_flux * window_s;
  const double q = 2.0 * g - 1.0;
  return TwoModeMoments(g * n0, (g - 1.0) * n0, g * q * n0,
                        (g - 1.0) * q * n0, 0.5 * (q * q - 1.0) * n0);
}

TwoModeMoments apply_loss(const TwoModeMoments& m, const LossChannel& probe,
                          const LossChannel& conjugate) {
  const double tp = probe.transmission;
  const double tc = conjugate.transmission;
  return TwoModeMoments(tp * m.mean_p, tc * m.mean_c,
                        tp * tp * m.var_p + tp * (1.0 - tp) * m.mean_p,
                        tc * tc * m.var_c + tc * (1.0 - tc) * m.mean_c,
                        tp * tc * m.cov);
}

DifferentialNoise differential_noise(const TwoModeMoments& m,
                                     const DifferentialDetector& det) {
  const double g = det.electronic_gain;
  DifferentialNoise out;
  out.variance = m.var_p + g * g * m.var_c - 2.0 * g * m.cov;
  out.snl = m.mean_p + g * g * m.mean_c;
  return out;
}

GainOptimum optimize_gain(const TwoModeMoments& m) {
  if (m.mean_p == 0.0 && m.mean_c == 0.0 && m.var_p == 0.0 &&
      m.var_c == 0.0 && m.cov == 0.0) {
    throw std::invalid_argument("optimize_gain: degenerate moments");
  }
  auto ratio_at = [&m](double g) {
    const auto n = differential_noise(m, DifferentialDetector(g));
    return n.variance / n.snl;
  };
  if (m.mean_c <= 0.0) {
    return GainOptimum{0.0, SqueezingLevel::from_ratio(ratio_at(0.0))};
  }

  const double a = m.cov * m.mean_c;
  const double b = m.var_c * m.mean_p - m.var_p * m.mean_c;
  const double c = -m.cov * m.mean_p;
  const double scale = std::abs(a) + std::abs(b) + std::abs(c) + 1e-300;

  std::vector<double> candidates = {0.0, 1.0};
  if (std::abs(a) < 1e-15 * scale) {
    candidates.push_back(golden_section_min(0.0, 10.0, 1e-12, ratio_at));
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
      candidates.push_back(golden_section_min(0.0, 10.0, 1e-12, ratio_at));
    } else {
      // Both quadratic roots, stably; the admissible minimizer is whichever
      // non-negative one yields the lowest ratio.
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      const double r1 = q / a;
      if (r1 >= 0.0) candidates.push_back(r1);
      if (q != 0.0 && c / q >= 0.0) candidates.push_back(c / q);
    }
  }
  double g_opt = candidates.front();
  double best = ratio_at(g_opt);
  for (double g : candidates) {
    const double r = ratio_at(g);
    if (r < best) {
      best = r;
      g_opt = g;
    }
  }
  return GainOptimum{g_opt, SqueezingLevel::from_ratio(best)};
}

}  // namespace qpsense
