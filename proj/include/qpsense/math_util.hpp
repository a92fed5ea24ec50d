#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace qpsense {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least-squares line through (x, y). Requires >= 2 points and
/// non-degenerate x spread.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Quantile of the standard normal distribution, p in (0, 1).
/// Acklam's rational approximation, relative error below 1.2e-9.
double normal_quantile(double p);

/// Golden-section minimization of f on [lo, hi] to absolute tolerance tol.
double golden_section_min(double lo, double hi, double tol,
                          const std::function<double(double)>& f);

}  // namespace qpsense
