#include "qpsense/plasmonic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qpsense/math_util.hpp"

namespace qpsense {

TransmissionSpectrum::TransmissionSpectrum(std::vector<Sample> samples)
    : samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw std::invalid_argument("TransmissionSpectrum: need >= 2 samples");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.transmission >= 0.0 && s.transmission <= 1.0)) {
      throw std::invalid_argument(
          "TransmissionSpectrum: transmission outside [0, 1]");
    }
    if (i > 0 && !(s.wavelength_nm > samples_[i - 1].wavelength_nm)) {
      throw std::invalid_argument(
          "TransmissionSpectrum: wavelengths must be strictly increasing");
    }
  }
}

TransmissionSpectrum TransmissionSpectrum::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open spectrum file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty spectrum file: " + path);
  }
  // Header row is mandatory; accept any two comma-separated column names.
  if (line.find(',') == std::string::npos ||
      line.find_first_not_of("-+.,0123456789eE \t\r") == std::string::npos) {
    throw std::runtime_error("spectrum file missing header row: " + path);
  }
  std::vector<Sample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two comma-separated columns");
    }
    try {
      samples.push_back({std::stod(a), std::stod(b)});
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed number");
    }
  }
  return TransmissionSpectrum(std::move(samples));
}

void TransmissionSpectrum::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write spectrum file: " + path);
  }
  out << "wavelength_nm,transmission\n";
  for (const auto& s : samples_) {
    out << s.wavelength_nm << ',' << s.transmission << '\n';
  }
}

NanoholeGeometry::NanoholeGeometry(double pitch_nm_, int mode_p_, int mode_q_,
                                   double medium_index_)
    : pitch_nm(pitch_nm_), mode_p(mode_p_), mode_q(mode_q_),
      medium_index(medium_index_) {
  if (!(pitch_nm > 0.0)) {
    throw std::invalid_argument("NanoholeGeometry: pitch must be > 0");
  }
  if (mode_p == 0 && mode_q == 0) {
    throw std::invalid_argument("NanoholeGeometry: (p, q) = (0, 0)");
  }
  if (!(medium_index > 0.0)) {
    throw std::invalid_argument("NanoholeGeometry: medium index must be > 0");
  }
}

MetalPermittivity::MetalPermittivity(double real_part_, double imag_part_)
    : real_part(real_part_), imag_part(imag_part_) {
  if (!(real_part < 0.0)) {
    throw std::invalid_argument(
        "MetalPermittivity: real part must be negative (metallic regime)");
  }
}

SensorResponse::SensorResponse(double wavelength_nm_, double t_at_,
                               double dT_dlambda_, double dispersion_S_)
    : wavelength_nm(wavelength_nm_), t_at(t_at_), dT_dlambda(dT_dlambda_),
      dispersion_S(dispersion_S_),
      dT_dn(std::abs(dT_dlambda_) * std::abs(dispersion_S_)) {
  if (!(t_at >= 0.0 && t_at <= 1.0)) {
    throw std::invalid_argument("SensorResponse: transmission outside [0, 1]");
  }
}

double transmission_at(const TransmissionSpectrum& spec, double lambda_nm) {
  const auto& s = spec.samples();
  if (lambda_nm < s.front().wavelength_nm ||
      lambda_nm > s.back().wavelength_nm) {
    throw std::out_of_range("transmission_at: wavelength outside spectrum");
  }
  auto it = std::lower_bound(
      s.begin(), s.end(), lambda_nm,
      [](const TransmissionSpectrum::Sample& a, double w) {
        return a.wavelength_nm < w;
      });
  if (it->wavelength_nm == lambda_nm) return it->transmission;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double f =
      (lambda_nm - lo.wavelength_nm) / (hi.wavelength_nm - lo.wavelength_nm);
  return lo.transmission + f * (hi.transmission - lo.transmission);
}

double slope_dT_dlambda(const TransmissionSpectrum& spec, double lambda_nm,
                        double window_nm) {
  if (!(window_nm > 0.0)) {
    throw std::invalid_argument("slope_dT_dlambda: window must be > 0");
  }
  std::vector<double> x, y;
  for (const auto& s : spec.samples()) {
    if (std::abs(s.wavelength_nm - lambda_nm) <= window_nm / 2.0) {
      x.push_back(s.wavelength_nm);
      y.push_back(s.transmission);
    }
  }
  if (x.size() < 5) {
    throw std::invalid_argument(
        "slope_dT_dlambda: fewer than 5 samples in window");
  }
  return fit_line(x, y).slope;
}

double dispersion_S(const NanoholeGeometry& geom,
                    const MetalPermittivity& metal) {
  const std::complex<double> eps = metal.value();
  const std::complex<double> denom =
      geom.medium_index * geom.medium_index + eps;
  if (std::abs(denom) == 0.0) {
    throw std::invalid_argument("dispersion_S: n^2 + eps_m pole");
  }
  const double order = std::hypot(static_cast<double>(geom.mode_p),
                                  static_cast<double>(geom.mode_q));
  return geom.pitch_nm / order * std::abs(std::pow(eps / denom, 1.5));
}

SensorResponse sensor_response(const TransmissionSpectrum& spec,
                               const NanoholeGeometry& geom,
                               const MetalPermittivity& metal,
                               double lambda_nm, double window_nm) {
  return SensorResponse(lambda_nm, transmission_at(spec, lambda_nm),
                        slope_dT_dlambda(spec, lambda_nm, window_nm),
                        dispersion_S(geom, metal));
}

double transduce(const SensorResponse& resp, double dn_riu,
                 double input_window_counts) {
  if (!(dn_riu >= 0.0)) {
    throw std::invalid_argument("transduce: dn must be >= 0");
  }
  if (!(input_window_counts >= 0.0)) {
    throw std::invalid_argument("transduce: counts must be >= 0");
  }
  return input_window_counts * resp.dT_dn * dn_riu;
}

TransmissionSpectrum synth_spectrum(double center_nm, double depth,
                                    double width_nm, double baseline,
                                    double half_span_nm, double step_nm) {
  if (!(width_nm > 0.0)) {
    throw std::invalid_argument("synth_spectrum: width must be > 0");
  }
  if (half_span_nm <= 0.0) half_span_nm = 6.0 * width_nm;
  if (step_nm <= 0.0) step_nm = width_nm / 20.0;
  // Extremes of the Lorentzian are baseline (far tail) and baseline - depth
  // (at center); both bounds must stay inside [0, 1].
  for (double v : {baseline, baseline - depth}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(
          "synth_spectrum: parameters leave the [0, 1] range");
    }
  }
  std::vector<TransmissionSpectrum::Sample> samples;
  const int n = static_cast<int>(std::round(2.0 * half_span_nm / step_nm));
  samples.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double lam = center_nm - half_span_nm + i * step_nm;
    const double d = lam - center_nm;
    const double t =
        baseline - depth * width_nm * width_nm / (d * d + width_nm * width_nm);
    samples.push_back({lam, t});
  }
  return TransmissionSpectrum(std::move(samples));
}

double synth_spectrum_slope(double center_nm, double depth, double width_nm,
                            double lambda_nm) {
  const double d = lambda_nm - center_nm;
  const double w2 = width_nm * width_nm;
  return depth * w2 * 2.0 * d / ((d * d + w2) * (d * d + w2));
}

}  // namespace qpsense
