#pragma once

#include <complex>
#include <string>
#include <vector>

namespace qpsense {

/// Measured (or synthesized) transmission-vs-wavelength curve of the
/// nanohole array. Wavelengths strictly increasing, transmissions in [0, 1].
class TransmissionSpectrum {
 public:
  struct Sample {
    double wavelength_nm;
    double transmission;
  };

  explicit TransmissionSpectrum(std::vector<Sample> samples);

  const std::vector<Sample>& samples() const { return samples_; }
  double min_wavelength_nm() const { return samples_.front().wavelength_nm; }
  double max_wavelength_nm() const { return samples_.back().wavelength_nm; }

  /// Two-column CSV (wavelength_nm, transmission); header row required.
  static TransmissionSpectrum from_csv(const std::string& path);
  void to_csv(const std::string& path) const;

 private:
  std::vector<Sample> samples_;
};

struct NanoholeGeometry {
  double pitch_nm;      // d > 0
  int mode_p;           // (p, q) != (0, 0)
  int mode_q;
  double medium_index;  // n > 0

  NanoholeGeometry(double pitch_nm, int mode_p, int mode_q,
                   double medium_index);
};

struct MetalPermittivity {
  double real_part;  // < 0 in the metallic regime
  double imag_part;

  MetalPermittivity(double real_part, double imag_part);
  std::complex<double> value() const { return {real_part, imag_part}; }
};

/// The sensor's transduction figures at one operating wavelength.
/// dT_dn = |dT_dlambda| * |dispersion_S| by construction.
struct SensorResponse {
  double wavelength_nm;
  double t_at;            // transmission at the operating wavelength
  double dT_dlambda;      // signed local slope, per nm
  double dispersion_S;    // nm per RIU
  double dT_dn;           // per RIU

  SensorResponse(double wavelength_nm, double t_at, double dT_dlambda,
                 double dispersion_S);
};

/// Linear interpolation of the spectrum at lambda; rejects out-of-range
/// wavelengths.
double transmission_at(const TransmissionSpectrum& spec, double lambda_nm);

/// Least-squares slope of the samples within [lambda - window/2,
/// lambda + window/2]; requires at least 5 samples in the window.
double slope_dT_dlambda(const TransmissionSpectrum& spec, double lambda_nm,
                        double window_nm);

/// Spectral dispersion of the (p, q) plasmonic mode of a square array:
///   S = d / sqrt(p^2 + q^2) * | (eps_m / (n^2 + eps_m))^(3/2) |,
/// evaluated with complex eps_m and the magnitude taken at the end.
double dispersion_S(const NanoholeGeometry& geom,
                    const MetalPermittivity& metal);

SensorResponse sensor_response(const TransmissionSpectrum& spec,
                               const NanoholeGeometry& geom,
                               const MetalPermittivity& metal,
                               double lambda_nm, double window_nm);

/// Peak amplitude of the count modulation produced by an index modulation
/// of amplitude dn on a beam of `input_window_counts` photons per window
/// entering the sensor: counts * dT_dn * dn.
double transduce(const SensorResponse& resp, double dn_riu,
                 double input_window_counts);

/// Synthetic single-resonance spectrum on a uniform grid, used when no
/// measured dataset is available:
///   T(lambda) = baseline - depth * w^2 / ((lambda - center)^2 + w^2).
/// Negative depth gives a peak. The grid spans center +/- half_span at
/// step_nm spacing; all values must stay inside [0, 1].
TransmissionSpectrum synth_spectrum(double center_nm, double depth,
                                    double width_nm, double baseline,
                                    double half_span_nm = 0.0,
                                    double step_nm = 0.0);

/// Analytic derivative of the synth_spectrum form, for validation.
double synth_spectrum_slope(double center_nm, double depth, double width_nm,
                            double lambda_nm);

}  // namespace qpsense
