#pragma once

#include <utility>

namespace qpsense {

/// Squeezing expressed both in dB below the shot-noise limit and as the
/// linear noise ratio R = 10^(-dB/10). Positive dB means noise below the
/// SNL; R > 1 (negative dB) is excess noise.
class SqueezingLevel {
 public:
  static SqueezingLevel from_db(double db);
  static SqueezingLevel from_ratio(double ratio);

  double db() const { return db_; }
  double ratio() const { return ratio_; }

 private:
  SqueezingLevel(double db, double ratio) : db_(db), ratio_(ratio) {}
  double db_;
  double ratio_;
};

/// Noise ratio R for a squeezing level in dB: R = 10^(-db/10).
double db_to_linear(double db);

/// Inverse of db_to_linear.
double linear_to_db(double ratio);

/// Seeded phase-insensitive amplifier with gain G >= 1 acting on a coherent
/// seed of n0 photons/s. The ideal intensity-difference noise ratio of the
/// generated beams is 1/(2G - 1).
struct TwinBeamSource {
  double gain;       // G >= 1
  double seed_flux;  // photons per second, > 0

  TwinBeamSource(double gain, double seed_flux);

  /// Source whose ideal difference squeezing equals `level`:
  /// 2G - 1 = 1/R.
  static TwinBeamSource from_squeezing(const SqueezingLevel& level,
                                       double seed_flux);
};

/// First and second photon-counting moments of a probe/conjugate pair,
/// per integration window. This is the full state of the Gaussian
/// intensity model: everything downstream consumes only these five
/// numbers.
struct TwoModeMoments {
  double mean_p;  // counts
  double mean_c;  // counts
  double var_p;   // counts^2
  double var_c;   // counts^2
  double cov;     // counts^2

  TwoModeMoments(double mean_p, double mean_c, double var_p, double var_c,
                 double cov);

  double fano_p() const { return var_p / mean_p; }
  double fano_c() const { return var_c / mean_c; }

  /// Rescale all moments by a positive factor. Valid for renormalizing the
  /// seed flux or the window length under white intensity noise, where
  /// means, variances and covariance all grow linearly with the count.
  TwoModeMoments scaled(double factor) const;
};

/// Beam-splitter style intensity loss, transmission T in [0, 1].
struct LossChannel {
  double transmission;

  explicit LossChannel(double transmission);
};

/// Balanced subtraction with adjustable electronic gain g applied to the
/// conjugate photocurrent before differencing.
struct DifferentialDetector {
  double electronic_gain;  // g >= 0

  explicit DifferentialDetector(double electronic_gain);
};

/// Moments of the twin beams generated by `source` over one integration
/// window of `window_s` seconds. With N0 = n0 * window:
///   <p> = G N0,            <c> = (G-1) N0,
///   Var p = G(2G-1) N0,    Var c = (G-1)(2G-1) N0,
///   Cov  = ((2G-1)^2 - 1) N0 / 2,
/// so Var(p - c) / (<p> + <c>) = 1/(2G - 1).
TwoModeMoments source_moments(const TwinBeamSource& source, double window_s);

/// Independent loss on each arm. Per arm:
///   mean' = T mean,  var' = T^2 var + T (1 - T) mean,
/// and cov' = T_p T_c cov. The T(1-T) term is the vacuum noise that the
/// lost fraction couples in.
TwoModeMoments apply_loss(const TwoModeMoments& m, const LossChannel& probe,
                          const LossChannel& conjugate);

struct DifferentialNoise {
  double variance;  // Var(p - g c)
  double snl;       // same measurement on coherent beams of equal powers
  double ratio() const { return variance / snl; }
};

/// Variance of the gain-weighted difference p - g c, together with the
/// shot-noise limit for that measurement (coherent states of identical
/// mean powers): snl = <p> + g^2 <c>.
DifferentialNoise differential_noise(const TwoModeMoments& m,
                                     const DifferentialDetector& det);

struct GainOptimum {
  double gain;
  SqueezingLevel residual;  // minimized variance/snl as a squeezing level
};

/// Electronic gain minimizing variance/snl over g >= 0. Uses the
/// stationary-point quadratic
///   (cov mean_c) g^2 + (var_c mean_p - var_p mean_c) g - cov mean_p = 0
/// (positive root); falls back to golden-section search on [0, 10] when
/// the quadratic degenerates. mean_c == 0 returns g = 0.
GainOptimum optimize_gain(const TwoModeMoments& m);

}  // namespace qpsense
