#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpsense/signal_chain.hpp"

using namespace qpsense;

namespace {

AnalyzerSettings settings(double rbw, double vbw, int traces) {
  AnalyzerSettings s;
  s.rbw_hz = rbw;
  s.vbw_hz = vbw;
  s.trace_averages = traces;
  return s;
}

}  // namespace

TEST_CASE("effective_averages: reference analyzer settings") {
  CHECK(effective_averages(settings(100.0, 10.0, 50)) == 500.0);
  CHECK(effective_averages(settings(10.0, 1.0, 50)) == 500.0);
  CHECK(effective_averages(settings(7.0, 7.0, 1)) == 1.0);
  CHECK_THROWS_AS(settings(0.0, 1.0, 1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(settings(1.0, 1.0, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(settings(1.0, 100.0, 1).validate(),
                  std::invalid_argument);  // effective averages < 1
}

TEST_CASE("window_counts: tau = 1/(2B) convention") {
  CHECK(window_counts(2.8e14, 1.0) == doctest::Approx(1.4e14).scale(0.0).epsilon(1e-14));
  CHECK(window_counts(0.0, 5.0) == 0.0);
  CHECK(window_counts(2.8e14, 100.0) == doctest::Approx(1.4e12).scale(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(window_counts(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("SnrEstimate keeps dB and amplitude consistent") {
  for (double db : {-20.0, -3.0, 0.0, 9.542, 20.0}) {
    const auto s = SnrEstimate::from_db(db);
    CHECK(s.amplitude() ==
          doctest::Approx(std::sqrt(std::pow(10.0, db / 10.0))).scale(0.0).epsilon(1e-12));
    const auto back = SnrEstimate::from_amplitude(s.amplitude());
    CHECK(back.snr_db() == doctest::Approx(db).scale(1.0).epsilon(1e-12));
  }
  CHECK(SnrEstimate::from_amplitude(0.0).amplitude() == 0.0);
  CHECK(std::isinf(SnrEstimate::from_amplitude(0.0).snr_db()));
  CHECK_THROWS_AS(SnrEstimate::from_amplitude(-1.0), std::invalid_argument);
}

TEST_CASE("snr_amplitude pinned values") {
  CHECK(snr_amplitude(0.0) == 1.0);
  CHECK(snr_amplitude(20.0) == doctest::Approx(10.0).scale(0.0).epsilon(1e-12));
  CHECK(snr_amplitude(9.542425094393249) == doctest::Approx(3.0).scale(0.0).epsilon(1e-12));
}

TEST_CASE("peak_to_snr: signal-plus-noise identity") {
  // Exact identity point: delta = 10 log10(2) gives SNR = 0 dB.
  const double delta0 = 10.0 * std::log10(2.0);
  CHECK(peak_to_snr(delta0, 0.0).snr_db() ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(peak_to_snr(delta0, 0.0).amplitude() ==
        doctest::Approx(1.0).scale(0.0).epsilon(1e-9));
  // The conventional rounded value 3.0103 dB.
  CHECK(std::abs(peak_to_snr(3.0103, 0.0).snr_db()) < 1e-3);

  CHECK(peak_to_snr(10.0, 0.0).snr_db() ==
        doctest::Approx(9.542425094393249).scale(0.0).epsilon(1e-12));
  CHECK(peak_to_snr(10.0, 0.0).amplitude() == doctest::Approx(3.0).scale(0.0).epsilon(1e-12));

  // Large delta: the correction vanishes and snr_db approaches delta.
  CHECK(peak_to_snr(60.0, 0.0).snr_db() == doctest::Approx(60.0).scale(0.0).epsilon(1e-6));

  CHECK_THROWS_AS(peak_to_snr(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(peak_to_snr(-1.0, 0.0), std::invalid_argument);

  // The noise-bias offset shifts the floor before the identity.
  CHECK(peak_to_snr(12.5, 0.0, 2.5).snr_db() ==
        doctest::Approx(peak_to_snr(10.0, 0.0).snr_db()).scale(0.0).epsilon(1e-12));
}

TEST_CASE("peak_to_snr: monotone in delta, correction positive and shrinking") {
  double prev_snr = -1e9;
  double prev_corr = 1e9;
  for (double delta = 0.5; delta <= 30.0; delta += 0.5) {
    const double snr = peak_to_snr(delta, 0.0).snr_db();
    const double corr = delta - snr;
    CHECK(snr > prev_snr);
    CHECK(corr > 0.0);
    CHECK(corr < prev_corr);
    prev_snr = snr;
    prev_corr = corr;
  }
}

TEST_CASE("predicted_snr: RMS convention and sqrt(N) law") {
  CHECK(predicted_snr(0.0, 100.0, 50.0).amplitude() == 0.0);

  const double amp1 = predicted_snr(3.0, 49.0, 1.0).amplitude();
  CHECK(amp1 == doctest::Approx(3.0 / std::sqrt(2.0 * 49.0)).scale(0.0).epsilon(1e-12));
  for (double n : {4.0, 100.0, 500.0}) {
    CHECK(predicted_snr(3.0, 49.0, n).amplitude() ==
          doctest::Approx(std::sqrt(n) * amp1).scale(0.0).epsilon(1e-12));
  }
  CHECK(predicted_snr(3.0, 49.0, 4.0).amplitude() ==
        doctest::Approx(2.0 * predicted_snr(3.0, 49.0, 1.0).amplitude()).scale(0.0)
            .epsilon(1e-12));

  CHECK_THROWS_AS(predicted_snr(1.0, 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(predicted_snr(1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("predicted_snr: coherent sensitivity closure") {
  // Coherent beam with input counts I0 through transmission T: detected
  // variance T*I0, transduction slope |dI/dT| = I0. The amplitude SNR is 1
  // at dn = sqrt(2) * (1/dT_dn) * sqrt(T/I0) / sqrt(N); the sqrt(2) is the
  // RMS factor documented in predicted_snr.
  const double i0 = 1.5e14, t = 0.66, dT_dn = 2.5, n = 500.0;
  const double dn = std::sqrt(2.0) / dT_dn * std::sqrt(t / i0) / std::sqrt(n);
  const double signal = i0 * dT_dn * dn;
  CHECK(predicted_snr(signal, t * i0, n).amplitude() ==
        doctest::Approx(1.0).scale(0.0).epsilon(1e-12));
}

TEST_CASE("round trip: predicted power readings through peak_to_snr") {
  // Compose predicted floor and peak readings in dBm and recover the
  // predicted SNR through the signal-plus-noise correction.
  const double var = 2.5e12;
  const double n = 500.0;
  for (double signal : {1.5e5, 6.0e5, 3.0e6}) {
    const auto pred = predicted_snr(signal, var, n);
    REQUIRE(pred.snr_db() > 0.0);
    const double floor_dbm = power_to_dbm(var);
    const double peak_dbm =
        power_to_dbm(var * (1.0 + pred.amplitude() * pred.amplitude()));
    const auto rec = peak_to_snr(peak_dbm, floor_dbm);
    CHECK(rec.amplitude() ==
          doctest::Approx(pred.amplitude()).scale(0.0).epsilon(1e-6));
  }
  CHECK(dbm_to_power(power_to_dbm(1234.5)) ==
        doctest::Approx(1234.5).scale(0.0).epsilon(1e-12));
}
