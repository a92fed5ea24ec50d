#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpsense/experiment.hpp"
#include "qpsense/mc_oracle.hpp"
#include "qpsense/plasmonic.hpp"
#include "qpsense/quantum_noise.hpp"
#include "qpsense/signal_chain.hpp"

namespace py = pybind11;
using namespace qpsense;

PYBIND11_MODULE(_qpsense, m) {
  m.doc() = "Twin-beam quantum-enhanced plasmonic sensing simulator";
  m.attr("__version__") = QPSENSE_VERSION;

  // ----- quantum noise core -----
  py::class_<SqueezingLevel>(m, "SqueezingLevel")
      .def_static("from_db", &SqueezingLevel::from_db, py::arg("db"))
      .def_static("from_ratio", &SqueezingLevel::from_ratio, py::arg("ratio"))
      .def_property_readonly("db", &SqueezingLevel::db)
      .def_property_readonly("ratio", &SqueezingLevel::ratio)
      .def("__repr__", [](const SqueezingLevel& s) {
        return "SqueezingLevel(db=" + std::to_string(s.db()) + ")";
      });

  m.def("db_to_linear", &db_to_linear, py::arg("db"));
  m.def("linear_to_db", &linear_to_db, py::arg("ratio"));

  py::class_<TwinBeamSource>(m, "TwinBeamSource")
      .def(py::init<double, double>(), py::arg("gain"), py::arg("seed_flux"))
      .def_static("from_squeezing", &TwinBeamSource::from_squeezing,
                  py::arg("level"), py::arg("seed_flux"))
      .def_readonly("gain", &TwinBeamSource::gain)
      .def_readonly("seed_flux", &TwinBeamSource::seed_flux);

  py::class_<TwoModeMoments>(m, "TwoModeMoments")
      .def(py::init<double, double, double, double, double>(),
           py::arg("mean_p"), py::arg("mean_c"), py::arg("var_p"),
           py::arg("var_c"), py::arg("cov"))
      .def_readonly("mean_p", &TwoModeMoments::mean_p)
      .def_readonly("mean_c", &TwoModeMoments::mean_c)
      .def_readonly("var_p", &TwoModeMoments::var_p)
      .def_readonly("var_c", &TwoModeMoments::var_c)
      .def_readonly("cov", &TwoModeMoments::cov)
      .def("fano_p", &TwoModeMoments::fano_p)
      .def("fano_c", &TwoModeMoments::fano_c)
      .def("scaled", &TwoModeMoments::scaled, py::arg("factor"));

  py::class_<LossChannel>(m, "LossChannel")
      .def(py::init<double>(), py::arg("transmission"))
      .def_readonly("transmission", &LossChannel::transmission);

  py::class_<DifferentialDetector>(m, "DifferentialDetector")
      .def(py::init<double>(), py::arg("electronic_gain"))
      .def_readonly("electronic_gain", &DifferentialDetector::electronic_gain);

  m.def("source_moments", &source_moments, py::arg("source"),
        py::arg("window_s"));
  m.def("apply_loss", &apply_loss, py::arg("moments"), py::arg("probe"),
        py::arg("conjugate"));

  py::class_<DifferentialNoise>(m, "DifferentialNoise")
      .def_readonly("variance", &DifferentialNoise::variance)
      .def_readonly("snl", &DifferentialNoise::snl)
      .def("ratio", &DifferentialNoise::ratio);
  m.def("differential_noise", &differential_noise, py::arg("moments"),
        py::arg("detector"));

  py::class_<GainOptimum>(m, "GainOptimum")
      .def_readonly("gain", &GainOptimum::gain)
      .def_readonly("residual", &GainOptimum::residual);
  m.def("optimize_gain", &optimize_gain, py::arg("moments"));

  // ----- plasmonic model -----
  py::class_<TransmissionSpectrum>(m, "TransmissionSpectrum")
      .def(py::init([](const std::vector<std::pair<double, double>>& pts) {
             std::vector<TransmissionSpectrum::Sample> samples;
             samples.reserve(pts.size());
             for (const auto& [w, t] : pts) samples.push_back({w, t});
             return TransmissionSpectrum(std::move(samples));
           }),
           py::arg("samples"))
      .def_static("from_csv", &TransmissionSpectrum::from_csv, py::arg("path"))
      .def("to_csv", &TransmissionSpectrum::to_csv, py::arg("path"))
      .def("samples", [](const TransmissionSpectrum& s) {
        std::vector<std::pair<double, double>> out;
        out.reserve(s.samples().size());
        for (const auto& p : s.samples()) {
          out.emplace_back(p.wavelength_nm, p.transmission);
        }
        return out;
      });

  py::class_<NanoholeGeometry>(m, "NanoholeGeometry")
      .def(py::init<double, int, int, double>(), py::arg("pitch_nm"),
           py::arg("mode_p"), py::arg("mode_q"), py::arg("medium_index"))
      .def_readonly("pitch_nm", &NanoholeGeometry::pitch_nm)
      .def_readonly("mode_p", &NanoholeGeometry::mode_p)
      .def_readonly("mode_q", &NanoholeGeometry::mode_q)
      .def_readonly("medium_index", &NanoholeGeometry::medium_index);

  py::class_<MetalPermittivity>(m, "MetalPermittivity")
      .def(py::init<double, double>(), py::arg("real_part"),
           py::arg("imag_part"))
      .def_readonly("real_part", &MetalPermittivity::real_part)
      .def_readonly("imag_part", &MetalPermittivity::imag_part);

  py::class_<SensorResponse>(m, "SensorResponse")
      .def(py::init<double, double, double, double>(), py::arg("wavelength_nm"),
           py::arg("t_at"), py::arg("dT_dlambda"), py::arg("dispersion_S"))
      .def_readonly("wavelength_nm", &SensorResponse::wavelength_nm)
      .def_readonly("t_at", &SensorResponse::t_at)
      .def_readonly("dT_dlambda", &SensorResponse::dT_dlambda)
      .def_readonly("dispersion_S", &SensorResponse::dispersion_S)
      .def_readonly("dT_dn", &SensorResponse::dT_dn);

  m.def("transmission_at", &transmission_at, py::arg("spectrum"),
        py::arg("lambda_nm"));
  m.def("slope_dT_dlambda", &slope_dT_dlambda, py::arg("spectrum"),
        py::arg("lambda_nm"), py::arg("window_nm"));
  m.def("dispersion_S", &dispersion_S, py::arg("geometry"), py::arg("metal"));
  m.def("sensor_response", &sensor_response, py::arg("spectrum"),
        py::arg("geometry"), py::arg("metal"), py::arg("lambda_nm"),
        py::arg("window_nm"));
  m.def("transduce", &transduce, py::arg("response"), py::arg("dn_riu"),
        py::arg("input_window_counts"));
  m.def("synth_spectrum", &synth_spectrum, py::arg("center_nm"),
        py::arg("depth"), py::arg("width_nm"), py::arg("baseline"),
        py::arg("half_span_nm") = 0.0, py::arg("step_nm") = 0.0);

  // ----- signal chain -----
  py::class_<AnalyzerSettings>(m, "AnalyzerSettings")
      .def(py::init<>())
      .def_readwrite("center_freq_hz", &AnalyzerSettings::center_freq_hz)
      .def_readwrite("rbw_hz", &AnalyzerSettings::rbw_hz)
      .def_readwrite("vbw_hz", &AnalyzerSettings::vbw_hz)
      .def_readwrite("span_hz", &AnalyzerSettings::span_hz)
      .def_readwrite("sweep_time_s", &AnalyzerSettings::sweep_time_s)
      .def_readwrite("trace_averages", &AnalyzerSettings::trace_averages)
      .def("validate", &AnalyzerSettings::validate);

  m.def("effective_averages", &effective_averages, py::arg("settings"));
  m.def("window_counts", &window_counts, py::arg("flux_per_s"),
        py::arg("bandwidth_hz"));

  py::class_<SnrEstimate>(m, "SnrEstimate")
      .def_static("from_db", &SnrEstimate::from_db, py::arg("snr_db"))
      .def_static("from_amplitude", &SnrEstimate::from_amplitude,
                  py::arg("amplitude"))
      .def_property_readonly("snr_db", &SnrEstimate::snr_db)
      .def_property_readonly("amplitude", &SnrEstimate::amplitude);

  m.def("peak_to_snr", &peak_to_snr, py::arg("peak_dbm"), py::arg("floor_dbm"),
        py::arg("noise_bias_db") = 0.0);
  m.def("snr_amplitude", &snr_amplitude, py::arg("snr_db"));
  m.def("predicted_snr", &predicted_snr, py::arg("signal_amplitude"),
        py::arg("noise_variance"), py::arg("n_averages"));
  m.def("power_to_dbm", &power_to_dbm, py::arg("power"));
  m.def("dbm_to_power", &dbm_to_power, py::arg("dbm"));

  // ----- experiment -----
  py::class_<ChamberCalibration>(m, "ChamberCalibration")
      .def(py::init<double, double, double, double>(),
           py::arg("wavelength_nm"), py::arg("path_length_mm"),
           py::arg("scan_amplitude_v"), py::arg("modulation_v_per_drive"))
      .def("dn_per_volt", &ChamberCalibration::dn_per_volt);

  m.def("calibrate_dn", &calibrate_dn, py::arg("calibration"),
        py::arg("drive_v"));
  m.def("photon_flux", &photon_flux, py::arg("power_w"),
        py::arg("wavelength_nm"));
  m.def("enhancement", &enhancement, py::arg("dn_snl"), py::arg("dn_q"));
  m.def("single_coherent_equivalent", &single_coherent_equivalent,
        py::arg("dn_balanced"));

  py::class_<BudgetEstimate>(m, "BudgetEstimate")
      .def_readonly("flux_per_s", &BudgetEstimate::flux_per_s)
      .def_readonly("window_counts_1hz", &BudgetEstimate::window_counts_1hz)
      .def_readonly("dn_min_per_rthz", &BudgetEstimate::dn_min_per_rthz)
      .def_readonly("dn_min_raw", &BudgetEstimate::dn_min_raw);
  m.def("budget_estimate", &budget_estimate, py::arg("transmission"),
        py::arg("dT_dn"), py::arg("flux_per_s"), py::arg("n_averages"),
        py::arg("bandwidth_hz"));

  py::class_<CoherentPairSpec>(m, "CoherentPairSpec")
      .def(py::init([](double ratio) { return CoherentPairSpec{ratio}; }),
           py::arg("conjugate_mean_ratio") = 1.0)
      .def_readwrite("conjugate_mean_ratio",
                     &CoherentPairSpec::conjugate_mean_ratio);

  py::class_<DrivePoint>(m, "DrivePoint")
      .def(py::init([](double t, double v) { return DrivePoint{t, v}; }),
           py::arg("time_s"), py::arg("drive_v"))
      .def_readwrite("time_s", &DrivePoint::time_s)
      .def_readwrite("drive_v", &DrivePoint::drive_v);

  py::class_<RampScenario>(m, "RampScenario")
      .def(py::init<>())
      .def_readwrite("source", &RampScenario::source)
      .def_readwrite("probe_loss", &RampScenario::probe_loss)
      .def_readwrite("conj_loss", &RampScenario::conj_loss)
      .def_readwrite("sensor", &RampScenario::sensor)
      .def_readwrite("post_sensor_power_w", &RampScenario::post_sensor_power_w)
      .def_readwrite("wavelength_nm", &RampScenario::wavelength_nm)
      .def_readwrite("analyzer", &RampScenario::analyzer)
      .def_readwrite("drive_schedule", &RampScenario::drive_schedule)
      .def_readwrite("calibration", &RampScenario::calibration)
      .def_readwrite("detection_bandwidth_hz",
                     &RampScenario::detection_bandwidth_hz)
      .def_readwrite("electronic_gain", &RampScenario::electronic_gain)
      .def_readwrite("measurement_windows", &RampScenario::measurement_windows)
      .def_readwrite("noise_floor_samples",
                     &RampScenario::noise_floor_samples);

  py::class_<RampMeasurementModel>(m, "RampMeasurementModel")
      .def_readonly("detected", &RampMeasurementModel::detected)
      .def_readonly("gain", &RampMeasurementModel::gain)
      .def_readonly("noise_variance", &RampMeasurementModel::noise_variance)
      .def_readonly("snl_variance", &RampMeasurementModel::snl_variance)
      .def_readonly("input_window_counts",
                    &RampMeasurementModel::input_window_counts)
      .def_readonly("n_effective", &RampMeasurementModel::n_effective)
      .def_readonly("windows", &RampMeasurementModel::windows);
  m.def("build_measurement_model", &build_measurement_model,
        py::arg("scenario"));

  py::class_<RampPointResult>(m, "RampPointResult")
      .def_readonly("time_s", &RampPointResult::time_s)
      .def_readonly("drive_v", &RampPointResult::drive_v)
      .def_readonly("dn_riu", &RampPointResult::dn_riu)
      .def_readonly("snr_amplitude", &RampPointResult::snr_amplitude);

  py::class_<NoiseFloorStats>(m, "NoiseFloorStats")
      .def_readonly("mean_amplitude", &NoiseFloorStats::mean_amplitude)
      .def_readonly("std_amplitude", &NoiseFloorStats::std_amplitude)
      .def_readonly("sample_count", &NoiseFloorStats::sample_count);

  py::class_<RampResult>(m, "RampResult")
      .def_readonly("points", &RampResult::points)
      .def_readonly("noise", &RampResult::noise)
      .def_readonly("model", &RampResult::model);
  m.def("run_ramp", &run_ramp, py::arg("scenario"));

  py::class_<SensitivityFit>(m, "SensitivityFit")
      .def_readonly("slope", &SensitivityFit::slope)
      .def_readonly("intercept", &SensitivityFit::intercept)
      .def_readonly("threshold", &SensitivityFit::threshold)
      .def_readonly("dn_min_raw", &SensitivityFit::dn_min_raw)
      .def_readonly("dn_min_per_rthz", &SensitivityFit::dn_min_per_rthz);
  m.def("fit_and_extract", &fit_and_extract, py::arg("points"),
        py::arg("noise"), py::arg("confidence"), py::arg("bandwidth_hz"));

  py::class_<ConfigurationResult>(m, "ConfigurationResult")
      .def_readonly("label", &ConfigurationResult::label)
      .def_readonly("gain", &ConfigurationResult::gain)
      .def_readonly("noise_variance", &ConfigurationResult::noise_variance)
      .def_readonly("snl_variance", &ConfigurationResult::snl_variance)
      .def_readonly("fit", &ConfigurationResult::fit);

  py::class_<SensitivityReport>(m, "SensitivityReport")
      .def_readonly("twin", &SensitivityReport::twin)
      .def_readonly("coherent", &SensitivityReport::coherent)
      .def_readonly("coherent_balanced",
                    &SensitivityReport::coherent_balanced)
      .def_readonly("dn_single_per_rthz",
                    &SensitivityReport::dn_single_per_rthz)
      .def_readonly("enhancement_vs_balanced",
                    &SensitivityReport::enhancement_vs_balanced)
      .def_readonly("enhancement_vs_single",
                    &SensitivityReport::enhancement_vs_single)
      .def_readonly("detection_bandwidth_hz",
                    &SensitivityReport::detection_bandwidth_hz)
      .def_readonly("n_effective", &SensitivityReport::n_effective);
  m.def("ramp_sensitivity", &ramp_sensitivity, py::arg("scenario"),
        py::arg("confidence") = 0.99);
  m.def("coherent_reference_scenario", &coherent_reference_scenario,
        py::arg("scenario"));
  m.def("coherent_balanced_scenario", &coherent_balanced_scenario,
        py::arg("scenario"));

  // ----- Monte Carlo oracle -----
  auto mc_mod = m.def_submodule("mc", "Monte Carlo validation oracle");

  py::class_<mc::TimeSeriesConfig::Modulation>(mc_mod, "Modulation")
      .def(py::init([](double f, double a) {
             return mc::TimeSeriesConfig::Modulation{f, a};
           }),
           py::arg("frequency_hz"), py::arg("amplitude_counts"))
      .def_readwrite("frequency_hz",
                     &mc::TimeSeriesConfig::Modulation::frequency_hz)
      .def_readwrite("amplitude_counts",
                     &mc::TimeSeriesConfig::Modulation::amplitude_counts);

  py::class_<mc::TimeSeriesConfig>(mc_mod, "TimeSeriesConfig")
      .def(py::init([](double rate, double dur, std::uint64_t seed,
                       std::optional<mc::TimeSeriesConfig::Modulation> mod) {
             return mc::TimeSeriesConfig{rate, dur, seed, mod};
           }),
           py::arg("sample_rate_hz"), py::arg("duration_s"), py::arg("seed"),
           py::arg("modulation") = std::nullopt)
      .def_readwrite("sample_rate_hz", &mc::TimeSeriesConfig::sample_rate_hz)
      .def_readwrite("duration_s", &mc::TimeSeriesConfig::duration_s)
      .def_readwrite("seed", &mc::TimeSeriesConfig::seed)
      .def_readwrite("modulation", &mc::TimeSeriesConfig::modulation);

  py::class_<mc::CountSeries>(mc_mod, "CountSeries")
      .def_readonly("probe", &mc::CountSeries::probe)
      .def_readonly("conj", &mc::CountSeries::conj)
      .def_readonly("dt_s", &mc::CountSeries::dt_s);
  mc_mod.def("sample_counts", &mc::sample_counts, py::arg("moments"),
             py::arg("config"));

  py::enum_<mc::AveragingMode>(mc_mod, "AveragingMode")
      .value("power_average", mc::AveragingMode::power_average)
      .value("log_average", mc::AveragingMode::log_average);

  py::class_<mc::SpectralEstimate>(mc_mod, "SpectralEstimate")
      .def_readonly("frequencies_hz", &mc::SpectralEstimate::frequencies_hz)
      .def_readonly("power", &mc::SpectralEstimate::power)
      .def_readonly("mode", &mc::SpectralEstimate::mode)
      .def_readonly("bin_width_hz", &mc::SpectralEstimate::bin_width_hz)
      .def("total_power", &mc::SpectralEstimate::total_power);
  mc_mod.def(
      "estimate_spectrum",
      [](const std::vector<double>& series, std::size_t segment_length,
         double rate, mc::AveragingMode mode) {
        return mc::estimate_spectrum(series, segment_length, rate, mode);
      },
      py::arg("series"), py::arg("segment_length"), py::arg("sample_rate_hz"),
      py::arg("mode") = mc::AveragingMode::power_average);

  mc_mod.def("derive_seed", &mc::derive_seed, py::arg("seed"),
             py::arg("stream"));
  mc_mod.def("sampled_ramp", &mc::sampled_ramp, py::arg("scenario"),
             py::arg("seed"), py::arg("noise_scale") = 1.0);

  py::class_<mc::GridCheckPoint>(mc_mod, "GridCheckPoint")
      .def_readonly("probe_transmission",
                    &mc::GridCheckPoint::probe_transmission)
      .def_readonly("conj_transmission",
                    &mc::GridCheckPoint::conj_transmission)
      .def_readonly("gain", &mc::GridCheckPoint::gain)
      .def_readonly("measured_ratio", &mc::GridCheckPoint::measured_ratio)
      .def_readonly("expected_ratio", &mc::GridCheckPoint::expected_ratio)
      .def_readonly("standard_error", &mc::GridCheckPoint::standard_error)
      .def_readonly("pass", &mc::GridCheckPoint::pass);
  mc_mod.def(
      "difference_noise_grid",
      [](const TwinBeamSource& source, const std::vector<double>& tp,
         const std::vector<double>& tc, const std::vector<double>& g,
         std::size_t samples, std::uint64_t seed) {
        return mc::difference_noise_grid(source, tp, tc, g, samples, seed);
      },
      py::arg("source"), py::arg("probe_ts"), py::arg("conj_ts"),
      py::arg("gains"), py::arg("samples"), py::arg("seed"));

  py::class_<mc::PipelineCheck>(mc_mod, "PipelineCheck")
      .def_readonly("name", &mc::PipelineCheck::name)
      .def_readonly("measured", &mc::PipelineCheck::measured)
      .def_readonly("expected", &mc::PipelineCheck::expected)
      .def_readonly("tolerance", &mc::PipelineCheck::tolerance)
      .def_readonly("pass", &mc::PipelineCheck::pass);

  py::class_<mc::PipelineValidation>(mc_mod, "PipelineValidation")
      .def_readonly("checks", &mc::PipelineValidation::checks)
      .def_readonly("ratio_mean", &mc::PipelineValidation::ratio_mean)
      .def_readonly("ratio_std", &mc::PipelineValidation::ratio_std)
      .def_readonly("pass", &mc::PipelineValidation::pass);
  mc_mod.def("validate_pipeline", &mc::validate_pipeline, py::arg("scenario"),
             py::arg("trials"), py::arg("seed"), py::arg("noise_scale") = 1.0);
}
