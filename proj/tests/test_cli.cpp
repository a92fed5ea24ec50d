#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef QPSENSE_CLI_PATH
#define QPSENSE_CLI_PATH "qpsense"
#endif
#ifndef QPSENSE_DATA_DIR
#define QPSENSE_DATA_DIR "data"
#endif

namespace {

struct RunOutcome {
  int exit_code;
  std::string stdout_text;
};

RunOutcome run_cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "qpsense_cli_stdout.txt";
  const std::string cmd = std::string(QPSENSE_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return RunOutcome{WEXITSTATUS(raw), text};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

const std::string kScenario =
    std::string(QPSENSE_DATA_DIR) + "/experiment_scenario.ini";

const std::string kSpectrumOverride =
    "\n[sensor]\nspectrum_csv = " + std::string(QPSENSE_DATA_DIR) +
    "/eot_spectrum_approx.csv\n";


std::string write_config(const fs::path& dir, const std::string& name,
                         const std::string& body) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << body;
  return p.string();
}

}  // namespace

TEST_CASE("budget: reference parameters and report schema basics") {
  const auto dir = fresh_dir("qpsense_budget");
  const auto r = run_cli("budget --config " + kScenario + " --out " +
                         dir.string());
  CHECK(r.exit_code == 0);
  const auto rep = load_json(dir / "budget_report.json");
  CHECK(rep["manifest"]["command"] == "budget");
  CHECK(rep["flux_per_s"].get<double>() == doctest::Approx(2.80e14).scale(0.0).epsilon(0.01));
  // 70 uW with the measured-spectrum slope: about 1.2e-9 RIU/sqrt(Hz).
  CHECK(rep["dn_min_per_rthz"].get<double>() ==
        doctest::Approx(1.2e-9).scale(0.0).epsilon(0.1));
}

TEST_CASE("budget: zero-slope sensor is an explicit compute error") {
  const auto dir = fresh_dir("qpsense_budget_zero");
  const auto cfgpath = write_config(dir, "flat.ini", R"(
[sensor]
wavelength_nm = 795
synth_center_nm = 795
synth_depth = 0
synth_width_nm = 20
synth_baseline = 0.66

[probe]
post_sensor_power_uw = 70

[analyzer]
rbw_hz = 100
vbw_hz = 10
trace_averages = 50
)");
  const auto r = run_cli("budget --config " + cfgpath + " --out " +
                         dir.string());
  CHECK(r.exit_code == 2);
  CHECK(r.stdout_text.find("infeasible") != std::string::npos);
}

TEST_CASE("missing config keys name the key path, exit code 1") {
  const auto dir = fresh_dir("qpsense_missing");
  const auto cfgpath = write_config(dir, "missing.ini", R"(
[probe]
post_sensor_power_uw = 70
)");
  const auto r = run_cli("budget --config " + cfgpath + " --out " +
                         dir.string());
  CHECK(r.exit_code == 1);
  CHECK(r.stdout_text.find("analyzer.rbw_hz") != std::string::npos);
}

TEST_CASE("squeezing: lossy-sensor readout") {
  const auto dir = fresh_dir("qpsense_squeezing");
  const auto r =
      run_cli("squeezing --config " + kScenario + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  const auto rep = load_json(dir / "squeezing_report.json");
  CHECK(rep["residual_db"].get<double>() == doctest::Approx(4.0).scale(0.0).epsilon(0.075));
  CHECK(rep["g_opt"].get<double>() == doctest::Approx(0.60).scale(0.0).epsilon(0.05));
  CHECK(rep["source_db_at_unit_gain"].get<double>() ==
        doctest::Approx(9.0).scale(0.0).epsilon(1e-9));
  CHECK(rep["enhancement_expected"].get<double>() ==
        doctest::Approx(0.585).scale(0.0).epsilon(0.03));
}

TEST_CASE("calibrate: table row at the quoted point") {
  const auto dir = fresh_dir("qpsense_calibrate");
  const auto cfgpath = write_config(dir, "cal.ini", R"(
[calibration]
wavelength_nm = 795
path_length_mm = 6.35
scan_amplitude_v = 2.0
modulation_v_per_drive_v = 0.1
table_max_drive_v = 2.0
table_rows = 3
)");
  const auto r =
      run_cli("calibrate --config " + cfgpath + " --out " + dir.string());
  CHECK(r.exit_code == 0);
  const auto rep = load_json(dir / "calibrate_report.json");
  CHECK(rep["table"].size() == 3);
  CHECK(rep["table"][1]["drive_v"].get<double>() == 1.0);
  CHECK(rep["table"][1]["dn_riu"].get<double>() ==
        doctest::Approx(1.99e-6).scale(0.0).epsilon(2e-3));
}

TEST_CASE("ramp: deterministic reports and byte-identical reruns") {
  const auto dir1 = fresh_dir("qpsense_ramp1");
  const auto dir2 = fresh_dir("qpsense_ramp2");
  const auto r1 =
      run_cli("ramp --config " + kScenario + " --out " + dir1.string());
  const auto r2 =
      run_cli("ramp --config " + kScenario + " --out " + dir2.string());
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(slurp(dir1 / "ramp_report.json") == slurp(dir2 / "ramp_report.json"));
  for (const char* name :
       {"ramp_twin.csv", "ramp_coherent.csv", "ramp_coherent_balanced.csv"}) {
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
    CHECK(slurp(dir1 / name).rfind("time_s,drive_v,dn_riu,snr_amplitude\n",
                                   0) == 0);
  }

  const auto rep = load_json(dir1 / "ramp_report.json");
  CHECK(rep["enhancement_vs_balanced"].get<double>() ==
        doctest::Approx(0.56).scale(0.0).epsilon(0.06));
  CHECK(rep["enhancement_vs_single"].get<double>() ==
        doctest::Approx(0.27).scale(0.0).epsilon(0.25));
  const double dn_coh =
      rep["configurations"][1]["fit"]["dn_min_per_rthz"].get<double>();
  CHECK(dn_coh / 8.6e-10 > 0.5);
  CHECK(dn_coh / 8.6e-10 < 2.0);
}

TEST_CASE("ramp: stochastic mode needs a seed and is reproducible with one") {
  const auto dir = fresh_dir("qpsense_ramp_sto");
  std::ifstream base(kScenario);
  std::stringstream body;
  body << base.rdbuf();
  body << "\n[ramp2]\n";  // keep file structure valid
  auto text = body.str();
  text += "\n";
  const auto cfgpath = write_config(dir, "sto.ini", text + kSpectrumOverride + R"(
[ramp]
drive_stop_v = 10
points = 9
stochastic = true
noise_floor_samples = 32
)");
  const auto no_seed =
      run_cli("ramp --config " + cfgpath + " --out " + dir.string());
  CHECK(no_seed.exit_code == 1);

  const auto dir_a = fresh_dir("qpsense_ramp_sto_a");
  const auto dir_b = fresh_dir("qpsense_ramp_sto_b");
  const auto a = run_cli("ramp --config " + cfgpath + " --seed 7 --out " +
                         dir_a.string());
  const auto b = run_cli("ramp --config " + cfgpath + " --seed 7 --out " +
                         dir_b.string());
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(dir_a / "ramp_report.json") == slurp(dir_b / "ramp_report.json"));
  CHECK(slurp(dir_a / "ramp_twin.csv") == slurp(dir_b / "ramp_twin.csv"));

  const auto c = run_cli("ramp --config " + cfgpath + " --seed 8 --out " +
                         dir_a.string());
  CHECK(c.exit_code == 0);
  CHECK(slurp(dir_a / "ramp_twin.csv") != slurp(dir_b / "ramp_twin.csv"));
}

TEST_CASE("usage errors exit with the config-error code") {
  const auto no_config = run_cli("budget");
  CHECK(no_config.exit_code == 1);
  const auto bad_flag = run_cli("budget --config " + kScenario +
                                " --format yaml");
  CHECK(bad_flag.exit_code == 1);
}

TEST_CASE("QPSENSE_OUT provides the default output directory") {
  const auto dir = fresh_dir("qpsense_envout");
  const fs::path out = fs::temp_directory_path() / "qpsense_from_env";
  fs::remove_all(out);
  const std::string cmd = "QPSENSE_OUT=" + out.string() + " " +
                          std::string(QPSENSE_CLI_PATH) +
                          " calibrate --config " + kScenario +
                          " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(fs::exists(out / "calibrate_report.json"));
  (void)dir;
}

TEST_CASE("validate: corrupted covariance fails invariants with exit 3") {
  const auto dir = fresh_dir("qpsense_validate_bad");
  std::stringstream body;
  body << std::ifstream(kScenario).rdbuf();
  const auto cfgpath = write_config(dir, "bad.ini", body.str() + kSpectrumOverride + R"(
[validate]
custom_mean_p = 100
custom_mean_c = 100
custom_var_p = 2
custom_var_c = 2
custom_cov = 3
)");
  const auto r = run_cli("validate --config " + cfgpath + " --seed 1 --out " +
                         dir.string());
  CHECK(r.exit_code == 3);
  const auto rep = load_json(dir / "validate_report.json");
  CHECK(rep["pass"] == false);
}

TEST_CASE("validate: insufficient trials is a precondition error") {
  const auto dir = fresh_dir("qpsense_validate_trials");
  std::stringstream body;
  body << std::ifstream(kScenario).rdbuf();
  const auto cfgpath = write_config(dir, "few.ini", body.str() + kSpectrumOverride + R"(
[validate]
trials = 1
)");
  const auto r = run_cli("validate --config " + cfgpath + " --seed 1 --out " +
                         dir.string());
  CHECK(r.exit_code == 2);
}

TEST_CASE("validate: reduced-size run passes with a fixed seed") {
  const auto dir = fresh_dir("qpsense_validate_ok");
  std::stringstream body;
  body << std::ifstream(kScenario).rdbuf();
  const auto cfgpath = write_config(dir, "ok.ini", body.str() + kSpectrumOverride + R"(
[analyzer]
rbw_hz = 100
vbw_hz = 10
trace_averages = 10

[ramp]
drive_stop_v = 10
points = 9
noise_floor_samples = 384

[validate]
trials = 20
grid_samples = 200000
segment_length = 512
spectrum_segments = 128
dump_dir = DUMPDIR
)");
  {
    std::ifstream in(cfgpath);
    std::string body2((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    in.close();
    const auto pos = body2.find("DUMPDIR");
    body2.replace(pos, 7, (dir / "dump").string());
    std::ofstream out(cfgpath);
    out << body2;
  }
  const auto r = run_cli("validate --config " + cfgpath + " --seed 11 --out " +
                         dir.string());
  CHECK(r.stdout_text.find("FAIL") == std::string::npos);
  CHECK(r.exit_code == 0);
  const auto rep = load_json(dir / "validate_report.json");
  CHECK(rep["pass"] == true);
  CHECK(slurp(dir / "dump" / "oracle_series.csv")
            .rfind("time_s,probe_counts,conjugate_counts\n", 0) == 0);
  CHECK(slurp(dir / "dump" / "oracle_spectrum.csv")
            .rfind("frequency_hz,power_counts2_per_hz\n", 0) == 0);
}
