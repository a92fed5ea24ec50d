#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qpsense/config.hpp"
#include "qpsense/report.hpp"
#include "qpsense/scenario_io.hpp"
#include "test_scenarios.hpp"

using namespace qpsense;

static const char* kSample = R"(
# analyzer block
[analyzer]
rbw_hz = 100
vbw_hz = 10
trace_averages = 50

[source]
type = twin
squeezing_db = 9.0

[flags]
verbose = true
)";

TEST_CASE("config parsing: sections, comments, types") {
  const auto cfg = Config::from_string(kSample, "sample.ini");
  CHECK(cfg.get_double("analyzer.rbw_hz") == 100.0);
  CHECK(cfg.get_int("analyzer.trace_averages") == 50);
  CHECK(cfg.get_string("source.type") == "twin");
  CHECK(cfg.get_bool("flags.verbose", false));
  CHECK(cfg.get_double("analyzer.span_hz", 0.0) == 0.0);
  CHECK_FALSE(cfg.has("analyzer.span_hz"));
}

TEST_CASE("config errors carry the key path") {
  const auto cfg = Config::from_string(kSample, "sample.ini");
  try {
    cfg.get_double("detection.bandwidth_hz");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("detection.bandwidth_hz") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(Config::from_string("[broken\nkey = 1"),
                  ConfigError);
  CHECK_THROWS_AS(Config::from_string("keyvalue\n"), ConfigError);
  const auto bad = Config::from_string("[a]\nx = notanumber\n");
  CHECK_THROWS_AS(bad.get_double("a.x"), ConfigError);
}

TEST_CASE("config overrides take precedence") {
  auto cfg = Config::from_string(kSample);
  cfg.set("analyzer.rbw_hz", "10");
  CHECK(cfg.get_double("analyzer.rbw_hz") == 10.0);
  cfg.set("output.dir", "/tmp/somewhere");
  CHECK(cfg.get_string("output.dir") == "/tmp/somewhere");
}

TEST_CASE("manifest embeds the resolved configuration") {
  const auto cfg = Config::from_string(kSample, "sample.ini");
  auto manifest = RunManifest::for_command("budget", cfg);
  manifest.seeded = true;
  manifest.seed = 42;
  const auto j = manifest.to_json();
  CHECK(j["command"] == "budget");
  CHECK(j["seed"] == 42);
  CHECK(j["timestamp_unix"] == 0);
  CHECK(j["config"]["analyzer.rbw_hz"] == "100");
  CHECK(std::string(j["version"]).find('.') != std::string::npos);
}

TEST_CASE("atomic write leaves no temp file behind") {
  const auto dir = std::filesystem::temp_directory_path() / "qpsense_test_io";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "report.json").string();
  write_file_atomic(path, "{\"ok\": true}\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "{\"ok\": true}\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario_from_config mirrors the section layout") {
  const std::string text = R"(
[source]
type = twin
squeezing_db = 9.0

[losses]
probe_transmission = 0.4818
conjugate_transmission = 0.95

[sensor]
spectrum_csv = eot_spectrum_approx.csv
wavelength_nm = 795
slope_window_nm = 10

[probe]
post_sensor_power_uw = 70
wavelength_nm = 795

[analyzer]
rbw_hz = 100
vbw_hz = 10
trace_averages = 50

[detection]
bandwidth_hz = 100

[calibration]
modulation_v_per_drive_v = 0.002

[ramp]
drive_stop_v = 10
points = 21
)";
  const auto cfg = Config::from_string(text, "scenario.ini");
  const auto s = scenario_from_config(cfg, QPSENSE_DATA_DIR);
  CHECK(std::holds_alternative<TwinBeamSource>(s.source));
  CHECK(s.probe_loss.transmission == doctest::Approx(0.4818));
  CHECK(s.sensor.t_at == doctest::Approx(0.66).scale(0.0).epsilon(0.03));
  CHECK(s.drive_schedule.size() == 21);
  CHECK(s.drive_schedule.back().drive_v == 10.0);
  CHECK(s.detection_bandwidth_hz == 100.0);

  // Missing required key surfaces its full path.
  try {
    Config c2 = Config::from_string("[analyzer]\nrbw_hz = 1\n", "x.ini");
    analyzer_from_config(c2);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("analyzer.vbw_hz") != std::string::npos);
  }
}

TEST_CASE("synth fallback when no spectrum file is configured") {
  const std::string text = R"(
[source]
type = coherent

[sensor]
wavelength_nm = 795
synth_center_nm = 800
synth_depth = 0.3
synth_width_nm = 15
synth_baseline = 0.85

[probe]
post_sensor_power_uw = 70

[analyzer]
rbw_hz = 100
vbw_hz = 10
trace_averages = 50

[calibration]
modulation_v_per_drive_v = 0.002

[ramp]
drive_stop_v = 5
)";
  const auto cfg = Config::from_string(text);
  const auto s = scenario_from_config(cfg, "");
  CHECK(std::holds_alternative<CoherentPairSpec>(s.source));
  CHECK(s.sensor.t_at > 0.0);
  CHECK(s.sensor.dT_dn > 0.0);
}
