#pragma once

#include <string>

#include "qpsense/config.hpp"
#include "qpsense/experiment.hpp"

namespace qpsense {

/// Builders mapping config sections onto the experiment types. Keys carry
/// their units as suffixes; relative data paths resolve against base_dir.
AnalyzerSettings analyzer_from_config(const Config& cfg);
ChamberCalibration calibration_from_config(const Config& cfg);
SensorResponse sensor_from_config(const Config& cfg,
                                  const std::string& base_dir);
RampScenario scenario_from_config(const Config& cfg,
                                  const std::string& base_dir);

}  // namespace qpsense
