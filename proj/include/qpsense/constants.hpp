#pragma once

namespace qpsense {

// CODATA 2018 exact SI values.
inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kSpeedOfLightMps = 299792458.0;

// Reference power for the dBm-like scale used by the signal chain. Only
// differences of levels are meaningful, so the anchor is arbitrary; it is
// named here so every conversion shares the same one.
inline constexpr double kDbmReferencePower = 1.0;

inline constexpr double kNmToM = 1e-9;
inline constexpr double kMmToM = 1e-3;

}  // namespace qpsense
