#pragma once

namespace dualpor::units {

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kPascalPerBar = 1.0e5;

constexpr double days(double d) { return d * kSecondsPerDay; }
constexpr double to_days(double seconds) { return seconds / kSecondsPerDay; }
constexpr double bar(double b) { return b * kPascalPerBar; }

}  // namespace dualpor::units
