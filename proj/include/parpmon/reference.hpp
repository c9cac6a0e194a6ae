#pragma once

#include <array>
#include <string_view>

namespace parpmon {

/// Published mean-bias values (avg GW) of external model families that this
/// library does not implement; kept for side-by-side display only.
struct PublishedBiasRow {
  std::string_view subsystem;
  std::string_view model;
  double k1, k6, k12, k24, cumulative;
};

inline constexpr std::array<PublishedBiasRow, 10> kPublishedBias{{
    {"SE", "Official PARp-A", 1.28, 3.83, 5.39, 6.73, 110.07},
    {"SE", "SARIMA", 1.64, 3.22, 3.21, 3.63, 71.04},
    {"SE", "XGBoost", 0.80, 2.11, 3.28, 1.87, 51.83},
    {"SE", "Prophet", 2.31, 3.02, 3.43, 4.21, 75.85},
    {"SE", "Chronos", 1.04, 4.13, 4.25, 3.85, 89.50},
    {"NE", "Official PARp-A", 0.54, 1.66, 2.32, 3.17, 49.03},
    {"NE", "SARIMA", 0.37, 0.60, 0.67, 0.72, 14.55},
    {"NE", "XGBoost", -0.09, 0.20, 0.16, 0.30, 3.83},
    {"NE", "Prophet", -0.20, -0.11, -0.07, 0.08, -0.98},
    {"NE", "Chronos", -0.15, -0.05, -0.06, 0.01, -1.99},
}};

}  // namespace parpmon
