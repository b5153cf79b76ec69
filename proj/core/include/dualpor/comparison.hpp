#pragma once

// Distances between exchange series, and the method x delta comparison
// driver.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dualpor/imbibition.hpp"

namespace dualpor {

struct ScenarioConfig;

struct SeriesDistance {
  double relative_l2 = 0.0;   ///< ||a - b||_2 / ||b||_2
  double sup = 0.0;           ///< max |a - b|
  double relative_sup = 0.0;  ///< sup / max |b|
};

/// Distance of `a` from the reference `b` over their common support
/// (optionally restricted to `window` [s]). Both series are linearly
/// interpolated onto the union of their nodes inside the support and the
/// squares are integrated with trapezoidal weights. Throws ParameterError
/// if the supports do not overlap.
SeriesDistance compare_series(const ExchangeSeries& a, const ExchangeSeries& b,
                              std::optional<std::pair<double, double>> window = std::nullopt);

struct MethodRun {
  ExchangeMethod method = ExchangeMethod::Nonlinear;
  double delta = 0.0;
  ExchangeSeries series;  ///< divided by delta
  std::string file;       ///< CSV written for this cell, if any
};

struct PairDistance {
  ExchangeMethod a = ExchangeMethod::Nonlinear;
  ExchangeMethod b = ExchangeMethod::Nonlinear;
  double delta = 0.0;
  double relative_l2 = 0.0;  ///< symmetric: against the mean norm of both
  double reference_l2 = 0.0; ///< relative to b as reference
  double sup = 0.0;
};

struct DeltaSweepRow {
  ExchangeMethod method = ExchangeMethod::Nonlinear;
  double delta_coarse = 0.0;
  double delta_fine = 0.0;
  double relative_l2 = 0.0;  ///< coarse against fine
  double ratio = 0.0;        ///< relative_l2 over that of the previous row (0 for the first)
};

struct ComparisonReport {
  std::string scenario;
  std::vector<MethodRun> runs;
  std::vector<PairDistance> pairs;
  std::vector<DeltaSweepRow> sweep;

  const MethodRun* find(ExchangeMethod method, double delta) const;
};

/// Symmetric relative L2 distance: ||a - b|| / (0.5 (||a|| + ||b||)), zero if both vanish.
double symmetric_distance(const ExchangeSeries& a, const ExchangeSeries& b,
                          std::optional<std::pair<double, double>> window = std::nullopt);

/// Runs every (method, delta) cell of the scenario. If `output_dir` is set,
/// writes one CSV per cell, a report CSV and the manifest there.
ComparisonReport run_comparison(const ScenarioConfig& config,
                                const std::optional<std::filesystem::path>& output_dir = std::nullopt);

/// Exchange series of one method for one block problem, divided by delta.
ExchangeSeries run_method(const ScenarioConfig& config, ExchangeMethod method, double delta);

}  // namespace dualpor
