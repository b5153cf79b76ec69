#include "dualpor/comparison.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include "dualpor/config.hpp"
#include "dualpor/csv.hpp"
#include "dualpor/effective.hpp"
#include "dualpor/errors.hpp"
#include "dualpor/linearized.hpp"
#include "dualpor/units.hpp"

namespace dualpor {

namespace {

double interpolate(const ExchangeSeries& s, double t) {
  const auto& x = s.times;
  if (x.size() == 1) return s.values[0];
  auto it = std::upper_bound(x.begin(), x.end(), t);
  if (it == x.begin()) return s.values.front();
  if (it == x.end()) return s.values.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - w) * s.values[i - 1] + w * s.values[i];
}

void check_series(const ExchangeSeries& s, const char* name) {
  if (s.times.size() != s.values.size()) {
    throw ParameterError(std::string("series ") + name + " has mismatched times and values");
  }
  if (s.empty()) throw ParameterError(std::string("series ") + name + " is empty");
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    if (!(s.times[i] > s.times[i - 1])) {
      throw ParameterError(std::string("series ") + name + " times must increase");
    }
  }
}

struct Norms {
  double diff2 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
  double sup = 0.0;
  double b_sup = 0.0;
};

Norms norms(const ExchangeSeries& a, const ExchangeSeries& b,
            std::optional<std::pair<double, double>> window) {
  check_series(a, "a");
  check_series(b, "b");
  double lo = std::max(a.times.front(), b.times.front());
  double hi = std::min(a.times.back(), b.times.back());
  if (window) {
    lo = std::max(lo, window->first);
    hi = std::min(hi, window->second);
  }
  if (lo > hi) throw ParameterError("series supports do not overlap");
  std::vector<double> nodes{lo, hi};
  for (const auto* s : {&a, &b}) {
    for (double t : s->times) {
      if (t > lo && t < hi) nodes.push_back(t);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Norms n;
  std::vector<double> va(nodes.size()), vb(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    va[i] = interpolate(a, nodes[i]);
    vb[i] = interpolate(b, nodes[i]);
    n.sup = std::max(n.sup, std::abs(va[i] - vb[i]));
    n.b_sup = std::max(n.b_sup, std::abs(vb[i]));
  }
  if (nodes.size() == 1) {
    n.diff2 = (va[0] - vb[0]) * (va[0] - vb[0]);
    n.a2 = va[0] * va[0];
    n.b2 = vb[0] * vb[0];
    return n;
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = 0.5 * (nodes[i + 1] - nodes[i]);
    const double d0 = va[i] - vb[i], d1 = va[i + 1] - vb[i + 1];
    n.diff2 += h * (d0 * d0 + d1 * d1);
    n.a2 += h * (va[i] * va[i] + va[i + 1] * va[i + 1]);
    n.b2 += h * (vb[i] * vb[i] + vb[i + 1] * vb[i + 1]);
  }
  return n;
}

double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

SeriesDistance compare_series(const ExchangeSeries& a, const ExchangeSeries& b,
                              std::optional<std::pair<double, double>> window) {
  const auto n = norms(a, b, window);
  SeriesDistance d;
  d.relative_l2 = ratio(std::sqrt(n.diff2), std::sqrt(n.b2));
  d.sup = n.sup;
  d.relative_sup = ratio(n.sup, n.b_sup);
  return d;
}

double symmetric_distance(const ExchangeSeries& a, const ExchangeSeries& b,
                          std::optional<std::pair<double, double>> window) {
  const auto n = norms(a, b, window);
  return ratio(std::sqrt(n.diff2), 0.5 * (std::sqrt(n.a2) + std::sqrt(n.b2)));
}

const MethodRun* ComparisonReport::find(ExchangeMethod method, double delta) const {
  for (const auto& r : runs) {
    if (r.method == method && r.delta == delta) return &r;
  }
  return nullptr;
}

ExchangeSeries run_method(const ScenarioConfig& config, ExchangeMethod method, double delta) {
  const auto problem = config.problem(delta);
  switch (method) {
    case ExchangeMethod::Nonlinear:
      return run_trajectory(problem).volume.per_delta();
    case ExchangeMethod::ConstantLinear:
      return clin_run(problem).volume.per_delta();
    case ExchangeMethod::VariableLinear:
      return vlin_run(problem).volume.per_delta();
    case ExchangeMethod::EffectiveI: {
      const auto& model = *problem.model;
      const auto params =
          EffectiveSourceParams::model1(config.dimension, problem.matrix(), model.alpha_bar());
      return effective_exchange(problem.trajectory, problem.time_grid, model, params, delta);
    }
    case ExchangeMethod::EffectiveII: {
      const auto params = EffectiveSourceParams::model2(config.dimension, problem.matrix(),
                                                        config.model2_constant_without_dimension);
      return effective_exchange(problem.trajectory, problem.time_grid, *problem.model, params,
                                delta);
    }
  }
  throw ParameterError("unknown exchange method");
}

ComparisonReport run_comparison(const ScenarioConfig& config,
                                const std::optional<std::filesystem::path>& output_dir) {
  config.validate();
  ComparisonReport report;
  report.scenario = config.id;
  for (double delta : config.deltas) {
    for (auto m : config.methods) report.runs.push_back({m, delta, {}, {}});
  }

  std::vector<std::exception_ptr> errors(report.runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < report.runs.size(); i = next++) {
      auto& r = report.runs[i];
      try {
        r.series = run_method(config, r.method, r.delta);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), report.runs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    const auto& r = report.runs[i];
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw RunError(config.id + " [" + method_tag(r.method) + ", delta " +
                     format_number(r.delta) + "]: " + e.what());
    }
  }

  std::optional<std::pair<double, double>> window;
  if (config.compare_window_days) {
    window = std::make_pair(units::days(config.compare_window_days->first),
                            units::days(config.compare_window_days->second));
  }
  for (double delta : config.deltas) {
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
      for (std::size_t j = i + 1; j < config.methods.size(); ++j) {
        const auto* b = report.find(config.methods[i], delta);
        const auto* a = report.find(config.methods[j], delta);
        PairDistance p;
        p.a = a->method;
        p.b = b->method;
        p.delta = delta;
        p.relative_l2 = symmetric_distance(a->series, b->series, window);
        const auto d = compare_series(a->series, b->series, window);
        p.reference_l2 = d.relative_l2;
        p.sup = d.sup;
        report.pairs.push_back(p);
      }
    }
  }
  auto deltas = config.deltas;
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  for (auto m : config.methods) {
    double previous = 0.0;
    for (std::size_t k = 0; k + 1 < deltas.size(); ++k) {
      DeltaSweepRow row;
      row.method = m;
      row.delta_coarse = deltas[k];
      row.delta_fine = deltas[k + 1];
      row.relative_l2 = compare_series(report.find(m, deltas[k])->series,
                                       report.find(m, deltas[k + 1])->series, window)
                            .relative_l2;
      row.ratio = k == 0 ? 0.0 : ratio(row.relative_l2, previous);
      previous = row.relative_l2;
      report.sweep.push_back(row);
    }
  }

  if (output_dir) {
    std::filesystem::create_directories(*output_dir);
    for (auto& r : report.runs) {
      const auto path = *output_dir / exchange_file_name(r.method, r.delta);
      write_exchange_csv(path, r.series);
      r.file = path.string();
    }
    std::ofstream rep(*output_dir / "report.csv", std::ios::binary);
    write_report_csv(rep, report);
    std::ofstream man(*output_dir / "manifest.yaml", std::ios::binary);
    write_manifest(man, config);
  }
  return report;
}

}  // namespace dualpor
