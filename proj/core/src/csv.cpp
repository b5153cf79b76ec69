#include "dualpor/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dualpor/comparison.hpp"
#include "dualpor/errors.hpp"
#include "dualpor/units.hpp"

namespace dualpor {

std::string format_number(double value) { return fmt::format("{}", value); }

void write_exchange_csv(std::ostream& os, const ExchangeSeries& series) {
  const auto per = series.per_delta();
  const auto tag = method_tag(series.method);
  const auto delta = format_number(series.delta);
  os << "time_days,q_w_per_delta,method,delta\n";
  for (std::size_t i = 0; i < per.size(); ++i) {
    os << format_number(units::to_days(per.times[i])) << ',' << format_number(per.values[i]) << ','
       << tag << ',' << delta << '\n';
  }
}

void write_exchange_csv(const std::filesystem::path& path, const ExchangeSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path.string());
  write_exchange_csv(out, series);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("exchange CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

ExchangeSeries read_exchange_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("exchange CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_days,q_w_per_delta,method,delta") {
    throw ParameterError("exchange CSV has an unexpected header: " + line);
  }
  ExchangeSeries s;
  s.divided_by_delta = true;
  std::size_t n = 1;
  bool first = true;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) {
      throw ParameterError("exchange CSV line " + std::to_string(n) + ": expected 4 columns");
    }
    s.times.push_back(units::days(to_double(cells[0], n)));
    s.values.push_back(to_double(cells[1], n));
    if (first) {
      s.method = parse_method(cells[2]);
      s.delta = to_double(cells[3], n);
      first = false;
    }
  }
  return s;
}

ExchangeSeries read_exchange_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open " + path.string());
  return read_exchange_csv(in);
}

void write_report_csv(std::ostream& os, const ComparisonReport& report) {
  os << "kind,method_a,method_b,delta_a,delta_b,relative_l2,reference_l2,sup,ratio\n";
  for (const auto& p : report.pairs) {
    os << "pair," << method_tag(p.a) << ',' << method_tag(p.b) << ',' << format_number(p.delta)
       << ',' << format_number(p.delta) << ',' << format_number(p.relative_l2) << ','
       << format_number(p.reference_l2) << ',' << format_number(p.sup) << ",\n";
  }
  for (const auto& r : report.sweep) {
    const auto tag = method_tag(r.method);
    os << "delta-sweep," << tag << ',' << tag << ',' << format_number(r.delta_coarse) << ','
       << format_number(r.delta_fine) << ',' << format_number(r.relative_l2) << ','
       << format_number(r.relative_l2) << ",," << format_number(r.ratio) << '\n';
  }
}

std::string exchange_file_name(ExchangeMethod method, double delta) {
  return method_tag(method) + "_delta_" + format_number(delta) + ".csv";
}

}  // namespace dualpor
