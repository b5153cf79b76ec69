#pragma once

// CSV output. Exchange files have the columns
//
//   time_days,q_w_per_delta,method,delta
//
// with times in days and the exchange divided by delta [1/s]. Numbers are
// written in shortest round-trip form so that files are byte-identical
// across runs.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dualpor/imbibition.hpp"

namespace dualpor {

struct ComparisonReport;

/// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

void write_exchange_csv(std::ostream& os, const ExchangeSeries& series);
void write_exchange_csv(const std::filesystem::path& path, const ExchangeSeries& series);
/// Reads a file written by write_exchange_csv; values come back divided by delta.
ExchangeSeries read_exchange_csv(std::istream& is);
ExchangeSeries read_exchange_csv(const std::filesystem::path& path);

/// Report file: one row per pairwise distance and per delta-sweep entry.
void write_report_csv(std::ostream& os, const ComparisonReport& report);

/// File name of one (method, delta) cell, e.g. "nlin_delta_0.01.csv".
std::string exchange_file_name(ExchangeMethod method, double delta);

}  // namespace dualpor
