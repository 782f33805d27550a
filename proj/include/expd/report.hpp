#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace expd {

// One report row. Columns, in order:
//   instance,n,count,bound_cert,kst_bound,delta_bound,slope,intercept,
//   residual_max,status,seed
// Absent values are empty in CSV and null in JSON.
struct ReportRow {
  std::string instance;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> count;
  std::optional<std::uint64_t> bound_cert;
  std::optional<double> kst_bound;
  std::optional<double> delta_bound;
  std::optional<double> slope;
  std::optional<double> intercept;
  std::optional<double> residual_max;
  std::string status;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& report_columns();

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(const std::string& name);

// Shortest round-trip decimal form; identical across runs.
std::string format_double(double v);

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format,
                  const nlohmann::json& header = nlohmann::json::object());

// Writes to `path`; throws InputError when the path is not writable.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path,
                 const nlohmann::json& header = nlohmann::json::object());

}  // namespace expd
