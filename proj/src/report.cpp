#include "expd/report.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "expd/errors.hpp"

namespace expd {

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"instance",  "n",         "count",        "bound_cert",
                                             "kst_bound", "delta_bound", "slope",      "intercept",
                                             "residual_max", "status", "seed"};
  return cols;
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw InputError("unknown report format '" + name + "' (csv or json)");
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

namespace {

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>)
    return format_double(*v);
  else
    return std::to_string(*v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
nlohmann::json jcell(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format,
                  const nlohmann::json& header) {
  if (format == ReportFormat::Csv) {
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
      out << csv_escape(r.instance) << ',' << cell(r.n) << ',' << cell(r.count) << ','
          << cell(r.bound_cert) << ',' << cell(r.kst_bound) << ',' << cell(r.delta_bound) << ','
          << cell(r.slope) << ',' << cell(r.intercept) << ',' << cell(r.residual_max) << ','
          << csv_escape(r.status) << ',' << cell(r.seed) << '\n';
    }
    return;
  }
  nlohmann::ordered_json doc;
  doc["header"] = header;
  doc["columns"] = report_columns();
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["instance"] = r.instance;
    j["n"] = jcell(r.n);
    j["count"] = jcell(r.count);
    j["bound_cert"] = jcell(r.bound_cert);
    j["kst_bound"] = jcell(r.kst_bound);
    j["delta_bound"] = jcell(r.delta_bound);
    j["slope"] = jcell(r.slope);
    j["intercept"] = jcell(r.intercept);
    j["residual_max"] = jcell(r.residual_max);
    j["status"] = r.status;
    j["seed"] = jcell(r.seed);
    doc["rows"].push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path,
                 const nlohmann::json& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write report to '" + path + "'");
  write_report(out, rows, format, header);
  if (!out) throw InputError("writing report to '" + path + "' failed");
}

}  // namespace expd
