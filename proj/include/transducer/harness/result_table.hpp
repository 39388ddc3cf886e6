#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifndef TRANSDUCER_VERSION
#define TRANSDUCER_VERSION "unversioned"
#endif

namespace transducer::harness {

inline constexpr int result_schema_version = 1;

struct Column {
  std::string name;
  std::string unit;  // "-" for dimensionless
};

/// Rows of numbers under a unit-annotated column schema, plus a status per
/// row ("ok" or the failure that made the row's values NaN). Written as CSV
/// behind a '#'-prefixed provenance header.
class ResultTable {
 public:
  ResultTable(std::string experiment, std::vector<Column> columns)
      : experiment_(std::move(experiment)), columns_(std::move(columns)) {
    for (const auto& c : columns_)
      if (c.unit.empty()) throw std::logic_error("column '" + c.name + "' has no unit");
  }

  void add_row(std::vector<double> values, std::string status = "ok") {
    if (values.size() != columns_.size()) throw std::logic_error("row width does not match schema");
    rows_.push_back(std::move(values));
    status_.push_back(std::move(status));
  }

  /// A row of NaNs except for the leading sweep value.
  void add_failed_row(double sweep_value, std::string status) {
    std::vector<double> v(columns_.size(), std::numeric_limits<double>::quiet_NaN());
    v.front() = sweep_value;
    add_row(std::move(v), std::move(status));
  }

  void set_provenance(std::string key, std::string value) {
    for (auto& kv : provenance_)
      if (kv.first == key) {
        kv.second = std::move(value);
        return;
      }
    provenance_.emplace_back(std::move(key), std::move(value));
  }

  const std::string& experiment() const { return experiment_; }
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<double>& row(std::size_t i) const { return rows_.at(i); }
  const std::string& status(std::size_t i) const { return status_.at(i); }

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i].name == name) return i;
    throw std::out_of_range("no column '" + name + "'");
  }

  double value(std::size_t row, const std::string& column) const { return rows_.at(row).at(column_index(column)); }

  std::vector<double> column(const std::string& name) const {
    const auto c = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[c]);
    return out;
  }

  void write_csv(std::ostream& os) const {
    os << "# transducer-sim result table\n";
    os << "# schema_version: " << result_schema_version << '\n';
    os << "# library_version: " << TRANSDUCER_VERSION << '\n';
    os << "# experiment: " << experiment_ << '\n';
    for (const auto& [k, v] : provenance_) os << "# " << k << ": " << v << '\n';
    for (const auto& c : columns_) os << c.name << " [" << c.unit << "],";
    os << "status\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (double v : rows_[i]) os << format_number(v) << ',';
      os << status_[i] << '\n';
    }
  }

  std::string to_csv() const {
    std::ostringstream ss;
    write_csv(ss);
    return ss.str();
  }

  /// Shortest round-trip representation; "nan" for missing values.
  static std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

 private:
  std::string experiment_;
  std::vector<Column> columns_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> status_;
  std::vector<std::pair<std::string, std::string>> provenance_;
};

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace transducer::harness
