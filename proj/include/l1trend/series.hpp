#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace l1trend {

enum class TimeKind { date, index };

/// Time-indexed real series. Dates are stored as days since 1970-01-01.
struct Series {
  TimeKind kind = TimeKind::index;
  std::string time_header = "date";
  std::string value_header = "value";
  std::vector<std::int64_t> times;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  /// Integer index 0..n-1.
  static Series indexed(std::vector<double> values, std::string value_header = "value");
};

/// Parses YYYY-MM-DD into days since 1970-01-01; false on malformed or
/// non-existent dates.
bool parse_iso_date(const std::string& text, std::int64_t& days);
std::string format_iso_date(std::int64_t days);
std::string format_time(const Series& s, std::size_t i);

/// Shortest round-trip-safe text at 12 significant digits.
std::string format_value(double v);

/// Reads a `time,value[,...]` CSV. With more than one value column, `column`
/// names the one to keep. Errors (DataError) name the line.
Series parse_csv(std::istream& in, const std::string& source = "<input>", const std::string& column = "");
Series ingest_csv(const std::filesystem::path& path, const std::string& column = "");

/// Writes `header,...` rows; `columns` are parallel to s.times.
void write_columns(std::ostream& out, const Series& s, std::span<const std::string> headers,
                   std::span<const std::vector<double>> columns);
void write_series(std::ostream& out, const Series& s);

}  // namespace l1trend
