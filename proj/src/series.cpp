#include "l1trend/series.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "l1trend/error.hpp"

namespace l1trend {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_int(const std::string& text, std::int64_t& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_double(const std::string& text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Series Series::indexed(std::vector<double> values, std::string value_header) {
  Series s;
  s.kind = TimeKind::index;
  s.time_header = "t";
  s.value_header = std::move(value_header);
  s.times.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) s.times[i] = static_cast<std::int64_t>(i);
  s.values = std::move(values);
  return s;
}

bool parse_iso_date(const std::string& text, std::int64_t& days) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  std::int64_t y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d)) {
    return false;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return true;
}

std::string format_iso_date(std::int64_t days) {
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_time(const Series& s, std::size_t i) {
  return s.kind == TimeKind::date ? format_iso_date(s.times[i]) : std::to_string(s.times[i]);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Series parse_csv(std::istream& in, const std::string& source, const std::string& column) {
  Series s;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0, pick = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (width == 0) {
      if (fields.size() < 2) fail(source, lineno, "expected a time column and at least one value column");
      width = fields.size();
      s.time_header = fields[0];
      if (!column.empty()) {
        pick = 0;
        for (std::size_t k = 1; k < width; ++k) {
          if (fields[k] == column) pick = k;
        }
        if (pick == 0) fail(source, lineno, "no column named '" + column + "'");
      } else if (width > 2) {
        fail(source, lineno, std::to_string(width - 1) + " value columns; choose one with --column");
      }
      s.value_header = fields[pick];
      continue;
    }
    if (fields.size() != width) {
      fail(source, lineno, "expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
    }
    const std::string& a = fields[0];
    const std::string& b = fields[pick];
    if (a.empty()) fail(source, lineno, "missing time");
    if (b.empty()) fail(source, lineno, "missing value");

    std::int64_t t = 0;
    TimeKind kind;
    if (parse_iso_date(a, t)) {
      kind = TimeKind::date;
    } else if (parse_int(a, t)) {
      kind = TimeKind::index;
    } else {
      fail(source, lineno, "cannot parse time '" + a + "'");
    }
    if (s.values.empty()) {
      s.kind = kind;
    } else if (kind != s.kind) {
      fail(source, lineno, "mixes dates and integer indices");
    }
    double v = 0.0;
    if (!parse_double(b, v)) fail(source, lineno, "cannot parse value '" + b + "'");
    if (!s.times.empty() && t <= s.times.back()) {
      fail(source, lineno, t == s.times.back() ? "duplicate time '" + a + "'" : "time '" + a + "' is not increasing");
    }
    s.times.push_back(t);
    s.values.push_back(v);
  }
  if (width == 0) throw DataError(source + ": empty file");
  if (s.values.empty()) throw DataError(source + ": no data rows");
  return s;
}

Series ingest_csv(const std::filesystem::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, path.string(), column);
}

void write_columns(std::ostream& out, const Series& s, std::span<const std::string> headers,
                   std::span<const std::vector<double>> columns) {
  out << s.time_header;
  for (const auto& h : headers) out << ',' << h;
  out << '\n';
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << format_time(s, i);
    for (const auto& c : columns) out << ',' << format_value(c[i]);
    out << '\n';
  }
}

void write_series(std::ostream& out, const Series& s) {
  const std::string header[1] = {s.value_header};
  const std::vector<double> cols[1] = {s.values};
  write_columns(out, s, header, cols);
}

}  // namespace l1trend
