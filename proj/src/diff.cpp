#include "l1trend/diff.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "l1trend/error.hpp"

namespace l1trend {
namespace {

constexpr std::array<double, 2> kFirst{-1.0, 1.0};
constexpr std::array<double, 3> kSecond{1.0, -2.0, 1.0};

std::span<const double> stencil(std::uint8_t order) {
  if (order == 1) return kFirst;
  return kSecond;
}

std::size_t last_col(const DiffOperator::Row& r) { return r.first_col + r.order; }

// Rows are sorted by first column, so the band ends at the last row whose
// stencil still overlaps row i.
std::size_t gram_bandwidth(const std::vector<DiffOperator::Row>& rows) {
  std::size_t bw = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size() && rows[j].first_col <= last_col(rows[i]); ++j) {
      bw = std::max(bw, j - i);
    }
  }
  return bw;
}

double row_dot(const DiffOperator::Row& a, const DiffOperator::Row& b) {
  const auto sa = stencil(a.order);
  const auto sb = stencil(b.order);
  const std::size_t lo = std::max(a.first_col, b.first_col);
  const std::size_t hi = std::min(last_col(a), last_col(b));
  double s = 0.0;
  for (std::size_t c = lo; c <= hi && lo <= hi; ++c) s += sa[c - a.first_col] * sb[c - b.first_col];
  return s;
}

}  // namespace

DiffOperator::DiffOperator(int order, std::size_t n, std::vector<Row> rows)
    : order_(order), n_(n), rows_(std::move(rows)) {}

DiffOperator DiffOperator::pure(int order, std::size_t n) {
  if (order != 1 && order != 2) {
    throw InvalidArgument("difference order must be 1 or 2, got " + std::to_string(order));
  }
  if (n <= static_cast<std::size_t>(order)) {
    throw LengthError("signal length " + std::to_string(n) + " too small for difference order " +
                      std::to_string(order));
  }
  std::vector<Row> rows(n - order);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = Row{static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(order)};
  }
  return DiffOperator(order, n, std::move(rows));
}

DiffOperator DiffOperator::mixed(std::size_t n) {
  if (n < 3) throw LengthError("mixed difference operator needs n >= 3, got " + std::to_string(n));
  std::vector<Row> rows;
  rows.reserve(2 * n - 3);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    rows.push_back(Row{static_cast<std::uint32_t>(i), 1});
    if (i + 2 < n) rows.push_back(Row{static_cast<std::uint32_t>(i), 2});
  }
  return DiffOperator(0, n, std::move(rows));
}

DiffOperator make_diff(int order, std::size_t n) { return DiffOperator::pure(order, n); }

DiffOperator make_mixed_diff(std::size_t n) { return DiffOperator::mixed(n); }

std::vector<double> apply_diff(const DiffOperator& op, std::span<const double> v) {
  if (v.size() != op.cols()) {
    throw DimensionError("apply_diff: expected length " + std::to_string(op.cols()) + ", got " +
                         std::to_string(v.size()));
  }
  const auto& rows = op.row_layout();
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto s = stencil(rows[i].order);
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) acc += s[k] * v[rows[i].first_col + k];
    out[i] = acc;
  }
  return out;
}

std::vector<double> apply_diff_transpose(const DiffOperator& op, std::span<const double> u) {
  if (u.size() != op.rows()) {
    throw DimensionError("apply_diff_transpose: expected length " + std::to_string(op.rows()) +
                         ", got " + std::to_string(u.size()));
  }
  const auto& rows = op.row_layout();
  std::vector<double> out(op.cols(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto s = stencil(rows[i].order);
    for (std::size_t k = 0; k < s.size(); ++k) out[rows[i].first_col + k] += s[k] * u[i];
  }
  return out;
}

BandedSymMatrix gram_banded(const DiffOperator& op) {
  const auto& rows = op.row_layout();
  const std::size_t bw = gram_bandwidth(rows);
  BandedSymMatrix q(rows.size(), bw);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = j; i < rows.size() && i - j <= bw; ++i) q.lower(i, j) = row_dot(rows[i], rows[j]);
  }
  return q;
}

BandedSymMatrix normal_banded(const DiffOperator& op) {
  std::size_t bw = 0;
  for (const auto& r : op.row_layout()) bw = std::max<std::size_t>(bw, r.order);
  BandedSymMatrix a(op.cols(), bw);
  for (const auto& r : op.row_layout()) {
    const auto s = stencil(r.order);
    for (std::size_t p = 0; p < s.size(); ++p) {
      for (std::size_t q = 0; q <= p; ++q) a.lower(r.first_col + p, r.first_col + q) += s[p] * s[q];
    }
  }
  return a;
}

}  // namespace l1trend
