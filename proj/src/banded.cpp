#include "l1trend/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l1trend/error.hpp"

namespace l1trend {

BandedSymMatrix::BandedSymMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), bw_(n == 0 ? 0 : std::min(bandwidth, n - 1)), bands_((bw_ + 1) * n, 0.0) {}

double BandedSymMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) return 0.0;
  return lower(i, j);
}

void BandedSymMatrix::add_to_diagonal(std::span<const double> d) {
  if (d.size() != n_) throw DimensionError("add_to_diagonal: size mismatch");
  for (std::size_t j = 0; j < n_; ++j) bands_[j] += d[j];
}

void BandedSymMatrix::add_to_diagonal(double c) {
  for (std::size_t j = 0; j < n_; ++j) bands_[j] += c;
}

void BandedSymMatrix::scale(double c) {
  for (double& v : bands_) v *= c;
}

std::vector<double> BandedSymMatrix::multiply(std::span<const double> v) const {
  if (v.size() != n_) throw DimensionError("banded multiply: size mismatch");
  std::vector<double> out(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) out[j] += lower(j, j) * v[j];
  for (std::size_t k = 1; k <= bw_; ++k) {
    for (std::size_t j = 0; j + k < n_; ++j) {
      const double a = lower(j + k, j);
      out[j + k] += a * v[j];
      out[j] += a * v[j + k];
    }
  }
  return out;
}

BandCholesky::BandCholesky(const BandedSymMatrix& a) : factor_(a) {
  const std::size_t n = a.size();
  const std::size_t bw = a.bandwidth();
  BandedSymMatrix& l = factor_;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k0 = j > bw ? j - bw : 0;
    double d = l.lower(j, j);
    for (std::size_t k = k0; k < j; ++k) d -= l.lower(j, k) * l.lower(j, k);
    if (!(d > 0.0)) {
      throw NotPositiveDefinite("band Cholesky: non-positive pivot at row " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l.lower(j, j) = ljj;
    const std::size_t i_end = std::min(n, j + bw + 1);
    for (std::size_t i = j + 1; i < i_end; ++i) {
      const std::size_t ki = i > bw ? i - bw : 0;
      double s = l.lower(i, j);
      for (std::size_t k = std::max(ki, k0); k < j; ++k) s -= l.lower(i, k) * l.lower(j, k);
      l.lower(i, j) = s / ljj;
    }
  }
}

void BandCholesky::solve_in_place(std::span<double> b) const {
  const std::size_t n = factor_.size();
  const std::size_t bw = factor_.bandwidth();
  if (b.size() != n) throw DimensionError("band solve: size mismatch");
  // L z = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = i > bw ? i - bw : 0; k < i; ++k) s -= factor_.lower(i, k) * b[k];
    b[i] = s / factor_.lower(i, i);
  }
  // L^T x = z
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    const std::size_t k_end = std::min(n, i + bw + 1);
    for (std::size_t k = i + 1; k < k_end; ++k) s -= factor_.lower(k, i) * b[k];
    b[i] = s / factor_.lower(i, i);
  }
}

std::vector<double> BandCholesky::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

std::vector<double> band_solve(const BandedSymMatrix& a, std::span<const double> b) {
  if (b.size() != a.size()) throw DimensionError("band solve: size mismatch");
  return BandCholesky(a).solve(b);
}

}  // namespace l1trend
