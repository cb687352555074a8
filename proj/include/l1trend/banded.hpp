#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace l1trend {

/// Symmetric matrix stored by its lower diagonals.
///
/// Band k (0 = main diagonal) holds A(j + k, j) for j = 0 .. n - k - 1.
/// Entries further than `bandwidth()` from the diagonal are zero.
class BandedSymMatrix {
 public:
  BandedSymMatrix() = default;
  BandedSymMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }

  /// Symmetric read access; zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;

  /// Lower-triangle element A(i, j), i >= j, i - j <= bandwidth.
  double& lower(std::size_t i, std::size_t j) { return bands_[(i - j) * n_ + j]; }
  double lower(std::size_t i, std::size_t j) const { return bands_[(i - j) * n_ + j]; }

  void add_to_diagonal(std::span<const double> d);
  void add_to_diagonal(double c);
  void scale(double c);

  std::vector<double> multiply(std::span<const double> v) const;

 private:
  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> bands_;
};

/// Band Cholesky factor A = L L^T. Throws NotPositiveDefinite when a pivot
/// is not strictly positive. Cost O(n * bandwidth^2).
class BandCholesky {
 public:
  explicit BandCholesky(const BandedSymMatrix& a);

  std::vector<double> solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> b) const;

  std::size_t size() const { return factor_.size(); }

 private:
  BandedSymMatrix factor_;
};

std::vector<double> band_solve(const BandedSymMatrix& a, std::span<const double> b);

}  // namespace l1trend
