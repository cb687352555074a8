#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "l1trend/banded.hpp"

namespace l1trend {

/// Finite-difference operator acting on signals of length n.
///
/// Each row is a stencil anchored at a column: order-1 rows are (-1, 1),
/// order-2 rows are (1, -2, 1). A pure operator has rows of a single order;
/// the mixed operator interleaves the first- and second-difference rows in
/// time order so that D D^T keeps a bandwidth of 4. The matrix is never
/// materialized.
class DiffOperator {
 public:
  struct Row {
    std::uint32_t first_col;
    std::uint8_t order;
  };

  /// 1 or 2 for pure operators, 0 for the mixed operator.
  int order() const { return order_; }
  std::size_t cols() const { return n_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<Row>& row_layout() const { return rows_; }

  static DiffOperator pure(int order, std::size_t n);
  static DiffOperator mixed(std::size_t n);

 private:
  DiffOperator(int order, std::size_t n, std::vector<Row> rows);

  int order_ = 0;
  std::size_t n_ = 0;
  std::vector<Row> rows_;
};

/// Throws LengthError when n <= order and InvalidArgument for order not in {1, 2}.
DiffOperator make_diff(int order, std::size_t n);

/// Interleaved (D1; D2) operator used by the mixed trend/level filter:
/// rows alternate D1_0, D2_0, D1_1, D2_1, ..., D1_{n-2}. Requires n >= 3.
DiffOperator make_mixed_diff(std::size_t n);

std::vector<double> apply_diff(const DiffOperator& op, std::span<const double> v);
std::vector<double> apply_diff_transpose(const DiffOperator& op, std::span<const double> u);

/// D D^T in banded storage (bandwidth 1, 2 or 4 for order 1, order 2, mixed).
BandedSymMatrix gram_banded(const DiffOperator& op);

/// D^T D in banded storage, n x n.
BandedSymMatrix normal_banded(const DiffOperator& op);

}  // namespace l1trend
