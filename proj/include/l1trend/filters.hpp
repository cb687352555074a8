#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "l1trend/ipm.hpp"

namespace l1trend {

enum class FilterKind { hp, l1, l1tc, l1_multivariate };

struct SolverDiagnostics {
  int iterations = 0;
  double duality_gap = 0.0;
  double kkt_residual = 0.0;
  bool converged = true;
};

struct FilterResult {
  FilterKind kind = FilterKind::l1;
  /// 1 or 2; 0 for the mixed filter.
  int order = 2;
  std::vector<double> trend;
  /// Optimal dual nu*; empty for the HP filter.
  std::vector<double> dual;
  double lambda = 0.0;
  /// Second-difference weight of the mixed filter (lambda holds the first).
  double lambda2 = 0.0;
  SolverDiagnostics diagnostics;
  /// max |y_t| of the filtered signal; scales the default break tolerance.
  double input_scale = 0.0;
  /// The signal actually filtered: y, or the cross-sectional mean for the
  /// multivariate filter.
  std::vector<double> signal;
  /// Per-series centering and scaling applied before averaging (multivariate
  /// filter with standardization only).
  std::vector<double> centers;
  std::vector<double> scales;
};

/// x* = (I + 2 lambda D^T D)^{-1} y.
FilterResult hp_filter(std::span<const double> y, double lambda, int order = 2);

/// argmin 1/2 |y - x|^2 + lambda |D x|_1, via the dual box QP; x* = y - D^T nu*.
FilterResult l1_filter(std::span<const double> y, double lambda, int order = 2,
                       const IpmOptions& options = {});

/// argmin 1/2 |y - x|^2 + lambda1 |D1 x|_1 + lambda2 |D2 x|_1.
FilterResult l1tc_filter(std::span<const double> y, double lambda1, double lambda2,
                         const IpmOptions& options = {});

/// Common second-order trend of m equal-length series:
/// argmin 1/2 sum_i |y_i - x|^2 + lambda |D x|_1, which reduces to the
/// univariate filter of the cross-sectional mean.
FilterResult l1t_multivariate(const std::vector<std::vector<double>>& ys, double lambda,
                              bool standardize, const IpmOptions& options = {});

/// Sample indices where |(D x*)_t| exceeds `tol` (default 1e-6 * max|y|).
/// A row is reported at its centre sample: for order 2 the kink, for order 1
/// the first sample of the new level.
std::vector<std::size_t> detect_breaks(const FilterResult& result, int order,
                                       std::optional<double> tol = std::nullopt);

double l1_objective(std::span<const double> y, std::span<const double> x, double lambda, int order);
double l1tc_objective(std::span<const double> y, std::span<const double> x, double lambda1,
                      double lambda2);
double hp_objective(std::span<const double> y, std::span<const double> x, double lambda, int order);

/// Least-squares line alpha + beta t fitted to y, evaluated at t = 0..n-1.
std::vector<double> ols_line(std::span<const double> y);

}  // namespace l1trend
