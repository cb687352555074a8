#include "l1trend/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "l1trend/diff.hpp"
#include "l1trend/error.hpp"

namespace l1trend {
namespace {

void check_lambda(double lambda, const char* name) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument(std::string(name) + " must be finite and >= 0");
  }
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

SolverDiagnostics diagnostics_of(const IpmSolution& s) {
  return {s.iterations, s.duality_gap, s.kkt_residual, s.converged};
}

// Shared path for every L1 filter: solve the dual, recover x* = y - D^T nu*.
FilterResult solve_dual(std::span<const double> y, const DiffOperator& op, std::vector<double> upper,
                        const IpmOptions& options) {
  BoxQP qp{gram_banded(op), apply_diff(op, y), std::move(upper)};
  IpmSolution sol = solve_box_qp(qp, options);
  FilterResult res;
  res.trend = apply_diff_transpose(op, sol.nu);
  for (std::size_t t = 0; t < y.size(); ++t) res.trend[t] = y[t] - res.trend[t];
  res.dual = std::move(sol.nu);
  res.diagnostics = diagnostics_of(sol);
  return res;
}

double abs_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double half_sq_dist(std::span<const double> y, std::span<const double> x) {
  if (y.size() != x.size()) throw DimensionError("objective: y and x lengths differ");
  double s = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) s += (y[t] - x[t]) * (y[t] - x[t]);
  return 0.5 * s;
}

}  // namespace

FilterResult hp_filter(std::span<const double> y, double lambda, int order) {
  check_lambda(lambda, "lambda");
  const DiffOperator op = make_diff(order, y.size());
  FilterResult res;
  res.kind = FilterKind::hp;
  res.order = order;
  res.lambda = lambda;
  res.input_scale = max_abs(y);
  res.signal.assign(y.begin(), y.end());
  if (lambda == 0.0) {
    res.trend.assign(y.begin(), y.end());
    return res;
  }
  BandedSymMatrix a = normal_banded(op);
  a.scale(2.0 * lambda);
  a.add_to_diagonal(1.0);
  res.trend = band_solve(a, y);
  return res;
}

FilterResult l1_filter(std::span<const double> y, double lambda, int order, const IpmOptions& options) {
  check_lambda(lambda, "lambda");
  const DiffOperator op = make_diff(order, y.size());
  FilterResult res;
  if (lambda == 0.0) {
    res.trend.assign(y.begin(), y.end());
    res.dual.assign(op.rows(), 0.0);
  } else {
    res = solve_dual(y, op, std::vector<double>(op.rows(), lambda), options);
  }
  res.kind = FilterKind::l1;
  res.order = order;
  res.lambda = lambda;
  res.input_scale = max_abs(y);
  res.signal.assign(y.begin(), y.end());
  return res;
}

FilterResult l1tc_filter(std::span<const double> y, double lambda1, double lambda2,
                         const IpmOptions& options) {
  check_lambda(lambda1, "lambda1");
  check_lambda(lambda2, "lambda2");
  if (y.size() < 3) throw LengthError("mixed filter needs at least 3 samples");

  FilterResult res;
  if (lambda1 == 0.0 && lambda2 == 0.0) {
    res.trend.assign(y.begin(), y.end());
    res.dual.assign(2 * y.size() - 3, 0.0);
  } else if (lambda1 == 0.0 || lambda2 == 0.0) {
    // A zero weight pins its block of duals at 0; the other block is a pure filter.
    const int active = lambda1 == 0.0 ? 2 : 1;
    const DiffOperator op = make_diff(active, y.size());
    res = solve_dual(y, op, std::vector<double>(op.rows(), active == 1 ? lambda1 : lambda2), options);
    std::vector<double> stacked(2 * y.size() - 3, 0.0);
    const auto& rows = make_mixed_diff(y.size()).row_layout();
    std::size_t k = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].order == active) stacked[i] = res.dual[k++];
    }
    res.dual = std::move(stacked);
  } else {
    const DiffOperator op = make_mixed_diff(y.size());
    std::vector<double> upper(op.rows());
    for (std::size_t i = 0; i < upper.size(); ++i) {
      upper[i] = op.row_layout()[i].order == 1 ? lambda1 : lambda2;
    }
    res = solve_dual(y, op, std::move(upper), options);
  }
  res.kind = FilterKind::l1tc;
  res.order = 0;
  res.lambda = lambda1;
  res.lambda2 = lambda2;
  res.input_scale = max_abs(y);
  res.signal.assign(y.begin(), y.end());
  return res;
}

FilterResult l1t_multivariate(const std::vector<std::vector<double>>& ys, double lambda,
                              bool standardize, const IpmOptions& options) {
  if (ys.empty()) throw InvalidArgument("multivariate filter needs at least one series");
  const std::size_t n = ys.front().size();
  for (const auto& s : ys) {
    if (s.size() != n) throw DimensionError("multivariate filter: series lengths differ");
  }
  const double m = static_cast<double>(ys.size());
  std::vector<double> centers(ys.size(), 0.0);
  std::vector<double> scales(ys.size(), 1.0);
  if (standardize) {
    if (n < 2) throw LengthError("standardization needs at least 2 samples");
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double mean = std::accumulate(ys[i].begin(), ys[i].end(), 0.0) / static_cast<double>(n);
      double ss = 0.0;
      for (double v : ys[i]) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (!(sd > 0.0)) throw DataError("multivariate filter: series " + std::to_string(i) + " is constant");
      centers[i] = mean;
      scales[i] = sd;
    }
  }
  std::vector<double> mean_signal(n, 0.0);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    for (std::size_t t = 0; t < n; ++t) mean_signal[t] += (ys[i][t] - centers[i]) / scales[i];
  }
  for (double& v : mean_signal) v /= m;

  FilterResult res = l1_filter(mean_signal, lambda, 2, options);
  res.kind = FilterKind::l1_multivariate;
  if (standardize) {
    res.centers = std::move(centers);
    res.scales = std::move(scales);
  }
  return res;
}

std::vector<std::size_t> detect_breaks(const FilterResult& result, int order, std::optional<double> tol) {
  const double threshold = tol.value_or(1e-6 * result.input_scale);
  const DiffOperator op = make_diff(order, result.trend.size());
  const auto dx = apply_diff(op, result.trend);
  std::vector<std::size_t> breaks;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (std::abs(dx[i]) > threshold) breaks.push_back(i + 1);
  }
  return breaks;
}

double l1_objective(std::span<const double> y, std::span<const double> x, double lambda, int order) {
  const DiffOperator op = make_diff(order, x.size());
  return half_sq_dist(y, x) + lambda * abs_sum(apply_diff(op, x));
}

double l1tc_objective(std::span<const double> y, std::span<const double> x, double lambda1,
                      double lambda2) {
  return half_sq_dist(y, x) + lambda1 * abs_sum(apply_diff(make_diff(1, x.size()), x)) +
         lambda2 * abs_sum(apply_diff(make_diff(2, x.size()), x));
}

double hp_objective(std::span<const double> y, std::span<const double> x, double lambda, int order) {
  const auto dx = apply_diff(make_diff(order, x.size()), x);
  double pen = 0.0;
  for (double v : dx) pen += v * v;
  return half_sq_dist(y, x) + lambda * pen;
}

std::vector<double> ols_line(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n == 0) return {};
  if (n == 1) return {y[0]};
  const double tbar = 0.5 * static_cast<double>(n - 1);
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sty = 0.0;
  double stt = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - tbar;
    sty += dt * (y[t] - ybar);
    stt += dt * dt;
  }
  const double beta = sty / stt;
  std::vector<double> line(n);
  for (std::size_t t = 0; t < n; ++t) line[t] = ybar + beta * (static_cast<double>(t) - tbar);
  return line;
}

}  // namespace l1trend
