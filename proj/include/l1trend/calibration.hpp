#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "l1trend/filters.hpp"
#include "l1trend/synth.hpp"

namespace l1trend {

/// Smallest lambda at which the L1 filter output is affine (order 2) or
/// constant (order 1): |(D D^T)^{-1} D y|_inf.
double lambda_max(std::span<const double> y, int order);

/// Mean of lambda_max over `segments` contiguous pieces of equal length; the
/// last piece absorbs the remainder.
double segment_lambda(std::span<const double> y, std::size_t segments, int order);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  std::vector<std::size_t> lengths;
  std::vector<double> mean_lambda_max;
};

/// Log-log slope of mean lambda_max against series length, over `n_sims`
/// simulated random-walk paths (model 2) per length.
ScalingFit fit_scaling_exponent(int order, std::size_t n_sims, std::span<const std::size_t> lengths,
                                std::uint64_t seed, const ModelParams& model = paper_params(2));

/// Window layout of the cross-validation.
struct CVConfig {
  /// T1: training window.
  std::size_t train_window = 400;
  /// T2: test / forecast window.
  std::size_t test_window = 50;
  /// T3: global-trend horizon of the two-trend predictor.
  std::size_t global_window = 200;
  /// m: rolling test windows used for the lambda_max statistics.
  std::size_t test_sets = 12;
  /// p: rolling training windows used for the forecast errors.
  std::size_t train_sets = 12;
  std::size_t grid_size = 15;
  int order = 2;

  /// Checks T1 > T2 >= 1, grid >= 2, order in {1, 2}, m, p >= 1.
  void validate() const;
  /// Samples needed by cv_filter.
  std::size_t required_history() const;
  /// Same layout with the test window replaced by T3.
  CVConfig global() const;
};

struct CVReport {
  std::vector<double> grid;
  /// e(lambda_j): sum over folds of the test-window mean squared error.
  std::vector<double> errors;
  /// fold_errors[j][k]: error of fold k at grid point j.
  std::vector<std::vector<double>> fold_errors;
  double lambda_star = 0.0;
  std::size_t best_index = 0;
  /// lambda_max of each test window, and their mean / sample deviation.
  std::vector<double> window_lambda_max;
  double lambda_mean = 0.0;
  double lambda_std = 0.0;
  double grid_lower = 0.0;
  double grid_upper = 0.0;
  /// Filter run with lambda* on the most recent training window.
  FilterResult fit;
  /// Index of fit.trend[0] in the input series.
  std::size_t fit_offset = 0;
};

/// Linear extrapolation of the last fitted segment (order 2) or the last
/// level (order 1), for h = 1..horizon.
std::vector<double> forecast_trend(std::span<const double> trend, int order, std::size_t horizon);
std::vector<double> forecast_trend(const FilterResult& result, int order, std::size_t horizon);

/// Per-fold forecast errors at one lambda under the layout of `cfg`.
std::vector<double> cv_fold_errors(std::span<const double> y, const CVConfig& cfg, double lambda,
                                   const IpmOptions& options = {});

/// Cross-validated choice of lambda over a geometric grid spanning
/// mean +/- 2 sd of the test windows' lambda_max.
CVReport cv_filter(std::span<const double> y, const CVConfig& cfg, const IpmOptions& options = {});

enum class TrendBranch { local, global };

struct TwoTrendPrediction {
  /// Forecast of the chosen trend over the local horizon T2.
  std::vector<double> prediction;
  TrendBranch branch = TrendBranch::local;
  CVReport local;
  CVReport global;
  /// Sample deviation of y - x_G over the global fit window.
  double sigma = 0.0;
  /// |y_n - x_G_n| at the last sample.
  double deviation = 0.0;
};

/// Local trend (horizon T2) unless the last observation sits at least one
/// deviation away from the global trend (horizon T3).
TwoTrendPrediction predict_two_trend(std::span<const double> y, const CVConfig& cfg,
                                     const IpmOptions& options = {});

/// Same rule with both lambdas already chosen: only the two fits on the most
/// recent T1 window are run, and the reports carry no grid.
TwoTrendPrediction predict_two_trend_fixed(std::span<const double> y, const CVConfig& cfg,
                                           double lambda_local, double lambda_global,
                                           const IpmOptions& options = {});

/// Branch rule in isolation: local iff deviation < sigma.
TrendBranch choose_branch(double deviation, double sigma);

/// HP lambda matching a moving average of length T: 10.27 * 1/2 (T / 2 pi)^4.
double l2_lambda_for_window(double window);

/// Squared-gain spectral densities.
double ma_spectral_density(double window, double omega);
double hp_spectral_density(double lambda, double omega);

struct SpectralFit {
  double lambda = 0.0;
  double objective = 0.0;
  std::size_t grid_points = 0;
};

/// Least-squares sum over a uniform frequency grid on [0, pi].
double spectral_mismatch(double window, double lambda, std::size_t grid_points);

/// Least-squares match of the HP density to the moving-average density.
SpectralFit calibrate_l2_spectral(double window);

}  // namespace l1trend
