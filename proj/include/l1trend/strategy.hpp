#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l1trend/calibration.hpp"

namespace l1trend {

enum class TrendModel { moving_average, hp, l1_local, l1_global, l1_two_trend };

std::string to_string(TrendModel m);
/// Accepts ma, hp, l1-local, l1-global, l1-two-trend.
TrendModel parse_trend_model(const std::string& name);

/// Trading days per year used for annualization.
inline constexpr double kPeriodsPerYear = 260.0;

struct StrategyConfig {
  /// Product of the risk-aversion coefficient and the initial wealth.
  double risk_aversion = 1.0;
  double alpha_min = -1.0;
  double alpha_max = 1.0;
  std::size_t vol_window = 130;
  TrendModel trend_model = TrendModel::l1_global;
  std::size_t ma_window = 520;
  /// HP fit window; hp_lambda <= 0 selects l2_lambda_for_window(hp_window).
  std::size_t hp_window = 520;
  double hp_lambda = 0.0;
  /// T1 = 4 T2, T2 = 130, T3 = 520.
  CVConfig cv{520, 130, 520, 4, 4, 15, 2};
  /// Dates between lambda recalibrations of the L1 models (1 = every date).
  std::size_t recalibration_interval = 1;
  double initial_wealth = 1.0;
  /// Floor applied to the variance estimate before allocating.
  double variance_floor = 1e-10;
  IpmOptions solver{};

  void validate() const;
  /// Number of past prices (inclusive of the decision date) the model needs.
  std::size_t history_needed() const;
};

/// Per-sample drift of log prices implied by the moving average:
/// MA_t - MA_{t-1} = (ln S_t - ln S_{t-T}) / T. Uses the last T + 1 prices.
double moving_average_trend(std::span<const double> prices, std::size_t window);

/// Mean squared log-return over the trailing window (uncentered).
double realized_vol(std::span<const double> prices, std::size_t window);

/// clip(mu / (risk_aversion * sigma2), alpha_min, alpha_max). Throws
/// InvalidArgument when sigma2 <= 0.
double optimal_allocation(double mu, double sigma2, const StrategyConfig& cfg);

/// W (1 + alpha (S_{t+1}/S_t - 1) + (1 - alpha) r).
double step_wealth(double wealth, double alpha, double price_ratio, double rate);

struct PerformanceStats {
  double annual_return_pct = 0.0;
  double annual_volatility_pct = 0.0;
  double sharpe = 0.0;
  std::optional<double> information_ratio;
  double max_drawdown_pct = 0.0;
};

/// `rate` is the per-period risk-free rate used for the Sharpe ratio.
PerformanceStats performance_stats(std::span<const double> wealth,
                                   std::optional<std::span<const double>> benchmark, double rate);

struct BacktestReport {
  /// Index of the first decision date in the price series.
  std::size_t start_index = 0;
  /// wealth[k] is the wealth at date start_index + k.
  std::vector<double> wealth;
  /// alpha[k] is decided at date start_index + k using prices up to that date.
  std::vector<double> allocations;
  std::vector<double> drift;
  std::vector<double> variance;
  /// Lambda in force per date (L1 models; the local one for two-trend).
  std::vector<double> lambdas;
  /// Two-trend model only: true where the local branch was chosen.
  std::vector<bool> local_branch;
  std::vector<std::size_t> floored_variance_dates;
  std::vector<std::size_t> failed_dates;
  /// Buy-and-hold wealth over the same dates.
  std::vector<double> benchmark;
  PerformanceStats stats;
  PerformanceStats benchmark_stats;
};

/// Walk-forward backtest: at each date the trend and variance are estimated
/// from prices up to that date only. `rates` holds one per-period rate per
/// price, or a single constant.
BacktestReport run_backtest(std::span<const double> prices, std::span<const double> rates,
                            const StrategyConfig& cfg);
BacktestReport run_backtest(std::span<const double> prices, double rate, const StrategyConfig& cfg);

}  // namespace l1trend
