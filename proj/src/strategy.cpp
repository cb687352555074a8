#include "l1trend/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "l1trend/error.hpp"

namespace l1trend {
namespace {

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double last_slope(const FilterResult& fit, int order) {
  if (order == 1 || fit.trend.size() < 2) return 0.0;
  return fit.trend.back() - fit.trend[fit.trend.size() - 2];
}

// Drift estimate at one date, plus the lambda in force and the branch taken.
struct TrendEstimate {
  double drift = 0.0;
  double lambda = 0.0;
  bool local = false;
};

class TrendEstimator {
 public:
  explicit TrendEstimator(const StrategyConfig& cfg) : cfg_(cfg) {
    if (cfg.trend_model == TrendModel::hp) {
      hp_lambda_ = cfg.hp_lambda > 0.0 ? cfg.hp_lambda : l2_lambda_for_window(static_cast<double>(cfg.hp_window));
    }
  }

  // `log_prices` ends at the decision date; `recalibrate` is true on the
  // dates where the L1 models rerun cross-validation.
  TrendEstimate estimate(std::span<const double> raw_log_prices, std::span<const double> prices, bool recalibrate) {
    // Filters commute with adding a constant; anchoring at the last price
    // makes a flat history exactly zero.
    shifted_.resize(raw_log_prices.size());
    for (std::size_t i = 0; i < shifted_.size(); ++i) shifted_[i] = raw_log_prices[i] - raw_log_prices.back();
    const std::span<const double> log_prices = shifted_;
    const auto& cv = cfg_.cv;
    const auto& opt = cfg_.solver;
    TrendEstimate est;
    switch (cfg_.trend_model) {
      case TrendModel::moving_average:
        est.drift = moving_average_trend(prices, cfg_.ma_window);
        break;
      case TrendModel::hp: {
        const auto window = log_prices.last(cfg_.hp_window);
        est.drift = last_slope(hp_filter(window, hp_lambda_, 2), 2);
        est.lambda = hp_lambda_;
        break;
      }
      case TrendModel::l1_local:
      case TrendModel::l1_global: {
        const CVConfig layout = cfg_.trend_model == TrendModel::l1_local ? cv : cv.global();
        if (recalibrate || !lambda_local_) lambda_local_ = cv_filter(log_prices, layout, opt).lambda_star;
        const FilterResult fit = l1_filter(log_prices.last(cv.train_window), *lambda_local_, cv.order, opt);
        if (!fit.diagnostics.converged) throw NumericalError("L1 filter did not converge");
        est.drift = last_slope(fit, cv.order);
        est.lambda = *lambda_local_;
        break;
      }
      case TrendModel::l1_two_trend: {
        TwoTrendPrediction p;
        if (recalibrate || !lambda_local_ || !lambda_global_) {
          p = predict_two_trend(log_prices, cv, opt);
          lambda_local_ = p.local.lambda_star;
          lambda_global_ = p.global.lambda_star;
        } else {
          p = predict_two_trend_fixed(log_prices, cv, *lambda_local_, *lambda_global_, opt);
        }
        est.local = p.branch == TrendBranch::local;
        est.drift = last_slope(est.local ? p.local.fit : p.global.fit, cv.order);
        est.lambda = *lambda_local_;
        break;
      }
    }
    return est;
  }

 private:
  const StrategyConfig& cfg_;
  double hp_lambda_ = 0.0;
  std::vector<double> shifted_;
  std::optional<double> lambda_local_;
  std::optional<double> lambda_global_;
};

}  // namespace

std::string to_string(TrendModel m) {
  switch (m) {
    case TrendModel::moving_average: return "ma";
    case TrendModel::hp: return "hp";
    case TrendModel::l1_local: return "l1-local";
    case TrendModel::l1_global: return "l1-global";
    case TrendModel::l1_two_trend: return "l1-two-trend";
  }
  return "unknown";
}

TrendModel parse_trend_model(const std::string& name) {
  for (auto m : {TrendModel::moving_average, TrendModel::hp, TrendModel::l1_local, TrendModel::l1_global,
                 TrendModel::l1_two_trend}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown trend model '" + name + "'");
}

void StrategyConfig::validate() const {
  if (!(alpha_min <= alpha_max)) throw InvalidArgument("alpha_min must not exceed alpha_max");
  if (vol_window < 2) throw InvalidArgument("volatility window must be >= 2");
  if (!(risk_aversion > 0.0)) throw InvalidArgument("risk aversion must be positive");
  if (!(initial_wealth > 0.0)) throw InvalidArgument("initial wealth must be positive");
  if (recalibration_interval < 1) throw InvalidArgument("recalibration interval must be >= 1");
  if (!(variance_floor > 0.0)) throw InvalidArgument("variance floor must be positive");
  switch (trend_model) {
    case TrendModel::moving_average:
      if (ma_window < 1) throw InvalidArgument("moving-average window must be >= 1");
      break;
    case TrendModel::hp:
      if (hp_window < 3) throw InvalidArgument("HP window must be >= 3");
      break;
    default:
      cv.validate();
  }
}

std::size_t StrategyConfig::history_needed() const {
  std::size_t need = vol_window + 1;
  switch (trend_model) {
    case TrendModel::moving_average: need = std::max(need, ma_window + 1); break;
    case TrendModel::hp: need = std::max(need, hp_window); break;
    case TrendModel::l1_local: need = std::max(need, cv.required_history()); break;
    case TrendModel::l1_global: need = std::max(need, cv.global().required_history()); break;
    case TrendModel::l1_two_trend:
      need = std::max({need, cv.required_history(), cv.global().required_history()});
      break;
  }
  return need;
}

double moving_average_trend(std::span<const double> prices, std::size_t window) {
  if (window < 1) throw InvalidArgument("moving-average window must be >= 1");
  if (prices.size() < window + 1) throw InsufficientHistory("moving-average trend needs T + 1 prices");
  const double now = prices.back();
  const double then = prices[prices.size() - 1 - window];
  if (!(now > 0.0) || !(then > 0.0)) throw DataError("non-positive price");
  return (std::log(now) - std::log(then)) / static_cast<double>(window);
}

double realized_vol(std::span<const double> prices, std::size_t window) {
  if (window < 1) throw InvalidArgument("volatility window must be >= 1");
  if (prices.size() < window + 1) throw InsufficientHistory("realized volatility needs T + 1 prices");
  const auto tail = prices.last(window + 1);
  double sum = 0.0;
  for (std::size_t i = 1; i < tail.size(); ++i) {
    if (!(tail[i] > 0.0) || !(tail[i - 1] > 0.0)) throw DataError("non-positive price");
    const double r = std::log(tail[i] / tail[i - 1]);
    sum += r * r;
  }
  return sum / static_cast<double>(window);
}

double optimal_allocation(double mu, double sigma2, const StrategyConfig& cfg) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("allocation needs a positive variance");
  return std::clamp(mu / (cfg.risk_aversion * sigma2), cfg.alpha_min, cfg.alpha_max);
}

double step_wealth(double wealth, double alpha, double price_ratio, double rate) {
  return wealth + wealth * (alpha * (price_ratio - 1.0) + (1.0 - alpha) * rate);
}

PerformanceStats performance_stats(std::span<const double> wealth,
                                   std::optional<std::span<const double>> benchmark, double rate) {
  if (wealth.empty()) throw DataError("performance statistics need a non-empty wealth path");
  for (double w : wealth) {
    if (!(w > 0.0)) throw DataError("performance statistics need positive wealth");
  }
  if (benchmark && benchmark->size() != wealth.size()) {
    throw DimensionError("benchmark and wealth paths differ in length");
  }
  PerformanceStats st;
  const std::size_t periods = wealth.size() - 1;
  if (benchmark && periods > 0) st.information_ratio = 0.0;
  if (periods == 0) return st;

  const double growth = wealth.back() / wealth.front();
  const double annual_return = std::pow(growth, kPeriodsPerYear / static_cast<double>(periods)) - 1.0;
  std::vector<double> log_ret(periods);
  for (std::size_t k = 0; k < periods; ++k) log_ret[k] = std::log(wealth[k + 1] / wealth[k]);
  // Roundoff in a deterministic path leaves a tiny nonzero spread.
  constexpr double kNegligible = 1e-12;
  double annual_vol = sample_sd(log_ret) * std::sqrt(kPeriodsPerYear);
  if (annual_vol < kNegligible) annual_vol = 0.0;
  const double annual_rf = std::pow(1.0 + rate, kPeriodsPerYear) - 1.0;

  st.annual_return_pct = 100.0 * annual_return;
  st.annual_volatility_pct = 100.0 * annual_vol;
  st.sharpe = annual_vol > 0.0 ? (annual_return - annual_rf) / annual_vol : 0.0;

  if (benchmark) {
    const auto& b = *benchmark;
    std::vector<double> excess(periods);
    for (std::size_t k = 0; k < periods; ++k) {
      excess[k] = (wealth[k + 1] / wealth[k] - 1.0) - (b[k + 1] / b[k] - 1.0);
    }
    double te = sample_sd(excess);
    if (te * std::sqrt(kPeriodsPerYear) < kNegligible) te = 0.0;
    const double mean = std::accumulate(excess.begin(), excess.end(), 0.0) / static_cast<double>(periods);
    st.information_ratio = te > 0.0 ? mean * kPeriodsPerYear / (te * std::sqrt(kPeriodsPerYear)) : 0.0;
  }

  double peak = wealth.front();
  for (double w : wealth) {
    peak = std::max(peak, w);
    st.max_drawdown_pct = std::max(st.max_drawdown_pct, 100.0 * (peak - w) / peak);
  }
  return st;
}

BacktestReport run_backtest(std::span<const double> prices, std::span<const double> rates,
                            const StrategyConfig& cfg) {
  cfg.validate();
  const std::size_t n = prices.size();
  if (rates.size() != 1 && rates.size() != n) {
    throw DimensionError("rates must be a single constant or one value per price");
  }
  for (double s : prices) {
    if (!(s > 0.0)) throw DataError("prices must be positive");
  }
  const std::size_t need = cfg.history_needed();
  if (n < need + 1) {
    throw InsufficientHistory("backtest needs more than " + std::to_string(need) + " prices for model " +
                              to_string(cfg.trend_model) + ", got " + std::to_string(n));
  }
  auto rate_at = [&](std::size_t t) { return rates.size() == 1 ? rates[0] : rates[t]; };

  std::vector<double> log_prices(n);
  for (std::size_t t = 0; t < n; ++t) log_prices[t] = std::log(prices[t]);

  BacktestReport rep;
  rep.start_index = need - 1;
  rep.wealth.push_back(cfg.initial_wealth);
  rep.benchmark.push_back(cfg.initial_wealth);

  TrendEstimator estimator(cfg);
  double alpha = 0.0;
  for (std::size_t t = rep.start_index; t < n; ++t) {
    const std::size_t k = t - rep.start_index;
    const auto hist = std::span<const double>(prices).first(t + 1);
    const auto log_hist = std::span<const double>(log_prices).first(t + 1);
    const bool recalibrate = k % cfg.recalibration_interval == 0;

    TrendEstimate est;
    bool ok = true;
    try {
      est = estimator.estimate(log_hist, hist, recalibrate);
    } catch (const NumericalError&) {
      ok = false;
      rep.failed_dates.push_back(t);
    }

    double var = realized_vol(hist, cfg.vol_window);
    if (var < cfg.variance_floor) {
      var = cfg.variance_floor;
      rep.floored_variance_dates.push_back(t);
    }
    if (ok) alpha = optimal_allocation(est.drift, var, cfg);

    rep.drift.push_back(ok ? est.drift : std::nan(""));
    rep.variance.push_back(var);
    rep.lambdas.push_back(est.lambda);
    if (cfg.trend_model == TrendModel::l1_two_trend) rep.local_branch.push_back(est.local);
    rep.allocations.push_back(alpha);

    if (t + 1 < n) {
      const double ratio = prices[t + 1] / prices[t];
      rep.wealth.push_back(step_wealth(rep.wealth.back(), alpha, ratio, rate_at(t)));
      rep.benchmark.push_back(rep.benchmark.back() * ratio);
    }
  }

  const double mean_rate = [&] {
    double s = 0.0;
    for (std::size_t t = rep.start_index; t + 1 < n; ++t) s += rate_at(t);
    return s / static_cast<double>(n - 1 - rep.start_index);
  }();
  rep.stats = performance_stats(rep.wealth, std::span<const double>(rep.benchmark), mean_rate);
  rep.benchmark_stats = performance_stats(rep.benchmark, std::nullopt, mean_rate);
  return rep;
}

BacktestReport run_backtest(std::span<const double> prices, double rate, const StrategyConfig& cfg) {
  const double r[1] = {rate};
  return run_backtest(prices, std::span<const double>(r, 1), cfg);
}

}  // namespace l1trend
