#include "l1trend/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "l1trend/diff.hpp"
#include "l1trend/error.hpp"

namespace l1trend {
namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Layout checks shared by the local and the global (T3) configuration.
void check_layout(const CVConfig& cfg) {
  if (cfg.order != 1 && cfg.order != 2) throw InvalidArgument("CV order must be 1 or 2");
  if (cfg.test_window < static_cast<std::size_t>(cfg.order) + 1) {
    throw InvalidArgument("CV test window must exceed the difference order");
  }
  if (cfg.train_window < static_cast<std::size_t>(cfg.order) + 1) {
    throw InvalidArgument("CV training window must exceed the difference order");
  }
  if (cfg.test_sets < 1 || cfg.train_sets < 1) throw InvalidArgument("CV needs at least one test and one training set");
  if (cfg.grid_size < 2) throw InvalidArgument("CV grid size must be >= 2");
}

void require_history(std::span<const double> y, const CVConfig& cfg) {
  const std::size_t need = cfg.required_history();
  if (y.size() < need) {
    throw InsufficientHistory("cross-validation needs " + std::to_string(need) + " samples, got " +
                              std::to_string(y.size()));
  }
}

}  // namespace

double lambda_max(std::span<const double> y, int order) {
  const DiffOperator op = make_diff(order, y.size());
  const auto nu = band_solve(gram_banded(op), apply_diff(op, y));
  double m = 0.0;
  for (double v : nu) m = std::max(m, std::abs(v));
  return m;
}

double segment_lambda(std::span<const double> y, std::size_t segments, int order) {
  if (segments < 1) throw InvalidArgument("segment count must be >= 1");
  const std::size_t len = y.size() / segments;
  if (len < static_cast<std::size_t>(order) + 1) {
    throw LengthError("segments of length " + std::to_string(len) + " are too short for order " +
                      std::to_string(order));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < segments; ++i) {
    const std::size_t start = i * len;
    const std::size_t count = i + 1 == segments ? y.size() - start : len;
    sum += lambda_max(y.subspan(start, count), order);
  }
  return sum / static_cast<double>(segments);
}

ScalingFit fit_scaling_exponent(int order, std::size_t n_sims, std::span<const std::size_t> lengths,
                                std::uint64_t seed, const ModelParams& model) {
  if (lengths.size() < 3) throw InvalidArgument("scaling fit needs at least 3 lengths");
  if (n_sims < 30) throw InvalidArgument("scaling fit needs at least 30 simulations per length");
  std::mt19937_64 seeds(seed);
  ScalingFit fit;
  fit.lengths.assign(lengths.begin(), lengths.end());
  for (std::size_t len : lengths) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n_sims; ++s) {
      ModelParams p = model;
      p.n = len;
      p.seed = seeds();
      sum += lambda_max(simulate_model2(p).observed, order);
    }
    fit.mean_lambda_max.push_back(sum / static_cast<double>(n_sims));
  }
  const std::size_t k = lengths.size();
  std::vector<double> lx(k);
  std::vector<double> ly(k);
  for (std::size_t i = 0; i < k; ++i) {
    lx[i] = std::log(static_cast<double>(lengths[i]));
    ly[i] = std::log(fit.mean_lambda_max[i]);
  }
  const double mx = mean_of(lx);
  const double my = mean_of(ly);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  return fit;
}

void CVConfig::validate() const {
  check_layout(*this);
  if (!(train_window > test_window)) throw InvalidArgument("CV requires T1 > T2");
  if (global_window < 1) throw InvalidArgument("CV global window T3 must be >= 1");
}

std::size_t CVConfig::required_history() const {
  return std::max(test_sets * test_window, train_sets * test_window + train_window);
}

CVConfig CVConfig::global() const {
  CVConfig g = *this;
  g.test_window = global_window;
  return g;
}

std::vector<double> forecast_trend(std::span<const double> trend, int order, std::size_t horizon) {
  if (horizon == 0) throw InvalidArgument("forecast horizon must be positive");
  if (trend.empty()) throw LengthError("cannot forecast an empty trend");
  if (order != 1 && order != 2) throw InvalidArgument("forecast order must be 1 or 2");
  const double last = trend.back();
  double slope = 0.0;
  if (order == 2) {
    if (trend.size() < 2) throw LengthError("slope extrapolation needs two fitted points");
    slope = last - trend[trend.size() - 2];
  }
  std::vector<double> out(horizon);
  for (std::size_t h = 1; h <= horizon; ++h) out[h - 1] = last + static_cast<double>(h) * slope;
  return out;
}

std::vector<double> forecast_trend(const FilterResult& result, int order, std::size_t horizon) {
  return forecast_trend(result.trend, order, horizon);
}

std::vector<double> cv_fold_errors(std::span<const double> y, const CVConfig& cfg, double lambda,
                                   const IpmOptions& options) {
  check_layout(cfg);
  require_history(y, cfg);
  const std::size_t n = y.size();
  std::vector<double> errors(cfg.train_sets);
  for (std::size_t k = 1; k <= cfg.train_sets; ++k) {
    const std::size_t test_start = n - k * cfg.test_window;
    const auto train = y.subspan(test_start - cfg.train_window, cfg.train_window);
    const FilterResult fit = l1_filter(train, lambda, cfg.order, options);
    if (!fit.diagnostics.converged) {
      throw NumericalError("L1 filter did not converge in CV fold " + std::to_string(k) +
                           " (lambda = " + std::to_string(lambda) + ")");
    }
    const auto fc = forecast_trend(fit.trend, cfg.order, cfg.test_window);
    double sse = 0.0;
    for (std::size_t h = 0; h < cfg.test_window; ++h) {
      const double e = fc[h] - y[test_start + h];
      sse += e * e;
    }
    errors[k - 1] = sse / static_cast<double>(cfg.test_window);
  }
  return errors;
}

CVReport cv_filter(std::span<const double> y, const CVConfig& cfg, const IpmOptions& options) {
  check_layout(cfg);
  require_history(y, cfg);
  const std::size_t n = y.size();

  CVReport rep;
  for (std::size_t i = 1; i <= cfg.test_sets; ++i) {
    rep.window_lambda_max.push_back(lambda_max(y.subspan(n - i * cfg.test_window, cfg.test_window), cfg.order));
  }
  rep.lambda_mean = mean_of(rep.window_lambda_max);
  rep.lambda_std = sample_sd(rep.window_lambda_max);

  double lower = rep.lambda_mean - 2.0 * rep.lambda_std;
  if (!(lower > 0.0)) lower = std::max(1e-6 * rep.lambda_mean, std::numeric_limits<double>::epsilon());
  const double upper = std::max(rep.lambda_mean + 2.0 * rep.lambda_std, lower);
  rep.grid_lower = lower;
  rep.grid_upper = upper;

  const double ratio = upper / lower;
  const auto steps = static_cast<double>(cfg.grid_size);
  for (std::size_t j = 1; j <= cfg.grid_size; ++j) {
    const double lambda = lower * std::pow(ratio, static_cast<double>(j) / steps);
    rep.grid.push_back(lambda);
    rep.fold_errors.push_back(cv_fold_errors(y, cfg, lambda, options));
    double total = 0.0;
    for (double e : rep.fold_errors.back()) total += e;
    rep.errors.push_back(total);
  }
  rep.best_index = static_cast<std::size_t>(
      std::distance(rep.errors.begin(), std::min_element(rep.errors.begin(), rep.errors.end())));
  rep.lambda_star = rep.grid[rep.best_index];

  rep.fit_offset = n - cfg.train_window;
  rep.fit = l1_filter(y.subspan(rep.fit_offset, cfg.train_window), rep.lambda_star, cfg.order, options);
  return rep;
}

TrendBranch choose_branch(double deviation, double sigma) {
  return deviation < sigma ? TrendBranch::local : TrendBranch::global;
}

namespace {

void finish_two_trend(std::span<const double> y, const CVConfig& cfg, TwoTrendPrediction& out) {
  const auto& xg = out.global.fit.trend;
  const std::size_t off = out.global.fit_offset;
  std::vector<double> resid(xg.size());
  for (std::size_t t = 0; t < xg.size(); ++t) resid[t] = y[off + t] - xg[t];
  out.sigma = sample_sd(resid);
  out.deviation = std::abs(resid.back());
  out.branch = choose_branch(out.deviation, out.sigma);
  const FilterResult& chosen = out.branch == TrendBranch::local ? out.local.fit : out.global.fit;
  out.prediction = forecast_trend(chosen, cfg.order, cfg.test_window);
}

CVReport fixed_fit(std::span<const double> y, const CVConfig& cfg, double lambda, const IpmOptions& options) {
  CVReport rep;
  rep.lambda_star = lambda;
  rep.fit_offset = y.size() - cfg.train_window;
  rep.fit = l1_filter(y.subspan(rep.fit_offset, cfg.train_window), lambda, cfg.order, options);
  if (!rep.fit.diagnostics.converged) throw NumericalError("L1 filter did not converge on the fit window");
  return rep;
}

}  // namespace

TwoTrendPrediction predict_two_trend(std::span<const double> y, const CVConfig& cfg,
                                     const IpmOptions& options) {
  cfg.validate();
  const CVConfig global_cfg = cfg.global();
  require_history(y, cfg);
  require_history(y, global_cfg);
  TwoTrendPrediction out;
  out.local = cv_filter(y, cfg, options);
  out.global = cv_filter(y, global_cfg, options);
  finish_two_trend(y, cfg, out);
  return out;
}

TwoTrendPrediction predict_two_trend_fixed(std::span<const double> y, const CVConfig& cfg,
                                           double lambda_local, double lambda_global,
                                           const IpmOptions& options) {
  cfg.validate();
  if (y.size() < cfg.train_window) {
    throw InsufficientHistory("two-trend fit needs " + std::to_string(cfg.train_window) + " samples");
  }
  TwoTrendPrediction out;
  out.local = fixed_fit(y, cfg, lambda_local, options);
  out.global = fixed_fit(y, cfg, lambda_global, options);
  finish_two_trend(y, cfg, out);
  return out;
}

double l2_lambda_for_window(double window) {
  if (!(window >= 2.0)) throw InvalidArgument("moving-average window must be >= 2");
  const double x = window / (2.0 * std::numbers::pi);
  return 10.27 * 0.5 * x * x * x * x;
}

double ma_spectral_density(double window, double omega) {
  if (!(window >= 1.0)) throw InvalidArgument("moving-average window must be >= 1");
  const double half = 0.5 * omega;
  const double s = std::sin(half);
  if (std::abs(s) < 1e-300) return 1.0;
  const double g = std::sin(window * half) / (window * s);
  return g * g;
}

double hp_spectral_density(double lambda, double omega) {
  if (!(lambda >= 0.0)) throw InvalidArgument("HP lambda must be >= 0");
  // 3 - 4 cos w + cos 2w = 8 sin^4(w/2)
  const double s = std::sin(0.5 * omega);
  const double g = 1.0 / (1.0 + 32.0 * lambda * s * s * s * s);
  return g * g;
}

double spectral_mismatch(double window, double lambda, std::size_t grid_points) {
  double sum = 0.0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double w = std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double d = hp_spectral_density(lambda, w) - ma_spectral_density(window, w);
    sum += d * d;
  }
  return sum;
}

SpectralFit calibrate_l2_spectral(double window) {
  if (!(window >= 4.0)) throw InvalidArgument("spectral calibration needs T >= 4");
  // The grid must resolve the moving-average side lobes (period ~ 2 pi / T).
  const auto points = static_cast<std::size_t>(std::max(2048.0, 16.0 * std::ceil(window))) + 1;
  const double x = window / (2.0 * std::numbers::pi);
  const double anchor = std::log(0.5 * x * x * x * x);

  auto objective = [&](double log_lambda) { return spectral_mismatch(window, std::exp(log_lambda), points); };

  // Coarse scan over 5 decades around the quartic anchor, then Brent.
  constexpr int kScan = 101;
  const double lo = anchor - std::log(100.0);
  const double hi = anchor + std::log(1000.0);
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double v = objective(lo + (hi - lo) * i / (kScan - 1));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == 0 || best == kScan - 1) {
    throw NumericalError("spectral calibration: minimum not bracketed for T = " + std::to_string(window));
  }
  const double a = lo + (hi - lo) * (best - 1) / (kScan - 1);
  const double b = lo + (hi - lo) * (best + 1) / (kScan - 1);
  const auto [arg, value] = boost::math::tools::brent_find_minima(objective, a, b, 50);
  return SpectralFit{std::exp(arg), value, points};
}

}  // namespace l1trend
