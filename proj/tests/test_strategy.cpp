#include <doctest.h>

#include <cmath>
#include <random>

#include "l1trend/error.hpp"
#include "l1trend/strategy.hpp"

using namespace l1trend;

namespace {

std::vector<double> exponential(std::size_t n, double g, double s0 = 100.0) {
  std::vector<double> s(n);
  for (std::size_t t = 0; t < n; ++t) s[t] = s0 * std::exp(g * static_cast<double>(t));
  return s;
}

std::vector<double> noisy_prices(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.01);
  std::vector<double> s(n);
  double logp = std::log(100.0), drift = 0.001;
  for (std::size_t t = 0; t < n; ++t) {
    if (t % 90 == 45) drift = -drift;
    logp += drift + g(rng);
    s[t] = std::exp(logp);
  }
  return s;
}

StrategyConfig small(TrendModel m) {
  StrategyConfig c;
  c.trend_model = m;
  c.vol_window = 20;
  c.ma_window = 30;
  c.hp_window = 60;
  c.cv = CVConfig{80, 20, 40, 3, 3, 6, 2};
  return c;
}

const TrendModel kModels[] = {TrendModel::moving_average, TrendModel::hp, TrendModel::l1_local,
                              TrendModel::l1_global, TrendModel::l1_two_trend};

}  // namespace

TEST_CASE("moving-average drift") {
  CHECK(moving_average_trend(std::vector<double>(10, 5.0), 4) == 0.0);
  CHECK(moving_average_trend(exponential(50, 0.003), 20) == doctest::Approx(0.003).epsilon(1e-12));
  const std::vector<double> s{100, 101, 103};
  CHECK(moving_average_trend(s, 1) == doctest::Approx(std::log(103.0 / 101.0)));
  CHECK_THROWS_AS(moving_average_trend(s, 3), InsufficientHistory);
}

TEST_CASE("realized variance") {
  CHECK(realized_vol(std::vector<double>(10, 5.0), 5) == 0.0);
  std::vector<double> alt{100.0};
  for (int i = 0; i < 20; ++i) alt.push_back(i % 2 ? alt.back() / 1.03 : alt.back() * 1.03);
  CHECK(realized_vol(alt, 20) == doctest::Approx(std::log(1.03) * std::log(1.03)));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.02);
  std::vector<double> s{1.0};
  for (int i = 0; i < 5000; ++i) s.push_back(s.back() * std::exp(g(rng)));
  CHECK(realized_vol(s, 5000) == doctest::Approx(0.0004).epsilon(0.1));
  CHECK_THROWS_AS(realized_vol(std::vector<double>{1.0, -1.0, 2.0}, 2), DataError);
}

TEST_CASE("allocation and wealth step") {
  StrategyConfig c;
  CHECK(optimal_allocation(0.0, 0.04, c) == 0.0);
  CHECK(optimal_allocation(0.05, 0.04, c) == 1.0);
  CHECK(optimal_allocation(-0.05, 0.04, c) == -1.0);
  CHECK(optimal_allocation(0.01, 0.04, c) == doctest::Approx(0.25));
  CHECK_THROWS_AS(optimal_allocation(0.01, 0.0, c), InvalidArgument);
  CHECK(step_wealth(100, 1, 1.02, 0) == doctest::Approx(102));
  CHECK(step_wealth(100, 0, 1.02, 0.01) == doctest::Approx(101));
  CHECK(step_wealth(100, -1, 1.02, 0) == doctest::Approx(98));
}

TEST_CASE("performance statistics") {
  const std::vector<double> up{1.0, 1.1, 1.2, 1.5};
  CHECK(performance_stats(up, std::nullopt, 0.0).max_drawdown_pct == 0.0);
  const std::vector<double> dd{100, 110, 99};
  CHECK(performance_stats(dd, std::nullopt, 0.0).max_drawdown_pct == doctest::Approx(10.0));
  const auto same = performance_stats(up, std::span<const double>(up), 0.0);
  REQUIRE(same.information_ratio);
  CHECK(*same.information_ratio == 0.0);
  CHECK_FALSE(performance_stats(up, std::nullopt, 0.0).information_ratio);

  // Constant per-period growth g: annual return (1+g)^260 - 1, zero volatility.
  std::vector<double> steady{1.0};
  for (int i = 0; i < 520; ++i) steady.push_back(steady.back() * 1.0004);
  const auto st = performance_stats(steady, std::nullopt, 0.0);
  CHECK(st.annual_return_pct == doctest::Approx(100.0 * (std::pow(1.0004, 260) - 1.0)));
  CHECK(st.annual_volatility_pct == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(st.sharpe == 0.0);
  CHECK_THROWS_AS(performance_stats(std::vector<double>{}, std::nullopt, 0.0), DataError);
}

TEST_CASE("backtest on a deterministic uptrend") {
  const auto prices = exponential(400, 0.002);
  for (auto m : kModels) {
    const auto rep = run_backtest(prices, 0.0, small(m));
    CAPTURE(to_string(m));
    CHECK(rep.wealth.back() > rep.wealth.front());
    CHECK(rep.allocations.back() == 1.0);
    CHECK(rep.failed_dates.empty());
  }
}

TEST_CASE("constant prices compound at the risk-free rate") {
  const std::vector<double> prices(400, 50.0);
  for (auto m : kModels) {
    const auto rep = run_backtest(prices, 0.0001, small(m));
    CAPTURE(to_string(m));
    CHECK(rep.floored_variance_dates.size() == rep.allocations.size());
    for (std::size_t k = 0; k < rep.wealth.size(); ++k) {
      CHECK(rep.allocations[k] == 0.0);
      CHECK(rep.wealth[k] == doctest::Approx(std::pow(1.0001, static_cast<double>(k))).epsilon(1e-12));
    }
  }
}

TEST_CASE("walk-forward purity, bounds and wealth recursion") {
  const auto prices = noisy_prices(3, 330);
  const std::vector<double> rates(prices.size(), 0.0001);
  for (auto m : kModels) {
    CAPTURE(to_string(m));
    StrategyConfig cfg = small(m);
    cfg.alpha_min = -0.5;
    cfg.alpha_max = 0.8;
    const auto full = run_backtest(prices, rates, cfg);
    for (std::size_t k = 0; k < full.allocations.size(); ++k) {
      CHECK(full.allocations[k] >= cfg.alpha_min);
      CHECK(full.allocations[k] <= cfg.alpha_max);
    }
    for (std::size_t k = 0; k + 1 < full.wealth.size(); ++k) {
      const std::size_t t = full.start_index + k;
      CHECK(full.wealth[k + 1] == step_wealth(full.wealth[k], full.allocations[k], prices[t + 1] / prices[t], rates[t]));
    }
    const std::size_t cut = full.start_index + 25;
    const std::span<const double> head(prices.data(), cut + 1);
    const auto part = run_backtest(head, std::span<const double>(rates.data(), cut + 1), cfg);
    REQUIRE(part.allocations.size() == 26);
    for (std::size_t k = 0; k < part.allocations.size(); ++k) CHECK(part.allocations[k] == full.allocations[k]);
  }
}

TEST_CASE("recalibration interval holds lambda between refits") {
  const auto prices = noisy_prices(4, 300);
  StrategyConfig cfg = small(TrendModel::l1_global);
  cfg.recalibration_interval = 10;
  const auto rep = run_backtest(prices, 0.0, cfg);
  for (std::size_t k = 0; k < rep.lambdas.size(); ++k) {
    if (k % 10 != 0) CHECK(rep.lambdas[k] == rep.lambdas[k - 1]);
  }
}

TEST_CASE("configuration and input errors") {
  StrategyConfig c;
  c.alpha_min = 2.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = StrategyConfig{};
  c.vol_window = 1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(run_backtest(exponential(100, 0.001), 0.0, StrategyConfig{}), InsufficientHistory);
  CHECK_THROWS_AS(run_backtest(std::vector<double>(400, -1.0), 0.0, small(TrendModel::moving_average)), DataError);
  CHECK_THROWS_AS(run_backtest(exponential(400, 0.001), std::vector<double>(3, 0.0), small(TrendModel::hp)),
                  DimensionError);
  CHECK(parse_trend_model("l1-two-trend") == TrendModel::l1_two_trend);
  CHECK_THROWS_AS(parse_trend_model("ema"), InvalidArgument);
}

TEST_CASE("reference window defaults") {
  const StrategyConfig c;
  CHECK(c.cv.test_window == 130);
  CHECK(c.cv.global_window == 520);
  CHECK(c.cv.train_window == 4 * c.cv.test_window);
  CHECK(c.alpha_min == -1.0);
  CHECK(c.alpha_max == 1.0);
}
