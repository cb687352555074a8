#include <doctest.h>

#include <numeric>
#include <random>

#include "l1trend/calibration.hpp"
#include "l1trend/diff.hpp"
#include "l1trend/error.hpp"
#include "l1trend/filters.hpp"
#include "oracles.hpp"

using namespace l1trend;

namespace {

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void check_certificate(const FilterResult& r, const DiffOperator& op) {
  REQUIRE(r.diagnostics.converged);
  CHECK(r.diagnostics.duality_gap <= 1e-8);
  const auto dt = apply_diff_transpose(op, r.dual);
  for (std::size_t t = 0; t < r.trend.size(); ++t) CHECK(std::abs(r.signal[t] - dt[t] - r.trend[t]) <= 1e-8);
}

}  // namespace

TEST_CASE("HP filter") {
  std::mt19937_64 rng(1);
  const auto y = oracle::random_walk(rng, 150);
  SUBCASE("zero lambda is the identity") {
    CHECK(hp_filter(y, 0.0).trend == y);
    CHECK(hp_filter(y, 0.0, 1).trend == y);
  }
  SUBCASE("huge lambda approaches the OLS line") {
    const auto x = hp_filter(y, 1e12).trend;
    const auto line = ols_line(y);
    CHECK(max_diff(x, line) <= 1e-4 * max_abs(line));
  }
  SUBCASE("small system against a dense solve") {
    const std::vector<double> v{0, 1, 0, 1};
    const auto d = oracle::dense_diff(2, 4);
    const oracle::MatrixXd a = oracle::MatrixXd::Identity(4, 4) + 2.0 * d.transpose() * d;
    const auto ref = oracle::dense_solve(a, oracle::vec(v));
    const auto x = hp_filter(v, 1.0).trend;
    for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-13));
  }
  SUBCASE("first order against a dense solve") {
    const auto d = oracle::dense_diff(1, 150);
    const oracle::MatrixXd a = oracle::MatrixXd::Identity(150, 150) + 2.0 * 30.0 * d.transpose() * d;
    const auto ref = oracle::dense_solve(a, oracle::vec(y));
    CHECK(max_diff(hp_filter(y, 30.0, 1).trend, oracle::stdvec(ref)) <= 1e-9);
  }
}

TEST_CASE("L1 filters at lambda = 0 return the input") {
  std::mt19937_64 rng(2);
  const auto y = oracle::random_walk(rng, 40);
  CHECK(l1_filter(y, 0.0, 2).trend == y);
  CHECK(l1_filter(y, 0.0, 1).trend == y);
  CHECK(l1tc_filter(y, 0.0, 0.0).trend == y);
  CHECK(l1t_multivariate({y}, 0.0, false).trend == y);
}

TEST_CASE("degeneracy above lambda_max") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = oracle::noisy_broken_line(rng, 50 + 20 * trial, 2.0);
    const auto t = l1_filter(y, 1.01 * lambda_max(y, 2), 2);
    const auto line = ols_line(y);
    CHECK(max_diff(t.trend, line) <= 1e-6 * max_abs(line));
    CHECK(detect_breaks(t, 2).empty());
    const auto c = l1_filter(y, 1.01 * lambda_max(y, 1), 1);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    for (double v : c.trend) CHECK(std::abs(v - mean) <= 1e-6 * std::max(1.0, std::abs(mean)));
    CHECK(detect_breaks(c, 1).empty());
  }
}

TEST_CASE("primal-dual certificate and box feasibility") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 20 + 37 * trial;
    const auto y = oracle::noisy_broken_line(rng, n, 3.0);
    const double lam = 0.05 * lambda_max(y, 2) + 1.0;
    const auto r2 = l1_filter(y, lam, 2);
    check_certificate(r2, make_diff(2, n));
    for (double v : r2.dual) CHECK(std::abs(v) <= lam);
    const auto r1 = l1_filter(y, 0.05 * lambda_max(y, 1) + 1.0, 1);
    check_certificate(r1, make_diff(1, n));
    const auto tc = l1tc_filter(y, 2.0, lam);
    check_certificate(tc, make_mixed_diff(n));
    const auto& rows = make_mixed_diff(n).row_layout();
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(std::abs(tc.dual[i]) <= (rows[i].order == 1 ? 2.0 : lam));
  }
}

TEST_CASE("objective dominance over cheap competitors") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = oracle::noisy_broken_line(rng, 120, 4.0);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 120.0;
    const std::vector<std::vector<double>> rivals{y, std::vector<double>(120, mean), ols_line(y),
                                                  hp_filter(y, 200.0).trend};
    for (int order : {1, 2}) {
      const double lam = 3.0 + trial;
      const auto r = l1_filter(y, lam, order);
      const double f = l1_objective(y, r.trend, lam, order);
      for (const auto& z : rivals) CHECK(f <= l1_objective(y, z, lam, order) + 1e-8);
    }
  }
}

TEST_CASE("total variation is non-increasing in lambda") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto y = oracle::noisy_broken_line(rng, 300, 3.0);
    for (int order : {1, 2}) {
      const double lmax = lambda_max(y, order);
      double prev = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= 10; ++k) {
        const auto x = l1_filter(y, lmax * k / 10.0, order).trend;
        double tv = 0.0;
        for (double v : apply_diff(make_diff(order, 300), x)) tv += std::abs(v);
        CHECK(tv <= prev + 1e-6);
        prev = tv;
      }
    }
  }
}

TEST_CASE("brute-force objective equivalence on small signals") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> frac(0.05, 0.8);
  for (int trial = 0; trial < 40; ++trial) {
    const int order = 1 + trial % 2;
    const int n = 5 + trial % 8;
    const auto y = oracle::random_walk(rng, n, 2.0);
    const double lam = frac(rng) * lambda_max(y, order);
    const auto r = l1_filter(y, lam, order);
    const double ref = oracle::l1_bruteforce(oracle::dense_diff(order, n), oracle::vec(y),
                                             oracle::VectorXd::Constant(n - order, lam));
    CHECK(std::abs(l1_objective(y, r.trend, lam, order) - ref) <= 1e-6);
  }
}

TEST_CASE("mixed filter") {
  std::mt19937_64 rng(8);
  const auto y = oracle::noisy_broken_line(rng, 200, 2.0);
  SUBCASE("zero first weight reduces to the trend filter") {
    CHECK(max_diff(l1tc_filter(y, 0.0, 40.0).trend, l1_filter(y, 40.0, 2).trend) <= 1e-6);
  }
  SUBCASE("zero second weight reduces to the level filter") {
    CHECK(max_diff(l1tc_filter(y, 5.0, 0.0).trend, l1_filter(y, 5.0, 1).trend) <= 1e-6);
  }
  SUBCASE("n = 8 against the dense oracle") {
    for (int trial = 0; trial < 5; ++trial) {
      const auto v = oracle::random_walk(rng, 8, 1.0);
      const auto r = l1tc_filter(v, 0.5, 0.5);
      oracle::VectorXd w = oracle::VectorXd::Constant(13, 0.5);
      const double ref = oracle::l1_bruteforce(oracle::dense_mixed(8), oracle::vec(v), w);
      CHECK(std::abs(l1tc_objective(v, r.trend, 0.5, 0.5) - ref) <= 1e-6);
    }
  }
}

TEST_CASE("multivariate filter") {
  std::mt19937_64 rng(9);
  const auto a = oracle::noisy_broken_line(rng, 150, 2.0);
  const auto b = oracle::noisy_broken_line(rng, 150, 2.0);
  SUBCASE("one series is the univariate filter") {
    CHECK(max_diff(l1t_multivariate({a}, 20.0, false).trend, l1_filter(a, 20.0, 2).trend) <= 1e-12);
  }
  SUBCASE("identical copies") {
    CHECK(max_diff(l1t_multivariate({a, a, a}, 20.0, false).trend, l1_filter(a, 20.0, 2).trend) <= 1e-8);
  }
  SUBCASE("two series reduce to the filter of their mean") {
    std::vector<double> mean(150);
    for (int t = 0; t < 150; ++t) mean[t] = 0.5 * (a[t] + b[t]);
    const auto r = l1t_multivariate({a, b}, 20.0, false);
    CHECK(max_diff(r.trend, l1_filter(mean, 20.0, 2).trend) <= 1e-8);
    check_certificate(r, make_diff(2, 150));
  }
  SUBCASE("standardization statistics are retained") {
    const auto r = l1t_multivariate({a, b}, 1.0, true);
    REQUIRE(r.centers.size() == 2);
    CHECK(r.centers[0] == doctest::Approx(std::accumulate(a.begin(), a.end(), 0.0) / 150.0));
    CHECK(r.scales[1] > 0.0);
    double m = 0.0;
    for (double v : r.signal) m += v;
    CHECK(std::abs(m) <= 1e-9);
  }
  CHECK_THROWS_AS(l1t_multivariate({a, std::vector<double>(10)}, 1.0, false), DimensionError);
  CHECK_THROWS_AS(l1t_multivariate({a, std::vector<double>(150, 1.0)}, 1.0, true), DataError);
}

TEST_CASE("break detection") {
  std::vector<double> kink(30);
  for (int t = 0; t < 30; ++t) kink[t] = t < 12 ? t : 12 + 3.0 * (t - 12);
  FilterResult r;
  r.trend = kink;
  r.input_scale = 100.0;
  CHECK(detect_breaks(r, 2) == std::vector<std::size_t>{12});
  std::vector<double> line(30);
  for (int t = 0; t < 30; ++t) line[t] = 2.0 * t + 1.0;
  r.trend = line;
  CHECK(detect_breaks(r, 2).empty());
}

TEST_CASE("invalid parameters") {
  const std::vector<double> y{1, 2, 3, 4};
  CHECK_THROWS_AS(l1_filter(y, -1.0), InvalidArgument);
  CHECK_THROWS_AS(hp_filter(y, std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(l1tc_filter(y, 1.0, -2.0), InvalidArgument);
  CHECK_THROWS_AS(l1_filter(std::vector<double>{1, 2}, 1.0, 2), LengthError);
}
