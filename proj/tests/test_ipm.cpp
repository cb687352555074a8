#include <doctest.h>

#include <random>

#include "l1trend/diff.hpp"
#include "l1trend/error.hpp"
#include "l1trend/ipm.hpp"
#include "oracles.hpp"

using namespace l1trend;

namespace {

BoxQP l1_dual(int order, std::span<const double> y, double lambda) {
  const auto op = make_diff(order, y.size());
  BoxQP qp{gram_banded(op), apply_diff(op, y), std::vector<double>(op.rows(), lambda)};
  return qp;
}

oracle::MatrixXd dense(const BandedSymMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  oracle::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a(i, j);
  return m;
}

}  // namespace

TEST_CASE("unconstrained optimum inside the box is returned directly") {
  BoxQP qp{BandedSymMatrix(2, 0), {1.0, -2.0}, {10.0, 10.0}};
  qp.hessian.add_to_diagonal(2.0);
  const auto s = solve_box_qp(qp);
  CHECK(s.converged);
  CHECK(s.iterations == 0);
  CHECK(s.nu[0] == doctest::Approx(0.5));
  CHECK(s.nu[1] == doctest::Approx(-1.0));
}

TEST_CASE("interior-point path reaches the same point without the shortcut") {
  BoxQP qp{BandedSymMatrix(2, 0), {1.0, -2.0}, {10.0, 10.0}};
  qp.hessian.add_to_diagonal(2.0);
  const auto s = solve_box_qp(qp, {.tolerance = 1e-10, .max_iterations = 200, .try_unconstrained = false});
  CHECK(s.converged);
  CHECK(s.iterations > 0);
  CHECK(s.nu[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(s.nu[1] == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("active bounds on a diagonal problem") {
  BoxQP qp{BandedSymMatrix(3, 0), {5.0, -5.0, 0.25}, {1.0, 2.0, 1.0}};
  qp.hessian.add_to_diagonal(1.0);
  const auto s = solve_box_qp(qp);
  REQUIRE(s.converged);
  CHECK(s.duality_gap <= 1e-8);
  CHECK(s.nu[0] == doctest::Approx(1.0));
  CHECK(s.nu[1] == doctest::Approx(-2.0));
  CHECK(s.nu[2] == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("matches exhaustive face enumeration on small L1 duals") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(4, 10);
  std::uniform_real_distribution<double> frac(0.02, 0.9);
  for (int trial = 0; trial < 60; ++trial) {
    const int order = 1 + trial % 2;
    const int n = size(rng);
    const auto y = oracle::random_walk(rng, n, 3.0);
    const auto qp = l1_dual(order, y, 0.0 + 1.0);
    BoxQP scaled = qp;
    const double lam = frac(rng) * (1.0 + oracle::vec(qp.linear).cwiseAbs().maxCoeff());
    std::fill(scaled.upper.begin(), scaled.upper.end(), lam);
    const auto s = solve_box_qp(scaled);
    REQUIRE(s.converged);
    CHECK(s.duality_gap <= 1e-8);
    CHECK(s.kkt_residual <= 1e-8);
    const auto ref = oracle::box_qp_enumerate(dense(scaled.hessian), oracle::vec(scaled.linear),
                                              oracle::vec(scaled.upper));
    const double f_ref = scaled.objective(oracle::stdvec(ref));
    const double f = scaled.objective(s.nu);
    CHECK(f - f_ref <= 1e-8);
    CHECK(f - f_ref >= -1e-8);
  }
}

TEST_CASE("gap decreases monotonically after the first iterations") {
  std::mt19937_64 rng(4);
  const auto y = oracle::random_walk(rng, 300, 2.0);
  const auto s = solve_box_qp(l1_dual(2, y, 5.0));
  REQUIRE(s.converged);
  REQUIRE(s.gap_history.size() > 3);
  CHECK(s.gap_history.back() <= 1e-8);
  CHECK(s.gap_history.back() < s.gap_history.front());
  CHECK(s.iterations < 60);
}

TEST_CASE("Newton direction solves the linearized KKT system") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  const auto y = oracle::random_walk(rng, 40, 2.0);
  const BoxQP qp = l1_dual(2, y, 3.0);
  const std::size_t m = qp.size();
  std::vector<double> nu(m), mh(m), ml(m);
  for (std::size_t i = 0; i < m; ++i) {
    nu[i] = 3.0 * (u(rng) - 1.05) / 1.0;
    nu[i] = std::clamp(nu[i], -2.9, 2.9);
    mh[i] = u(rng);
    ml[i] = u(rng);
  }
  const IpmState s = IpmState::from_dual(qp, nu, mh, ml);
  const double tau = 7.0;
  const auto dir = newton_step(qp, s, tau);
  const auto r = kkt_residual(qp, s, tau);
  const auto j = kkt_jacobian_apply(qp, s, dir);
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(j.dual[i] + r.dual[i] == doctest::Approx(0.0).scale(std::abs(r.dual[i]) + 1.0).epsilon(1e-10));
    CHECK(j.cent_hi[i] + r.cent_hi[i] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(j.cent_lo[i] + r.cent_lo[i] == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("analytic Jacobian matches finite differences") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  const auto y = oracle::random_walk(rng, 12);
  const BoxQP qp = l1_dual(1, y, 2.0);
  const std::size_t m = qp.size();
  std::vector<double> nu(m), mh(m), ml(m);
  for (std::size_t i = 0; i < m; ++i) {
    nu[i] = u(rng) - 0.85;
    mh[i] = u(rng);
    ml[i] = u(rng);
  }
  NewtonDirection d{std::vector<double>(m), std::vector<double>(m), std::vector<double>(m)};
  for (std::size_t i = 0; i < m; ++i) {
    d.d_nu[i] = u(rng) - 0.85;
    d.d_mult_hi[i] = u(rng) - 0.85;
    d.d_mult_lo[i] = u(rng) - 0.85;
  }
  const double tau = 3.0, h = 1e-6;
  auto shifted = [&](double sgn) {
    std::vector<double> a(m), b(m), c(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = nu[i] + sgn * h * d.d_nu[i];
      b[i] = mh[i] + sgn * h * d.d_mult_hi[i];
      c[i] = ml[i] + sgn * h * d.d_mult_lo[i];
    }
    return kkt_residual(qp, IpmState::from_dual(qp, a, b, c), tau);
  };
  const auto plus = shifted(1.0), minus = shifted(-1.0);
  const auto jv = kkt_jacobian_apply(qp, IpmState::from_dual(qp, nu, mh, ml), d);
  for (std::size_t i = 0; i < m; ++i) {
    CHECK((plus.dual[i] - minus.dual[i]) / (2 * h) == doctest::Approx(jv.dual[i]).epsilon(1e-6));
    CHECK((plus.cent_hi[i] - minus.cent_hi[i]) / (2 * h) == doctest::Approx(jv.cent_hi[i]).epsilon(1e-6));
    CHECK((plus.cent_lo[i] - minus.cent_lo[i]) / (2 * h) == doctest::Approx(jv.cent_lo[i]).epsilon(1e-6));
  }
}

TEST_CASE("iteration cap reports non-convergence") {
  std::mt19937_64 rng(12);
  const auto y = oracle::random_walk(rng, 200, 2.0);
  const auto s = solve_box_qp(l1_dual(2, y, 1.0), {.tolerance = 1e-8, .max_iterations = 2, .try_unconstrained = true});
  CHECK_FALSE(s.converged);
  CHECK(s.iterations == 2);
  for (double v : s.nu) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("malformed problems") {
  BoxQP qp{BandedSymMatrix(2, 0), {1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(solve_box_qp(qp), DimensionError);
  BoxQP neg{BandedSymMatrix(1, 0), {1.0}, {-1.0}};
  neg.hessian.add_to_diagonal(1.0);
  CHECK_THROWS_AS(solve_box_qp(neg), InvalidArgument);
  BoxQP ok{BandedSymMatrix(1, 0), {1.0}, {1.0}};
  ok.hessian.add_to_diagonal(1.0);
  CHECK_THROWS_AS(solve_box_qp(ok, {.tolerance = 0.0}), InvalidArgument);
}
