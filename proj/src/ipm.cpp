#include "l1trend/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "l1trend/error.hpp"

namespace l1trend {
namespace {

// Barrier target shrinks the mean complementarity product tenfold per step.
constexpr double kBarrierFactor = 10.0;
constexpr double kArmijo = 0.01;
constexpr double kBacktrack = 0.5;
constexpr double kToBoundary = 0.99;
constexpr int kMaxBacktracks = 60;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Largest step in (0, 1] keeping slacks and multipliers strictly positive.
double max_feasible_step(const IpmState& s, const NewtonDirection& d) {
  double step = 1.0;
  auto limit = [&step](double value, double delta) {
    if (delta < 0.0) step = std::min(step, -kToBoundary * value / delta);
  };
  for (std::size_t i = 0; i < s.slack_hi.size(); ++i) {
    limit(s.slack_hi[i], -d.d_nu[i]);
    limit(s.slack_lo[i], d.d_nu[i]);
    limit(s.mult_hi[i], d.d_mult_hi[i]);
    limit(s.mult_lo[i], d.d_mult_lo[i]);
  }
  return step;
}

IpmState advance(const IpmState& s, const NewtonDirection& d, double step) {
  IpmState out = s;
  for (std::size_t i = 0; i < s.slack_hi.size(); ++i) {
    out.slack_hi[i] -= step * d.d_nu[i];
    out.slack_lo[i] += step * d.d_nu[i];
    out.mult_hi[i] += step * d.d_mult_hi[i];
    out.mult_lo[i] += step * d.d_mult_lo[i];
  }
  return out;
}

bool strictly_positive(const IpmState& s) {
  for (std::size_t i = 0; i < s.slack_hi.size(); ++i) {
    if (!(s.slack_hi[i] > 0.0 && s.slack_lo[i] > 0.0 && s.mult_hi[i] > 0.0 && s.mult_lo[i] > 0.0)) {
      return false;
    }
  }
  return true;
}

}  // namespace

double BoxQP::objective(std::span<const double> nu) const {
  const auto qn = hessian.multiply(nu);
  double f = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) f += 0.5 * nu[i] * qn[i] - linear[i] * nu[i];
  return f;
}

void BoxQP::validate() const {
  if (hessian.size() != linear.size() || linear.size() != upper.size()) {
    throw DimensionError("box QP: Q, r and bounds must share one dimension");
  }
  for (double u : upper) {
    if (!(u > 0.0) || !std::isfinite(u)) throw InvalidArgument("box QP: bounds must be positive and finite");
  }
}

std::vector<double> IpmState::nu() const {
  std::vector<double> v(slack_hi.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (slack_lo[i] - slack_hi[i]);
  return v;
}

double IpmState::surrogate_gap() const {
  double g = 0.0;
  for (std::size_t i = 0; i < slack_hi.size(); ++i) g += slack_hi[i] * mult_hi[i] + slack_lo[i] * mult_lo[i];
  return g;
}

IpmState IpmState::from_dual(const BoxQP& problem, std::span<const double> nu,
                             std::span<const double> mult_hi, std::span<const double> mult_lo) {
  const std::size_t m = problem.size();
  if (nu.size() != m || mult_hi.size() != m || mult_lo.size() != m) {
    throw DimensionError("IpmState::from_dual: size mismatch");
  }
  IpmState s;
  s.slack_hi.resize(m);
  s.slack_lo.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.slack_hi[i] = problem.upper[i] - nu[i];
    s.slack_lo[i] = problem.upper[i] + nu[i];
  }
  s.mult_hi.assign(mult_hi.begin(), mult_hi.end());
  s.mult_lo.assign(mult_lo.begin(), mult_lo.end());
  return s;
}

double KktResidual::norm2() const {
  double s = 0.0;
  for (const auto* v : {&dual, &cent_hi, &cent_lo}) {
    for (double x : *v) s += x * x;
  }
  return std::sqrt(s);
}

double KktResidual::dual_inf() const { return inf_norm(dual); }

KktResidual kkt_residual(const BoxQP& problem, const IpmState& state, double tau) {
  const std::size_t m = problem.size();
  KktResidual r;
  r.dual = problem.hessian.multiply(state.nu());
  r.cent_hi.resize(m);
  r.cent_lo.resize(m);
  const double inv_tau = 1.0 / tau;
  for (std::size_t i = 0; i < m; ++i) {
    r.dual[i] += state.mult_hi[i] - state.mult_lo[i] - problem.linear[i];
    r.cent_hi[i] = state.mult_hi[i] * state.slack_hi[i] - inv_tau;
    r.cent_lo[i] = state.mult_lo[i] * state.slack_lo[i] - inv_tau;
  }
  return r;
}

KktResidual kkt_jacobian_apply(const BoxQP& problem, const IpmState& state,
                               const NewtonDirection& d) {
  const std::size_t m = problem.size();
  KktResidual j;
  j.dual = problem.hessian.multiply(d.d_nu);
  j.cent_hi.resize(m);
  j.cent_lo.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    j.dual[i] += d.d_mult_hi[i] - d.d_mult_lo[i];
    // slack_hi = upper - nu, slack_lo = upper + nu
    j.cent_hi[i] = -state.mult_hi[i] * d.d_nu[i] + state.slack_hi[i] * d.d_mult_hi[i];
    j.cent_lo[i] = state.mult_lo[i] * d.d_nu[i] + state.slack_lo[i] * d.d_mult_lo[i];
  }
  return j;
}

NewtonDirection newton_step(const BoxQP& problem, const IpmState& state, double tau) {
  const std::size_t m = problem.size();
  const KktResidual r = kkt_residual(problem, state, tau);

  // Eliminating the multiplier rows:
  //   d_mult_hi = (mult_hi * d_nu - cent_hi) / slack_hi
  //   d_mult_lo = (-mult_lo * d_nu - cent_lo) / slack_lo
  // leaves (Q + diag(mult_hi/slack_hi + mult_lo/slack_lo)) d_nu = rhs.
  BandedSymMatrix system = problem.hessian;
  std::vector<double> diag(m);
  std::vector<double> rhs(m);
  const double inv_tau = 1.0 / tau;
  for (std::size_t i = 0; i < m; ++i) {
    const double sh = state.slack_hi[i];
    const double sl = state.slack_lo[i];
    diag[i] = state.mult_hi[i] / sh + state.mult_lo[i] / sl;
    // cent_hi / slack_hi written without cancellation.
    const double ch = state.mult_hi[i] - inv_tau / sh;
    const double cl = state.mult_lo[i] - inv_tau / sl;
    rhs[i] = -r.dual[i] + ch - cl;
  }
  system.add_to_diagonal(diag);

  NewtonDirection d;
  d.d_nu = BandCholesky(system).solve(rhs);
  d.d_mult_hi.resize(m);
  d.d_mult_lo.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    d.d_mult_hi[i] = (state.mult_hi[i] * d.d_nu[i] - r.cent_hi[i]) / state.slack_hi[i];
    d.d_mult_lo[i] = (-state.mult_lo[i] * d.d_nu[i] - r.cent_lo[i]) / state.slack_lo[i];
  }
  return d;
}

IpmSolution solve_box_qp(const BoxQP& problem, const IpmOptions& options) {
  problem.validate();
  if (!(options.tolerance > 0.0)) throw InvalidArgument("solve_box_qp: tolerance must be positive");
  if (options.max_iterations < 0) throw InvalidArgument("solve_box_qp: max_iterations must be >= 0");

  const std::size_t m = problem.size();
  IpmSolution sol;
  if (m == 0) {
    sol.converged = true;
    return sol;
  }

  if (options.try_unconstrained) {
    try {
      auto nu = band_solve(problem.hessian, problem.linear);
      bool inside = true;
      for (std::size_t i = 0; i < m && inside; ++i) inside = std::abs(nu[i]) <= problem.upper[i];
      if (inside) {
        auto qn = problem.hessian.multiply(nu);
        for (std::size_t i = 0; i < m; ++i) qn[i] -= problem.linear[i];
        sol.kkt_residual = inf_norm(qn);
        if (sol.kkt_residual <= options.tolerance) {
          sol.nu = std::move(nu);
          sol.converged = true;
          return sol;
        }
      }
    } catch (const NotPositiveDefinite&) {
      // Singular Q: fall through to the interior-point iteration.
    }
  }

  IpmState state;
  state.slack_hi = problem.upper;
  state.slack_lo = problem.upper;
  state.mult_hi.assign(m, 1.0);
  state.mult_lo.assign(m, 1.0);

  double tau = 0.0;
  int iter = 0;
  for (; iter <= options.max_iterations; ++iter) {
    const double gap = state.surrogate_gap();
    sol.gap_history.push_back(gap);
    const KktResidual base = kkt_residual(problem, state, 1.0);
    if (gap <= options.tolerance && base.dual_inf() <= options.tolerance) {
      sol.converged = true;
      break;
    }
    if (iter == options.max_iterations) break;

    tau = std::max(tau, kBarrierFactor * 2.0 * static_cast<double>(m) / gap);
    const NewtonDirection dir = newton_step(problem, state, tau);
    const double merit = kkt_residual(problem, state, tau).norm2();

    double step = max_feasible_step(state, dir);
    bool accepted = false;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      IpmState trial = advance(state, dir, step);
      if (strictly_positive(trial) &&
          kkt_residual(problem, trial, tau).norm2() <= (1.0 - kArmijo * step) * merit) {
        state = std::move(trial);
        accepted = true;
        break;
      }
      step *= kBacktrack;
    }
    if (!accepted) break;  // stalled at the precision floor
  }

  sol.iterations = iter;
  sol.nu = state.nu();
  for (std::size_t i = 0; i < m; ++i) sol.nu[i] = std::clamp(sol.nu[i], -problem.upper[i], problem.upper[i]);
  sol.duality_gap = state.surrogate_gap();
  sol.kkt_residual = kkt_residual(problem, state, 1.0).dual_inf();
  for (std::size_t i = 0; i < m; ++i) {
    sol.complementarity = std::max({sol.complementarity, state.slack_hi[i] * state.mult_hi[i],
                                    state.slack_lo[i] * state.mult_lo[i]});
  }
  return sol;
}

}  // namespace l1trend
