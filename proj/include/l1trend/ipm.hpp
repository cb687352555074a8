#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "l1trend/banded.hpp"

namespace l1trend {

/// minimize 1/2 nu^T Q nu - r^T nu  subject to  -upper <= nu <= upper.
struct BoxQP {
  BandedSymMatrix hessian;
  std::vector<double> linear;
  std::vector<double> upper;

  std::size_t size() const { return linear.size(); }
  double objective(std::span<const double> nu) const;
  /// Throws DimensionError / InvalidArgument on malformed input.
  void validate() const;
};

struct IpmOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  /// Solve Q nu = r first and return it when it already lies in the box.
  bool try_unconstrained = true;
};

struct IpmSolution {
  std::vector<double> nu;
  int iterations = 0;
  /// Surrogate gap: sum of slack * multiplier products.
  double duality_gap = 0.0;
  /// Infinity norm of Q nu - r + mult_hi - mult_lo.
  double kkt_residual = 0.0;
  /// Largest slack * multiplier product at exit.
  double complementarity = 0.0;
  bool converged = false;
  /// Surrogate gap at the start of every iteration.
  std::vector<double> gap_history;
};

/// Primal-dual iterate. The dual variable is carried through its two slacks
/// (slack_hi = upper - nu, slack_lo = upper + nu) so that slacks near an
/// active bound keep full relative precision; nu is recovered as
/// (slack_lo - slack_hi) / 2.
struct IpmState {
  std::vector<double> slack_hi;
  std::vector<double> slack_lo;
  std::vector<double> mult_hi;
  std::vector<double> mult_lo;

  std::vector<double> nu() const;
  double surrogate_gap() const;

  static IpmState from_dual(const BoxQP& problem, std::span<const double> nu,
                            std::span<const double> mult_hi, std::span<const double> mult_lo);
};

/// Residual r_tau of the perturbed KKT system in the variables
/// (nu, mult_hi, mult_lo):
///   dual    = Q nu - r + mult_hi - mult_lo
///   cent_hi = mult_hi * slack_hi - 1/tau
///   cent_lo = mult_lo * slack_lo - 1/tau
struct KktResidual {
  std::vector<double> dual;
  std::vector<double> cent_hi;
  std::vector<double> cent_lo;

  double norm2() const;
  double dual_inf() const;
};

struct NewtonDirection {
  std::vector<double> d_nu;
  std::vector<double> d_mult_hi;
  std::vector<double> d_mult_lo;
};

KktResidual kkt_residual(const BoxQP& problem, const IpmState& state, double tau);

/// Jacobian-vector product of r_tau with respect to (nu, mult_hi, mult_lo).
KktResidual kkt_jacobian_apply(const BoxQP& problem, const IpmState& state,
                               const NewtonDirection& direction);

/// Newton direction for r_tau = 0. The multiplier rows are eliminated, leaving
/// one banded solve with Q + diag(mult_hi/slack_hi + mult_lo/slack_lo).
/// Throws NotPositiveDefinite if that system breaks down.
NewtonDirection newton_step(const BoxQP& problem, const IpmState& state, double tau);

/// Primal-dual interior-point method. On non-convergence the last iterate is
/// returned with converged = false.
IpmSolution solve_box_qp(const BoxQP& problem, const IpmOptions& options = {});

}  // namespace l1trend
