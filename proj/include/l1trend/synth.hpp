#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace l1trend {

/// Parameters of the four regime-switching test models.
///
/// The regime variable (slope for models 1-2, level for models 3-4) keeps its
/// value with probability `p` at each step and is otherwise redrawn as
/// b * (U[0,1] - 1/2).
struct ModelParams {
  std::size_t n = 2000;
  double p = 0.99;
  double b = 0.5;
  double sigma = 15.0;
  /// Mean-reversion speed, model 4 only.
  double theta = 0.1;
  std::uint64_t seed = 1;

  void validate(int model) const;
};

/// Reference parameters for each model (n = 2000).
ModelParams paper_params(int model);

struct SimulatedPath {
  /// Noise-free component: the piecewise-linear trend (model 1), the
  /// cumulated drift (model 2), the piecewise-constant level (models 3, 4).
  std::vector<double> trend;
  std::vector<double> observed;
  /// Number of regime redraw events.
  std::size_t regime_changes = 0;
};

/// Straight trend lines plus white noise.
SimulatedPath simulate_model1(const ModelParams& params);
/// Random walk with a regime-switching drift.
SimulatedPath simulate_model2(const ModelParams& params);
/// Step levels plus white noise.
SimulatedPath simulate_model3(const ModelParams& params);
/// Ornstein-Uhlenbeck process reverting to a regime-switching level.
SimulatedPath simulate_model4(const ModelParams& params);

SimulatedPath simulate_model(int model, const ModelParams& params);

}  // namespace l1trend
