#include "l1trend/synth.hpp"

#include <random>
#include <string>

#include "l1trend/error.hpp"

namespace l1trend {
namespace {

// Two independent mt19937_64 streams per simulation: one drives regime
// persistence and redraws, the other the Gaussian noise. Changing sigma
// therefore leaves the regime path untouched.
constexpr std::uint32_t kRegimeStream = 1;
constexpr std::uint32_t kNoiseStream = 2;

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

class Regime {
 public:
  Regime(const ModelParams& p) : rng_(make_stream(p.seed, kRegimeStream)), p_(p.p), b_(p.b) {}

  double draw() { return b_ * (unif_(rng_) - 0.5); }

  // Returns true when the regime variable is redrawn at this step.
  bool switches() { return unif_(rng_) >= p_; }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  double p_;
  double b_;
};

class Noise {
 public:
  Noise(const ModelParams& p) : rng_(make_stream(p.seed, kNoiseStream)), sigma_(p.sigma) {}
  double operator()() { return sigma_ == 0.0 ? 0.0 : sigma_ * normal_(rng_); }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double sigma_;
};

}  // namespace

void ModelParams::validate(int model) const {
  if (model < 1 || model > 4) throw InvalidArgument("model must be 1, 2, 3 or 4");
  if (n < 1) throw InvalidArgument("model length n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("persistence p must lie in [0, 1]");
  if (!(sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  if (!(b >= 0.0)) throw InvalidArgument("draw scale b must be >= 0");
  if (model == 4 && !(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in (0, 1]");
}

ModelParams paper_params(int model) {
  ModelParams p;
  switch (model) {
    case 1: p.p = 0.99; p.b = 0.5; p.sigma = 15.0; break;
    case 2: p.p = 0.993; p.b = 5.0; p.sigma = 15.0; break;
    case 3: p.p = 0.998; p.b = 50.0; p.sigma = 8.0; break;
    case 4: p.p = 0.9985; p.b = 20.0; p.sigma = 2.0; p.theta = 0.1; break;
    default: throw InvalidArgument("model must be 1, 2, 3 or 4");
  }
  return p;
}

SimulatedPath simulate_model1(const ModelParams& params) {
  params.validate(1);
  Regime regime(params);
  Noise noise(params);
  SimulatedPath out;
  out.trend.resize(params.n);
  out.observed.resize(params.n);
  double slope = regime.draw();
  double level = 0.0;
  for (std::size_t t = 0; t < params.n; ++t) {
    if (t > 0) {
      if (regime.switches()) {
        slope = regime.draw();
        ++out.regime_changes;
      }
      level += slope;
    }
    out.trend[t] = level;
    out.observed[t] = level + noise();
  }
  return out;
}

SimulatedPath simulate_model2(const ModelParams& params) {
  params.validate(2);
  Regime regime(params);
  Noise noise(params);
  SimulatedPath out;
  out.trend.resize(params.n);
  out.observed.resize(params.n);
  double drift = regime.draw();
  for (std::size_t t = 1; t < params.n; ++t) {
    if (regime.switches()) {
      drift = regime.draw();
      ++out.regime_changes;
    }
    out.trend[t] = out.trend[t - 1] + drift;
    out.observed[t] = out.observed[t - 1] + drift + noise();
  }
  return out;
}

SimulatedPath simulate_model3(const ModelParams& params) {
  params.validate(3);
  Regime regime(params);
  Noise noise(params);
  SimulatedPath out;
  out.trend.resize(params.n);
  out.observed.resize(params.n);
  double level = regime.draw();
  for (std::size_t t = 0; t < params.n; ++t) {
    if (t > 0 && regime.switches()) {
      level = regime.draw();
      ++out.regime_changes;
    }
    out.trend[t] = level;
    out.observed[t] = level + noise();
  }
  return out;
}

SimulatedPath simulate_model4(const ModelParams& params) {
  params.validate(4);
  Regime regime(params);
  Noise noise(params);
  SimulatedPath out;
  out.trend.resize(params.n);
  out.observed.resize(params.n);
  double mean = regime.draw();
  out.trend[0] = mean;
  for (std::size_t t = 1; t < params.n; ++t) {
    if (regime.switches()) {
      mean = regime.draw();
      ++out.regime_changes;
    }
    out.trend[t] = mean;
    const double prev = out.observed[t - 1];
    out.observed[t] = (1.0 - params.theta) * prev + params.theta * mean + noise();
  }
  return out;
}

SimulatedPath simulate_model(int model, const ModelParams& params) {
  switch (model) {
    case 1: return simulate_model1(params);
    case 2: return simulate_model2(params);
    case 3: return simulate_model3(params);
    case 4: return simulate_model4(params);
    default: throw InvalidArgument("model must be 1, 2, 3 or 4, got " + std::to_string(model));
  }
}

}  // namespace l1trend
