#pragma once

#include "avlt/core.hpp"

#include <Eigen/Dense>

namespace avlt {

enum class OptimizerKind { SGD, RMSProp, Adam };

// Per-variable optimizer state. Moments are lazily sized on the first step.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::Adam;
  long step_count = 0;
  Eigen::ArrayXd first_moment;
  Eigen::ArrayXd second_moment;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double rho = 0.9;       // RMSProp decay
  double floor = 1e-8;

  static OptimizerState make(OptimizerKind kind) {
    OptimizerState s;
    s.kind = kind;
    return s;
  }
};

// One descent step: moves `variable` opposite the (moment-adjusted) gradient
// and advances the state. SGD is exactly variable - eta * grad.
Eigen::ArrayXd optimizer_step(OptimizerState& state, const Eigen::ArrayXd& variable,
                              const Eigen::ArrayXd& grad, double eta);

OptimizerKind optimizer_kind_from_string(const std::string& name);
std::string to_string(OptimizerKind kind);

// Random start for an attack: clip(x + delta), delta ~ U[-bound, bound]
// per coordinate, deterministic in the seed.
Image random_start(const Image& x, double bound, std::uint64_t seed);

}  // namespace avlt
