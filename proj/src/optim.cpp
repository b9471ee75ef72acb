#include "avlt/optim.hpp"

#include <cmath>

namespace avlt {

Eigen::ArrayXd optimizer_step(OptimizerState& state, const Eigen::ArrayXd& variable,
                              const Eigen::ArrayXd& grad, double eta) {
  if (grad.size() != variable.size()) {
    throw InvalidArgument("optimizer_step: gradient shape does not match variable");
  }
  if (eta <= 0.0) {
    throw InvalidArgument("optimizer_step: learning rate must be positive");
  }
  if (!grad.isFinite().all()) {
    throw NumericalError("optimizer_step: non-finite gradient");
  }

  if (state.kind != OptimizerKind::SGD && state.first_moment.size() != variable.size()) {
    state.first_moment = Eigen::ArrayXd::Zero(variable.size());
    state.second_moment = Eigen::ArrayXd::Zero(variable.size());
  }
  ++state.step_count;

  switch (state.kind) {
    case OptimizerKind::SGD:
      return variable - eta * grad;
    case OptimizerKind::RMSProp: {
      state.second_moment = state.rho * state.second_moment + (1.0 - state.rho) * grad.square();
      return variable - eta * grad / (state.second_moment.sqrt() + state.floor);
    }
    case OptimizerKind::Adam: {
      state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * grad;
      state.second_moment = state.beta2 * state.second_moment + (1.0 - state.beta2) * grad.square();
      const double t = static_cast<double>(state.step_count);
      const Eigen::ArrayXd m_hat = state.first_moment / (1.0 - std::pow(state.beta1, t));
      const Eigen::ArrayXd v_hat = state.second_moment / (1.0 - std::pow(state.beta2, t));
      return variable - eta * m_hat / (v_hat.sqrt() + state.floor);
    }
  }
  throw InvalidArgument("optimizer_step: unknown optimizer kind");
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::SGD;
  if (name == "rmsprop") return OptimizerKind::RMSProp;
  if (name == "adam") return OptimizerKind::Adam;
  throw InvalidArgument("unknown optimizer: " + name);
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::SGD: return "sgd";
    case OptimizerKind::RMSProp: return "rmsprop";
    case OptimizerKind::Adam: return "adam";
  }
  return "?";
}

Image random_start(const Image& x, double bound, std::uint64_t seed) {
  if (bound <= 0.0) {
    throw InvalidArgument("random_start: bound must be positive");
  }
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> uni(-bound, bound);
  Image out = x;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] += uni(rng);
  }
  return clip_pixels(out);
}

}  // namespace avlt
