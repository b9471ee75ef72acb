#include "avlt/optim.hpp"

#include <doctest.h>

#include <cmath>

using namespace avlt;

namespace {

Eigen::ArrayXd scalar(double v) { return Eigen::ArrayXd::Constant(1, v); }

}  // namespace

TEST_CASE("sgd step is exactly variable - eta * grad") {
  auto s = OptimizerState::make(OptimizerKind::SGD);
  const Eigen::ArrayXd out = optimizer_step(s, scalar(1.0), scalar(0.5), 1.0);
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("adam first step moves by ~eta regardless of gradient scale") {
  // Bias correction makes m_hat = g and v_hat = g^2 at t = 1, so the step is
  // eta * g / (|g| + floor) ~= eta * sign(g).
  auto s = OptimizerState::make(OptimizerKind::Adam);
  const Eigen::ArrayXd out = optimizer_step(s, scalar(0.0), scalar(2.0), 1.0);
  CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-6));

  auto s2 = OptimizerState::make(OptimizerKind::Adam);
  const Eigen::ArrayXd out2 = optimizer_step(s2, scalar(0.0), scalar(1e-3), 1.0);
  CHECK(out2[0] == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("rmsprop first step divides by sqrt((1 - rho) g^2)") {
  // v = 0.1 * 1^2, step = 0.1 * 1 / sqrt(0.1) ~= 0.3162277.
  auto s = OptimizerState::make(OptimizerKind::RMSProp);
  const Eigen::ArrayXd out = optimizer_step(s, scalar(0.0), scalar(1.0), 0.1);
  CHECK(out[0] == doctest::Approx(-0.1 / std::sqrt(0.1)).epsilon(1e-6));
}

TEST_CASE("optimizer_step validates inputs") {
  auto s = OptimizerState::make(OptimizerKind::SGD);
  CHECK_THROWS_AS(optimizer_step(s, scalar(0.0), Eigen::ArrayXd::Zero(2), 1.0), InvalidArgument);
  CHECK_THROWS_AS(optimizer_step(s, scalar(0.0), scalar(1.0), 0.0), InvalidArgument);
  Eigen::ArrayXd bad = scalar(std::nan(""));
  CHECK_THROWS_AS(optimizer_step(s, scalar(0.0), bad, 1.0), NumericalError);
}

TEST_CASE("optimizer kind round-trips through strings") {
  for (auto k : {OptimizerKind::SGD, OptimizerKind::RMSProp, OptimizerKind::Adam}) {
    CHECK(optimizer_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(optimizer_kind_from_string("adamw"), InvalidArgument);
}

TEST_CASE("random_start stays near the source and inside the pixel box") {
  const Image x = make_image(128.0);
  const Image y = random_start(x, 20.0, 7);
  CHECK((y - x).abs().maxCoeff() <= 20.0);
  CHECK(y.minCoeff() >= 0.0);
  CHECK(y.maxCoeff() <= 255.0);
  // Something must actually move.
  CHECK((y - x).abs().maxCoeff() > 1.0);
}

TEST_CASE("random_start is deterministic in the seed") {
  const Image x = make_image(10.0);
  const Image a = random_start(x, 20.0, 42);
  const Image b = random_start(x, 20.0, 42);
  const Image c = random_start(x, 20.0, 43);
  CHECK((a - b).abs().maxCoeff() == 0.0);
  CHECK((a - c).abs().maxCoeff() > 0.0);
  // Clipping at the box edge.
  CHECK(a.minCoeff() >= 0.0);
  CHECK_THROWS_AS(random_start(x, 0.0, 1), InvalidArgument);
}
