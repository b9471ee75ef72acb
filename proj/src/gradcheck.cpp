#include "avlt/gradcheck.hpp"

#include <cmath>

namespace avlt {

double finite_diff_partial(const ScalarFn& objective, const Eigen::ArrayXd& x, Eigen::Index i,
                           double h) {
  if (h <= 0.0) throw InvalidArgument("finite_diff: step must be positive");
  Eigen::ArrayXd probe = x;
  probe[i] = x[i] + h;
  const double plus = objective(probe);
  probe[i] = x[i] - h;
  const double minus = objective(probe);
  if (!std::isfinite(plus) || !std::isfinite(minus)) {
    throw NumericalError("finite_diff: objective not finite at probe point");
  }
  return (plus - minus) / (2.0 * h);
}

Eigen::ArrayXd finite_diff_grad(const ScalarFn& objective, const Eigen::ArrayXd& x, double h) {
  Eigen::ArrayXd grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    grad[i] = finite_diff_partial(objective, x, i, h);
  }
  return grad;
}

bool grad_close(double analytic, double numeric, double rel_tol, double abs_floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
  return std::abs(analytic - numeric) <= rel_tol * scale;
}

}  // namespace avlt
