#pragma once

#include "avlt/core.hpp"

#include <functional>

namespace avlt {

using ScalarFn = std::function<double(const Eigen::ArrayXd&)>;

inline constexpr double kGradCheckStep = 1e-3;

// Central-difference gradient estimate over every coordinate.
Eigen::ArrayXd finite_diff_grad(const ScalarFn& objective, const Eigen::ArrayXd& x,
                                double h = kGradCheckStep);

// Central-difference estimate of a single partial derivative.
double finite_diff_partial(const ScalarFn& objective, const Eigen::ArrayXd& x, Eigen::Index i,
                           double h = kGradCheckStep);

// Relative agreement test with a small absolute floor for near-zero entries.
bool grad_close(double analytic, double numeric, double rel_tol = 1e-4, double abs_floor = 1e-6);

}  // namespace avlt
