#pragma once

#include <Eigen/Dense>

#include "bpr/dataset.hpp"

namespace bpr {

struct FitResult {
  Eigen::VectorXd beta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimum-norm least squares (complete orthogonal decomposition, so rank
// deficiency is handled without error).
FitResult fit_ols(const Dataset& d);

// minimize 0.5*|y - X b|^2 + lambda * sum |b_j|
// via cyclic coordinate descent with soft thresholding.  lambda = 0 returns
// the least-squares fit.  warm_start, when given, seeds the iteration
// (used by the regularization-path cross-validation loop).
FitResult fit_lasso_map(const Dataset& d, double lambda,
                        const Eigen::VectorXd* warm_start = nullptr);

// minimize 0.5*|y - X b|^2 + lambda1 * sum |b_j| + 0.5*lambda2 * b^T b
FitResult fit_enet_map(const Dataset& d, double lambda1, double lambda2,
                       const Eigen::VectorXd* warm_start = nullptr);

// minimize 0.5*|y - X b|^2 + lambda * sum |b_j|^q, q in (1,2),
// by damped Newton-Raphson.  The singular curvature |b|^{q-2} at zero is
// capped with (|b|+1e-8)^{q-2}; the gradient is exact, so this caps the
// step size without changing the optimum.  Non-convergence is reported via
// converged = false rather than thrown.
FitResult fit_lq_map(const Dataset& d, double lambda, double q,
                     const Eigen::VectorXd* warm_start = nullptr);

}  // namespace bpr
