#pragma once

#include <Eigen/Dense>

#include "bpr/dataset.hpp"

namespace bpr {

// Zero-mean Gaussian prior on the coefficients: beta | sigma2 has
// covariance sigma2 * sigma, with sigma2 ~ InvGamma(a, b).
struct GaussianPrior {
  Eigen::MatrixXd sigma;  // p x p symmetric positive definite
  double a = 0.01;
  double b = 0.01;
};

// Parameters of the closed-form multivariate Student-t marginal of beta.
struct TPosterior {
  Eigen::VectorXd mu_tilde;
  Eigen::MatrixXd sigma_tilde;
  double dof = 0.0;  // N + 2a
};

// g * (X^T X)^{-1}.  Throws NumericalError when X^T X is rank deficient
// (the g-prior is undefined there; callers fall back to sigma = g*I).
Eigen::MatrixXd gprior_covariance(const Dataset& d, double g);

// g-prior covariance when X has full column rank, otherwise the ridge-style
// fallback g*I.
GaussianPrior gprior_or_ridge(const Dataset& d, double g, double a = 0.01,
                              double b = 0.01);

// Exact Student-t marginal posterior:
//   M         = sigma^{-1} + X^T X
//   mu_tilde  = M^{-1} X^T y
//   scale     = (2b + |y - X mu|^2 + mu^T sigma^{-1} mu) / (N + 2a) * M^{-1}
//   dof       = N + 2a
// The scale numerator is the complete-the-square constant written as a sum
// of nonnegative terms; it equals 2b + y^T y - mu^T M mu.
TPosterior posterior_t_params(const Dataset& d, const GaussianPrior& prior);

// Posterior predictive mean X_new * mu_tilde.
Eigen::VectorXd conjugate_predict(const TPosterior& post,
                                  const Eigen::MatrixXd& x_new);

// Log density of the univariate Student-t marginal implied by a p=1
// TPosterior, used by density checks and diagnostics.
double t_posterior_log_density_1d(const TPosterior& post, double beta);

}  // namespace bpr
