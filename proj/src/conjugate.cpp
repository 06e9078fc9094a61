#include "bpr/conjugate.hpp"

#include <cmath>
#include <sstream>

#include "bpr/errors.hpp"
#include "bpr/rng.hpp"

namespace bpr {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

// Solve A X = B for symmetric positive-definite A via Cholesky.
Eigen::MatrixXd spd_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(a));
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": matrix not positive definite");
  return llt.solve(b);
}

}  // namespace

Eigen::MatrixXd gprior_covariance(const Dataset& d, double g) {
  d.validate();
  if (!(g > 0.0)) throw ConfigError("gprior_covariance: g must be positive");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
  if (qr.rank() < d.p()) {
    std::ostringstream msg;
    msg << "gprior_covariance: X^T X is rank deficient (rank " << qr.rank()
        << " < p " << d.p() << "); g-prior undefined";
    throw NumericalError(msg.str());
  }
  Eigen::MatrixXd xtx = symmetrized(d.X.transpose() * d.X);
  Eigen::MatrixXd inv =
      spd_solve(xtx, Eigen::MatrixXd::Identity(d.p(), d.p()), "gprior_covariance");
  return symmetrized(g * inv);
}

GaussianPrior gprior_or_ridge(const Dataset& d, double g, double a, double b) {
  GaussianPrior prior;
  prior.a = a;
  prior.b = b;
  try {
    prior.sigma = gprior_covariance(d, g);
  } catch (const NumericalError&) {
    prior.sigma = g * Eigen::MatrixXd::Identity(d.p(), d.p());
  }
  return prior;
}

TPosterior posterior_t_params(const Dataset& d, const GaussianPrior& prior) {
  d.validate();
  const Eigen::Index n = d.n(), p = d.p();
  if (prior.sigma.rows() != p || prior.sigma.cols() != p)
    throw ConfigError("posterior_t_params: prior covariance dimension mismatch");
  if (!(prior.a > 0.0) || !(prior.b > 0.0))
    throw ConfigError("posterior_t_params: a and b must be positive");

  Eigen::MatrixXd sigma_inv = spd_solve(
      prior.sigma, Eigen::MatrixXd::Identity(p, p), "posterior_t_params(prior)");
  sigma_inv = symmetrized(sigma_inv);
  Eigen::MatrixXd m = symmetrized(sigma_inv + d.X.transpose() * d.X);

  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("posterior_t_params: sigma^{-1} + X^T X is singular");

  Eigen::VectorXd xty = d.X.transpose() * d.y;
  Eigen::VectorXd mu = llt.solve(xty);

  double dof = static_cast<double>(n) + 2.0 * prior.a;
  Eigen::VectorXd resid = d.y - d.X * mu;
  double scale_num = 2.0 * prior.b + resid.squaredNorm() +
                     mu.dot(sigma_inv * mu);
  Eigen::MatrixXd m_inv = llt.solve(Eigen::MatrixXd::Identity(p, p));

  TPosterior post;
  post.mu_tilde = std::move(mu);
  post.sigma_tilde = symmetrized((scale_num / dof) * m_inv);
  post.dof = dof;
  return post;
}

Eigen::VectorXd conjugate_predict(const TPosterior& post,
                                  const Eigen::MatrixXd& x_new) {
  if (x_new.cols() != post.mu_tilde.size())
    throw ConfigError("conjugate_predict: column count mismatch");
  return x_new * post.mu_tilde;
}

double t_posterior_log_density_1d(const TPosterior& post, double beta) {
  if (post.mu_tilde.size() != 1)
    throw ConfigError("t_posterior_log_density_1d: posterior is not 1-D");
  const double nu = post.dof;
  const double s2 = post.sigma_tilde(0, 0);
  const double z = (beta - post.mu_tilde(0));
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * M_PI * s2) -
         0.5 * (nu + 1.0) * std::log1p(z * z / (nu * s2));
}

}  // namespace bpr
