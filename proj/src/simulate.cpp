#include "bpr/simulate.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "bpr/errors.hpp"
#include "bpr/rng.hpp"

namespace bpr {

SimConfig SimConfig::defaults(Eigen::Index p) {
  SimConfig cfg;
  cfg.p = p;
  cfg.beta_true = Eigen::VectorXd::Zero(p);
  const double first_six[6] = {0.5, -0.5, 0.5, 0.5, -0.5, -0.5};
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(6, p); ++j)
    cfg.beta_true(j) = first_six[j];
  cfg.corr_pairs = {{3, 4, 0.85}, {5, 6, 0.95}};
  return cfg;
}

Eigen::MatrixXd SimConfig::covariance() const {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(p, p);
  for (const auto& pr : corr_pairs) {
    cov(pr.i - 1, pr.j - 1) = pr.rho;
    cov(pr.j - 1, pr.i - 1) = pr.rho;
  }
  return cov;
}

void SimConfig::validate() const {
  if (n_train < 1 || n_test < 0 || p < 1)
    throw ConfigError("SimConfig: sizes must be positive");
  if (beta_true.size() != p)
    throw ConfigError("SimConfig: beta_true length must equal p");
  if (!(noise_sd > 0.0)) throw ConfigError("SimConfig: noise_sd must be > 0");
  std::set<int> used;
  for (const auto& pr : corr_pairs) {
    if (pr.i < 1 || pr.i > p || pr.j < 1 || pr.j > p || pr.i == pr.j) {
      std::ostringstream msg;
      msg << "SimConfig: bad pair (" << pr.i << "," << pr.j << ")";
      throw ConfigError(msg.str());
    }
    if (!used.insert(pr.i).second || !used.insert(pr.j).second)
      throw ConfigError("SimConfig: pair indices must be distinct");
    if (!(std::abs(pr.rho) < 1.0))
      throw ConfigError("SimConfig: |rho| must be < 1");
  }
}

SimData simulate_dataset(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Eigen::MatrixXd cov = cfg.covariance();
  Eigen::MatrixXd chol = cholesky_lower(cov);  // PD checked here

  RngStream rng(seed, StreamKind::Simulation, 0);
  auto draw = [&](Eigen::Index n) {
    Dataset d;
    d.X.resize(n, cfg.p);
    d.y.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      Eigen::VectorXd z(cfg.p);
      for (Eigen::Index j = 0; j < cfg.p; ++j) z(j) = rng.normal();
      d.X.row(r) = (chol * z).transpose();
      d.y(r) = d.X.row(r).dot(cfg.beta_true) + cfg.noise_sd * rng.normal();
    }
    return d;
  };
  SimData out;
  out.train = draw(cfg.n_train);
  out.test = draw(cfg.n_test);
  out.beta_true = cfg.beta_true;
  return out;
}

}  // namespace bpr
