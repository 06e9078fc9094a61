#include "bpr/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "bpr/errors.hpp"

namespace bpr {

void ChainConfig::validate() const {
  if (n_iter < 1) throw ConfigError("ChainConfig: n_iter must be >= 1");
  if (n_burn < 0 || n_burn >= n_iter)
    throw ConfigError("ChainConfig: need 0 <= n_burn < n_iter");
  if (thin < 1) throw ConfigError("ChainConfig: thin must be >= 1");
  if (kept() < 1) throw ConfigError("ChainConfig: no kept draws");
  if (init_sigma2 && !(*init_sigma2 > 0.0))
    throw ConfigError("ChainConfig: init_sigma2 must be positive");
}

McmcKernel::McmcKernel(const Dataset& d, const PriorSpec& prior)
    : d_(d), prior_(prior) {
  d_.validate();
  prior_.validate();
  if (prior_.kind() == PriorKind::GPrior)
    throw ConfigError("McmcKernel: the Gaussian prior has a closed form; no sampler");
  xtx_ = d_.X.transpose() * d_.X;
  xtx_ = 0.5 * (xtx_ + xtx_.transpose()).eval();
  xty_ = d_.X.transpose() * d_.y;

  if (prior_.kind() == PriorKind::Lq) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(d_.X);
    beta_hat_ = cod.solve(d_.y);
    Eigen::MatrixXd p_mat = xtx_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d_.X);
    if (qr.rank() < d_.p()) {
      // The independence proposal needs an invertible covariance; ridge
      // the precision and account for it exactly in the MH ratio.
      p_mat += 1e-6 * Eigen::MatrixXd::Identity(d_.p(), d_.p());
      proposal_ridged_ = true;
    }
    proposal_chol_ = cholesky_lower(p_mat);
  }
}

McmcState McmcKernel::initial_state(const ChainConfig& cfg) const {
  McmcState s;
  if (cfg.init_beta) {
    if (cfg.init_beta->size() != d_.p())
      throw ConfigError("ChainConfig: init_beta length mismatch");
    s.beta = *cfg.init_beta;
  } else {
    // ridge start keeps the chain in a region of nonnegligible mass
    Eigen::MatrixXd a = xtx_ + Eigen::MatrixXd::Identity(d_.p(), d_.p());
    s.beta = a.llt().solve(xty_);
  }
  if (cfg.init_sigma2) {
    s.sigma2 = *cfg.init_sigma2;
  } else {
    double rss = (d_.y - d_.X * s.beta).squaredNorm();
    s.sigma2 = std::max(rss / static_cast<double>(d_.n()), 1e-8);
  }
  s.tau2 = Eigen::VectorXd::Ones(d_.p());
  return s;
}

bool McmcKernel::sweep(McmcState& s, RngStream& rng, int iteration) const {
  if (prior_.kind() == PriorKind::Lq) return sweep_lq(s, rng, iteration);
  return sweep_gibbs(s, rng, iteration);
}

bool McmcKernel::sweep_gibbs(McmcState& s, RngStream& rng, int iteration) const {
  const Eigen::Index n = d_.n(), p = d_.p();
  const bool enet = prior_.kind() == PriorKind::ElasticNet;
  const double lam1 = enet ? std::get<ElasticNetSpec>(prior_.prior).lambda1
                           : std::get<LaplaceSpec>(prior_.prior).lambda;
  const double lam2 = enet ? std::get<ElasticNetSpec>(prior_.prior).lambda2 : 0.0;

  // beta | sigma2, tau2 ~ N(A^{-1} X^T y, sigma2 A^{-1}),
  // A = X^T X + D_tau^{-1} (+ lambda2 I)
  Eigen::MatrixXd a = xtx_;
  for (Eigen::Index j = 0; j < p; ++j) a(j, j) += 1.0 / s.tau2(j) + lam2;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << prior_kind_name(prior_.kind())
        << " sweep: beta conditional covariance Cholesky failed at iteration "
        << iteration;
    throw NumericalError(msg.str());
  }
  Eigen::VectorXd mean = llt.solve(xty_);
  Eigen::VectorXd z(p);
  for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
  Eigen::VectorXd dev =
      llt.matrixU().solve(z);  // L^{-T} z has covariance A^{-1}
  s.beta = mean + std::sqrt(s.sigma2) * dev;

  // sigma2 | beta, tau2 ~ IG((n+p)/2 + a,
  //   b + |y-Xb|^2/2 + b^T D_tau^{-1} b / 2 (+ lambda2 b^T b / 2))
  double rss = (d_.y - d_.X * s.beta).squaredNorm();
  double quad = (s.beta.array().square() / s.tau2.array()).sum();
  double shape = 0.5 * static_cast<double>(n + p) + prior_.a + shape_corruption_;
  double scale = prior_.b + 0.5 * rss + 0.5 * quad +
                 0.5 * lam2 * s.beta.squaredNorm();
  s.sigma2 = sample_inverse_gamma(shape, scale, rng);

  // 1/tau_j^2 | beta, sigma2 ~ IGauss(lam1 sqrt(sigma2)/|beta_j|, lam1^2)
  const double sd = std::sqrt(s.sigma2);
  for (Eigen::Index j = 0; j < p; ++j) {
    double abs_b = std::abs(s.beta(j));
    if (abs_b < 1e-12) abs_b = 1e-12;  // measure-zero guard
    double mu = lam1 * sd / abs_b;
    double inv_tau2 = sample_inverse_gaussian(mu, lam1 * lam1, rng);
    s.tau2(j) = 1.0 / inv_tau2;
  }
  return true;
}

bool McmcKernel::sweep_lq(McmcState& s, RngStream& rng, int /*iteration*/) const {
  const Eigen::Index n = d_.n(), p = d_.p();
  const auto& spec = std::get<LqSpec>(prior_.prior);
  const double lam = spec.lambda, q = spec.q;

  // sigma2 | beta ~ IG((n+p)/2 + a, b + |y-Xb|^2/2 + lam sum |b|^q)
  double rss = (d_.y - d_.X * s.beta).squaredNorm();
  double pen = s.beta.array().abs().pow(q).sum();
  double shape = 0.5 * static_cast<double>(n + p) + prior_.a + shape_corruption_;
  s.sigma2 = sample_inverse_gamma(shape, prior_.b + 0.5 * rss + lam * pen, rng);

  // Independence proposal beta* ~ N(beta_hat, sigma2 P^{-1}).  The exact
  // ratio including likelihood and proposal terms is kept: it collapses to
  // the prior-only factor when P = X^T X, and stays correct when the
  // proposal precision carries the ridge term.
  Eigen::VectorXd z(p);
  for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
  const double sd = std::sqrt(s.sigma2);
  Eigen::VectorXd star =
      beta_hat_ + sd * proposal_chol_.transpose()
                           .triangularView<Eigen::Upper>()
                           .solve(z);

  double rss_star = (d_.y - d_.X * star).squaredNorm();
  double pen_star = star.array().abs().pow(q).sum();
  auto prop_quad = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd w = proposal_chol_.transpose() * (b - beta_hat_);
    return w.squaredNorm();
  };
  double log_ratio = (rss - rss_star) / (2.0 * s.sigma2) -
                     (lam / s.sigma2) * (pen_star - pen) +
                     (prop_quad(star) - prop_quad(s.beta)) / (2.0 * s.sigma2);
  bool accept = std::log(rng.uniform()) < std::min(0.0, log_ratio);
  if (accept) s.beta = star;
  return accept;
}

namespace {

Chain run_chain(const Dataset& d, const PriorSpec& prior, const ChainConfig& cfg) {
  cfg.validate();
  McmcKernel kernel(d, prior);
  McmcState state = kernel.initial_state(cfg);
  RngStream rng(cfg.seed, StreamKind::Chain, 0);

  const int kept = cfg.kept();
  Chain chain;
  chain.config = cfg;
  chain.beta_draws.resize(kept, d.p());
  chain.sigma2_draws.resize(kept);

  long accepted = 0;
  int stored = 0;
  for (int t = 1; t <= cfg.n_iter; ++t) {
    accepted += kernel.sweep(state, rng, t) ? 1 : 0;
    if (t > cfg.n_burn && (t - cfg.n_burn) % cfg.thin == 0 && stored < kept) {
      chain.beta_draws.row(stored) = state.beta.transpose();
      chain.sigma2_draws(stored) = state.sigma2;
      ++stored;
    }
  }
  if (prior.kind() == PriorKind::Lq) {
    chain.accept_rate = static_cast<double>(accepted) / cfg.n_iter;
    if (*chain.accept_rate < 0.01) {
      std::ostringstream msg;
      msg << "lq chain acceptance rate " << *chain.accept_rate
          << " below 0.01; increase chain length or reduce lambda";
      chain.warning = msg.str();
    }
  }
  return chain;
}

}  // namespace

Chain run_bayesian_lasso(const Dataset& d, const PriorSpec& prior,
                         const ChainConfig& cfg) {
  if (prior.kind() != PriorKind::Laplace)
    throw ConfigError("run_bayesian_lasso: prior must be Laplace");
  return run_chain(d, prior, cfg);
}

Chain run_lq(const Dataset& d, const PriorSpec& prior, const ChainConfig& cfg) {
  if (prior.kind() != PriorKind::Lq)
    throw ConfigError("run_lq: prior must be Lq");
  return run_chain(d, prior, cfg);
}

Chain run_bayesian_enet(const Dataset& d, const PriorSpec& prior,
                        const ChainConfig& cfg) {
  if (prior.kind() != PriorKind::ElasticNet)
    throw ConfigError("run_bayesian_enet: prior must be ElasticNet");
  return run_chain(d, prior, cfg);
}

Chain run_mcmc(const Dataset& d, const PriorSpec& prior, const ChainConfig& cfg) {
  switch (prior.kind()) {
    case PriorKind::Laplace: return run_bayesian_lasso(d, prior, cfg);
    case PriorKind::Lq: return run_lq(d, prior, cfg);
    case PriorKind::ElasticNet: return run_bayesian_enet(d, prior, cfg);
    case PriorKind::GPrior:
      throw ConfigError("run_mcmc: Gaussian prior is closed form; use posterior_t_params");
  }
  throw ConfigError("run_mcmc: unknown prior kind");
}

namespace {

// Type-7 interpolated quantile of a sorted vector; at prob = 0.5 this is
// the midpoint-of-two rule for even counts.
double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double h = (static_cast<double>(n) - 1.0) * prob;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, n - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

PosteriorSummary summarize(const Chain& c) {
  const Eigen::Index kept = c.kept(), p = c.beta_draws.cols();
  if (kept < 1) throw ConfigError("summarize: empty chain");
  PosteriorSummary s;
  s.mean.resize(p);
  s.median.resize(p);
  s.sd.resize(p);
  s.q025.resize(p);
  s.q975.resize(p);
  std::vector<double> col(static_cast<std::size_t>(kept));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < kept; ++i)
      col[static_cast<std::size_t>(i)] = c.beta_draws(i, j);
    double mean = c.beta_draws.col(j).mean();
    s.mean(j) = mean;
    double ss = (c.beta_draws.col(j).array() - mean).square().sum();
    s.sd(j) = kept > 1 ? std::sqrt(ss / static_cast<double>(kept - 1)) : 0.0;
    std::sort(col.begin(), col.end());
    s.median(j) = quantile_sorted(col, 0.5);
    s.q025(j) = quantile_sorted(col, 0.025);
    s.q975(j) = quantile_sorted(col, 0.975);
  }
  s.sigma2_mean = c.sigma2_draws.mean();
  return s;
}

void write_chain_csv(std::ostream& os, const Chain& c) {
  const Eigen::Index p = c.beta_draws.cols();
  for (Eigen::Index j = 0; j < p; ++j) os << "beta_" << (j + 1) << ",";
  os << "sigma2\n";
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < c.kept(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) os << c.beta_draws(i, j) << ",";
    os << c.sigma2_draws(i) << "\n";
  }
}

double batch_means_se(const std::vector<double>& draws) {
  const std::size_t n = draws.size();
  if (n < 2) return 0.0;
  if (n < 16) {
    double mean = 0.0;
    for (double v : draws) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : draws) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  auto nb = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  std::size_t m = n / nb;
  std::vector<double> bm(nb, 0.0);
  for (std::size_t k = 0; k < nb; ++k) {
    for (std::size_t i = 0; i < m; ++i) bm[k] += draws[k * m + i];
    bm[k] /= static_cast<double>(m);
  }
  double mean = 0.0;
  for (double v : bm) mean += v;
  mean /= static_cast<double>(nb);
  double ss = 0.0;
  for (double v : bm) ss += (v - mean) * (v - mean);
  double var_bm = ss / static_cast<double>(nb - 1);
  return std::sqrt(var_bm / static_cast<double>(nb));
}

}  // namespace bpr
