#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bpr/dataset.hpp"
#include "bpr/priors.hpp"
#include "bpr/rng.hpp"

namespace bpr {

struct ChainConfig {
  int n_iter = 50000;
  int n_burn = 10000;
  int thin = 1;
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> init_beta;
  std::optional<double> init_sigma2;

  int kept() const { return (n_iter - n_burn) / thin; }
  void validate() const;
};

// Stored posterior draws of beta and sigma2.  The latent tau2 scales are
// discarded (integrating them out of the kept joint).
struct Chain {
  Eigen::MatrixXd beta_draws;   // kept x p
  Eigen::VectorXd sigma2_draws; // kept
  std::optional<double> accept_rate;  // Lq kernel only
  std::optional<std::string> warning;
  ChainConfig config;

  Eigen::Index kept() const { return beta_draws.rows(); }
};

// Current Gibbs / Metropolis-within-Gibbs state.
struct McmcState {
  Eigen::VectorXd beta;
  double sigma2 = 1.0;
  Eigen::VectorXd tau2;  // latent scales; unused by the Lq kernel
};

// Single-sweep view of one MCMC kernel.  The chain runners below and the
// sampler-validation harness both drive kernels through this interface so
// the validated code path is the production one.
class McmcKernel {
 public:
  McmcKernel(const Dataset& d, const PriorSpec& prior);

  PriorKind kind() const { return prior_.kind(); }
  const Dataset& data() const { return d_; }
  const PriorSpec& prior() const { return prior_; }

  McmcState initial_state(const ChainConfig& cfg) const;

  // One systematic scan.  Returns true when the sweep's Metropolis step
  // accepted (always true for the Gibbs kernels).  iteration is used only
  // in error messages.
  bool sweep(McmcState& s, RngStream& rng, int iteration = -1) const;

  // Validation-harness corruption knob: offsets the shape of the sigma2
  // inverse-gamma conditional.  Used to demonstrate that the joint
  // distribution test detects a broken full conditional.
  void set_sigma2_shape_corruption(double delta) { shape_corruption_ = delta; }

  // Whether the Lq proposal covariance needed the ridge term eps*I
  // (rank-deficient X^T X).
  bool proposal_ridged() const { return proposal_ridged_; }

 private:
  bool sweep_gibbs(McmcState& s, RngStream& rng, int iteration) const;
  bool sweep_lq(McmcState& s, RngStream& rng, int iteration) const;

  Dataset d_;
  PriorSpec prior_;
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  // Lq proposal pieces: mean (min-norm least squares) and the Cholesky
  // factor of P = X^T X (+ eps I when rank deficient).
  Eigen::VectorXd beta_hat_;
  Eigen::MatrixXd proposal_chol_;
  bool proposal_ridged_ = false;
  double shape_corruption_ = 0.0;
};

// Bayesian lasso Gibbs sampler (Laplace prior via the normal scale-mixture
// augmentation).
Chain run_bayesian_lasso(const Dataset& d, const PriorSpec& prior,
                         const ChainConfig& cfg);

// Metropolis-within-Gibbs for the Lq prior (independence proposal from the
// least-squares Gaussian).
Chain run_lq(const Dataset& d, const PriorSpec& prior, const ChainConfig& cfg);

// Bayesian elastic net Gibbs sampler.
Chain run_bayesian_enet(const Dataset& d, const PriorSpec& prior,
                        const ChainConfig& cfg);

// Dispatch on prior kind (GPrior is closed form and rejected here).
Chain run_mcmc(const Dataset& d, const PriorSpec& prior, const ChainConfig& cfg);

struct PosteriorSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd median;
  Eigen::VectorXd sd;
  Eigen::VectorXd q025;
  Eigen::VectorXd q975;
  double sigma2_mean = 0.0;
};

PosteriorSummary summarize(const Chain& c);

// Columnar CSV: one row per kept draw, columns beta_1..beta_p,sigma2.
void write_chain_csv(std::ostream& os, const Chain& c);

// Batch-means standard error of the mean of an autocorrelated sequence.
double batch_means_se(const std::vector<double>& draws);

}  // namespace bpr
