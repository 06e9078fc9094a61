#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "bpr/dataset.hpp"

namespace bpr {

// One correlated pair of predictor columns (1-based indices).
struct CorrPair {
  int i = 0;
  int j = 0;
  double rho = 0.0;
};

// Correlated-design simulator configuration.  The default instance encodes
// the reference design: 12 training rows, 50 test rows, the first six true
// coefficients {.5,-.5,.5,.5,-.5,-.5} and the rest zero, columns (3,4)
// correlated at 0.85 and (5,6) at 0.95, unit noise.
struct SimConfig {
  Eigen::Index n_train = 12;
  Eigen::Index n_test = 50;
  Eigen::Index p = 10;
  Eigen::VectorXd beta_true;
  std::vector<CorrPair> corr_pairs;
  double noise_sd = 1.0;

  static SimConfig defaults(Eigen::Index p = 10);

  // Identity covariance with the configured off-diagonal entries.
  Eigen::MatrixXd covariance() const;

  void validate() const;
};

struct SimData {
  Dataset train;
  Dataset test;
  Eigen::VectorXd beta_true;
};

// Rows i.i.d. from N(0, cfg.covariance()); y = X beta_true + noise.
// Train and test come from the same process; deterministic given seed.
SimData simulate_dataset(const SimConfig& cfg, std::uint64_t seed);

}  // namespace bpr
