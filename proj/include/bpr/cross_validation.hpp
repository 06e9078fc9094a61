#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bpr/conjugate.hpp"
#include "bpr/dataset.hpp"
#include "bpr/priors.hpp"
#include "bpr/samplers.hpp"

namespace bpr {

// Tuning-parameter grid for one method.  axis1 holds g, lambda or lambda1;
// axis2 holds q (Lq) or lambda2 (elastic net) and stays empty otherwise.
struct CvGrid {
  PriorKind method = PriorKind::Laplace;
  std::vector<double> axis1;
  std::vector<double> axis2;
  int k = 10;
  std::uint64_t seed = 0;
  double a = 0.01;
  double b = 0.01;

  bool two_dimensional() const { return !axis2.empty(); }
  void validate(Eigen::Index n) const;
};

struct CvResult {
  // axis1.size() x max(1, axis2.size()) surfaces of mean held-out squared
  // error and its standard error across folds; invalid points (fit failed
  // to converge on some fold) are excluded from the argmin.
  Eigen::MatrixXd cv_errors;
  Eigen::MatrixXd se;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> valid;
  Eigen::Index best_i = 0;
  Eigen::Index best_j = 0;
  double best_axis1 = 0.0;
  std::optional<double> best_axis2;
};

// Sensible default grids: g on 20 log points in [1e-2, 1e3]; lambda on 50
// log points spanning 4 decades below |X^T y|_inf of the standardized data;
// q in {1.1,...,1.9}; lambda2 on 10 log points in [1e-2, 1e2]; k = min(10, N).
CvGrid default_grid(PriorKind method, const Dataset& d, std::uint64_t seed = 0,
                    double a = 0.01, double b = 0.01);

// Deterministic k-fold cross-validation scored with the fast point
// estimators (closed form for the g-prior, MAP fits otherwise).  Folds are
// standardized on their training part only; held-out error is computed on
// the input scale.  Ties in the error surface break toward the strongest
// shrinkage.
CvResult kfold_cv(const Dataset& d, const CvGrid& grid, int threads = 1);

// Builds the PriorSpec at the selected grid point.
PriorSpec prior_at_best(const CvGrid& grid, const CvResult& result);

struct SelectAndFitResult {
  CvResult cv;
  PriorSpec chosen;
  std::optional<TPosterior> t_posterior;    // GPrior path
  std::optional<Chain> chain;               // MCMC path
  std::optional<PosteriorSummary> summary;  // MCMC path

  // Point estimate of beta: posterior mean on either path.
  Eigen::VectorXd beta_mean() const;
};

// kfold_cv followed by the full Bayesian fit at the selected parameters.
SelectAndFitResult select_and_fit(const Dataset& d, const CvGrid& grid,
                                  const ChainConfig& cfg, int threads = 1);

// Long-format CSV of the error surface: axis1,axis2,cv_error,se,valid.
void write_cv_csv(std::ostream& os, const CvGrid& grid, const CvResult& result);

}  // namespace bpr
