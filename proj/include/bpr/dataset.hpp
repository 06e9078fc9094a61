#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bpr {

// Response vector plus predictor matrix.  Immutable by convention after
// construction; all operations below return new values.
struct Dataset {
  Eigen::MatrixXd X;               // N x p predictors
  Eigen::VectorXd y;               // length-N response
  std::vector<std::string> names;  // optional p column labels

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  // Enforces N >= 1, p >= 1, matching lengths, finite entries.
  void validate() const;
};

struct StandardizationParams {
  Eigen::VectorXd x_means;
  Eigen::VectorXd x_scales;  // sample standard deviations (N-1 denominator)
  double y_mean = 0.0;
  double y_scale = 1.0;
};

// Centers and scales every column of X and y to sample mean 0, variance 1.
// Throws DataError naming the offending column when one is constant.
std::pair<Dataset, StandardizationParams> standardize(const Dataset& d);

// Applies previously computed parameters (training-set parameters are used
// for test sets so no information leaks).
Dataset apply_standardization(const Dataset& d,
                              const StandardizationParams& params);

// Maps coefficients fit on standardized data back to the raw scale.
// Returns (beta_raw, intercept) such that predictions agree:
//   X_raw * beta_raw + intercept == (pred_std * y_scale + y_mean)
std::pair<Eigen::VectorXd, double> destandardize_coefficients(
    const Eigen::VectorXd& beta_std, const StandardizationParams& params);

// Disjoint uniformly random partition into (train of size n_train, test).
std::pair<Dataset, Dataset> train_test_split(const Dataset& d,
                                             Eigen::Index n_train,
                                             std::uint64_t seed);

// Reads a delimited numeric table (header row required; comma or tab,
// auto-detected).  The response column is selected by name, or by 0-based
// index when the string parses as an integer and no column has that name.
// Columns whose every cell is non-numeric are skipped (categorical data is
// out of scope); a non-numeric cell inside an otherwise numeric column is
// an error naming the cell.  Columns with an empty header are treated as
// row labels and dropped.
Dataset load_csv(const std::string& path, const std::string& response_column);

}  // namespace bpr
