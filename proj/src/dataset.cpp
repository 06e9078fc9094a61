#include "bpr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bpr/errors.hpp"
#include "bpr/rng.hpp"

namespace bpr {

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw DataError("Dataset: need at least one row and one column");
  if (y.size() != X.rows()) {
    std::ostringstream msg;
    msg << "Dataset: y length " << y.size() << " != row count " << X.rows();
    throw DataError(msg.str());
  }
  if (!X.allFinite() || !y.allFinite())
    throw DataError("Dataset: non-finite entry");
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X.cols())
    throw DataError("Dataset: name count does not match column count");
}

namespace {

// Sample mean and N-1 standard deviation of one column.
std::pair<double, double> column_moments(const Eigen::VectorXd& v) {
  const double n = static_cast<double>(v.size());
  double mean = v.mean();
  double ss = (v.array() - mean).square().sum();
  double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd};
}

}  // namespace

std::pair<Dataset, StandardizationParams> standardize(const Dataset& d) {
  d.validate();
  const Eigen::Index n = d.n(), p = d.p();
  StandardizationParams params;
  params.x_means.resize(p);
  params.x_scales.resize(p);

  Dataset out;
  out.X.resize(n, p);
  out.names = d.names;
  for (Eigen::Index j = 0; j < p; ++j) {
    auto [mean, sd] = column_moments(d.X.col(j));
    if (!(sd > 0.0)) {
      std::ostringstream msg;
      msg << "standardize: column "
          << (d.names.empty() ? std::to_string(j) : d.names[j])
          << " has zero sample variance";
      throw DataError(msg.str());
    }
    params.x_means(j) = mean;
    params.x_scales(j) = sd;
    out.X.col(j) = (d.X.col(j).array() - mean) / sd;
  }
  auto [ym, ysd] = column_moments(d.y);
  if (!(ysd > 0.0)) throw DataError("standardize: response has zero sample variance");
  params.y_mean = ym;
  params.y_scale = ysd;
  out.y = (d.y.array() - ym) / ysd;
  return {std::move(out), std::move(params)};
}

Dataset apply_standardization(const Dataset& d,
                              const StandardizationParams& params) {
  d.validate();
  if (params.x_means.size() != d.p())
    throw DataError("apply_standardization: dimension mismatch");
  Dataset out;
  out.names = d.names;
  out.X = (d.X.rowwise() - params.x_means.transpose()).array().rowwise() /
          params.x_scales.transpose().array();
  out.y = (d.y.array() - params.y_mean) / params.y_scale;
  return out;
}

std::pair<Eigen::VectorXd, double> destandardize_coefficients(
    const Eigen::VectorXd& beta_std, const StandardizationParams& params) {
  if (beta_std.size() != params.x_means.size())
    throw DataError("destandardize_coefficients: dimension mismatch");
  Eigen::VectorXd beta_raw =
      beta_std.array() * params.y_scale / params.x_scales.array();
  double intercept = params.y_mean - beta_raw.dot(params.x_means);
  return {std::move(beta_raw), intercept};
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d,
                                             Eigen::Index n_train,
                                             std::uint64_t seed) {
  d.validate();
  const Eigen::Index n = d.n();
  if (n_train < 1 || n_train >= n) {
    std::ostringstream msg;
    msg << "train_test_split: n_train " << n_train << " out of range [1, "
        << n - 1 << "]";
    throw ConfigError(msg.str());
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  RngStream rng(seed, StreamKind::Split, 0);
  // Fisher-Yates with our own stream so the partition is reproducible.
  for (Eigen::Index i = n - 1; i > 0; --i) {
    auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  auto take = [&](Eigen::Index lo, Eigen::Index hi) {
    Dataset out;
    out.names = d.names;
    out.X.resize(hi - lo, d.p());
    out.y.resize(hi - lo);
    for (Eigen::Index r = lo; r < hi; ++r) {
      out.X.row(r - lo) = d.X.row(idx[static_cast<std::size_t>(r)]);
      out.y(r - lo) = d.y(idx[static_cast<std::size_t>(r)]);
    }
    return out;
  };
  return {take(0, n_train), take(n_train, n)};
}

}  // namespace bpr
