#include "bpr/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include "bpr/errors.hpp"
#include "bpr/map_fit.hpp"
#include "bpr/parallel.hpp"
#include "bpr/rng.hpp"

namespace bpr {

void CvGrid::validate(Eigen::Index n) const {
  if (axis1.empty()) throw ConfigError("CvGrid: axis1 is empty");
  if (k < 2 || k > n) throw ConfigError("CvGrid: need 2 <= k <= N");
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("CvGrid: a, b must be positive");
  auto check_axis = [](const std::vector<double>& ax, const char* name,
                       bool positive) {
    for (std::size_t i = 0; i < ax.size(); ++i) {
      if (positive && !(ax[i] > 0.0))
        throw ConfigError(std::string("CvGrid: ") + name + " must be positive");
      if (i > 0 && !(ax[i] > ax[i - 1]))
        throw ConfigError(std::string("CvGrid: ") + name +
                          " must be sorted strictly ascending");
    }
  };
  switch (method) {
    case PriorKind::GPrior:
    case PriorKind::Laplace:
      check_axis(axis1, "axis1", true);
      if (!axis2.empty())
        throw ConfigError("CvGrid: axis2 must be empty for a 1-D method");
      break;
    case PriorKind::Lq:
      check_axis(axis1, "axis1", true);
      if (axis2.empty()) throw ConfigError("CvGrid: Lq needs a q axis");
      check_axis(axis2, "axis2", true);
      for (double q : axis2)
        if (!(q > 1.0) || !(q < 2.0))
          throw ConfigError("CvGrid: q values must lie inside (1,2)");
      break;
    case PriorKind::ElasticNet:
      check_axis(axis1, "axis1", true);
      if (axis2.empty()) throw ConfigError("CvGrid: elastic net needs a lambda2 axis");
      check_axis(axis2, "axis2", true);
      break;
  }
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * i / (count - 1));
  return out;
}

}  // namespace

CvGrid default_grid(PriorKind method, const Dataset& d, std::uint64_t seed,
                    double a, double b) {
  CvGrid grid;
  grid.method = method;
  grid.seed = seed;
  grid.a = a;
  grid.b = b;
  grid.k = static_cast<int>(std::min<Eigen::Index>(10, d.n()));
  switch (method) {
    case PriorKind::GPrior:
      grid.axis1 = log_spaced(1e-2, 1e3, 20);
      break;
    case PriorKind::Laplace:
    case PriorKind::Lq:
    case PriorKind::ElasticNet: {
      auto [std_d, params] = standardize(d);
      double lambda_max = (std_d.X.transpose() * std_d.y).lpNorm<Eigen::Infinity>();
      if (!(lambda_max > 0.0)) lambda_max = 1.0;
      grid.axis1 = log_spaced(lambda_max * 1e-4, lambda_max, 50);
      if (method == PriorKind::Lq) grid.axis2 = {1.1, 1.3, 1.5, 1.7, 1.9};
      if (method == PriorKind::ElasticNet) grid.axis2 = log_spaced(1e-2, 1e2, 10);
      break;
    }
  }
  return grid;
}

namespace {

struct FoldData {
  Dataset train_std;
  StandardizationParams params;
  Eigen::MatrixXd x_ho_std;
  Eigen::VectorXd y_ho_raw;
};

std::vector<FoldData> make_folds(const Dataset& d, int k, std::uint64_t seed) {
  const Eigen::Index n = d.n();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  RngStream rng(seed, StreamKind::Fold, 0);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    auto j = static_cast<Eigen::Index>(rng.next_u64() %
                                       static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  // contiguous chunks of the shuffled order, sizes differing by at most 1
  std::vector<FoldData> folds;
  folds.reserve(static_cast<std::size_t>(k));
  Eigen::Index base = n / k, extra = n % k, start = 0;
  for (int f = 0; f < k; ++f) {
    Eigen::Index size = base + (f < extra ? 1 : 0);
    Eigen::Index stop = start + size;
    Dataset train, ho;
    train.names = d.names;
    ho.names = d.names;
    train.X.resize(n - size, d.p());
    train.y.resize(n - size);
    ho.X.resize(size, d.p());
    ho.y.resize(size);
    Eigen::Index ti = 0, hi = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      bool held = r >= start && r < stop;
      const Eigen::Index src = idx[static_cast<std::size_t>(r)];
      if (held) {
        ho.X.row(hi) = d.X.row(src);
        ho.y(hi++) = d.y(src);
      } else {
        train.X.row(ti) = d.X.row(src);
        train.y(ti++) = d.y(src);
      }
    }
    FoldData fd;
    auto [train_std, params] = standardize(train);
    fd.train_std = std::move(train_std);
    fd.params = std::move(params);
    Dataset ho_std = apply_standardization(ho, fd.params);
    fd.x_ho_std = std::move(ho_std.X);
    fd.y_ho_raw = ho.y;
    folds.push_back(std::move(fd));
    start = stop;
  }
  return folds;
}

// Held-out MSE on the input scale for a coefficient vector fit on the
// fold-standardized scale.  NaN marks a failed fit.
double fold_mse(const FoldData& fd, const Eigen::VectorXd& beta_std) {
  Eigen::VectorXd pred =
      (fd.x_ho_std * beta_std).array() * fd.params.y_scale + fd.params.y_mean;
  return (pred - fd.y_ho_raw).squaredNorm() /
         static_cast<double>(fd.y_ho_raw.size());
}

constexpr double kInvalid = std::numeric_limits<double>::quiet_NaN();

// Evaluates every grid point on one fold; returns axis1 x axis2 MSE matrix.
// Penalized paths run from the strongest penalty down with warm starts.
Eigen::MatrixXd eval_fold(const FoldData& fd, const CvGrid& grid) {
  const auto n1 = static_cast<Eigen::Index>(grid.axis1.size());
  const auto n2 = static_cast<Eigen::Index>(std::max<std::size_t>(1, grid.axis2.size()));
  Eigen::MatrixXd mse(n1, n2);

  switch (grid.method) {
    case PriorKind::GPrior: {
      for (Eigen::Index i = 0; i < n1; ++i) {
        try {
          GaussianPrior prior = gprior_or_ridge(
              fd.train_std, grid.axis1[static_cast<std::size_t>(i)], grid.a, grid.b);
          TPosterior post = posterior_t_params(fd.train_std, prior);
          mse(i, 0) = fold_mse(fd, post.mu_tilde);
        } catch (const Error&) {
          mse(i, 0) = kInvalid;
        }
      }
      break;
    }
    case PriorKind::Laplace: {
      Eigen::VectorXd warm = Eigen::VectorXd::Zero(fd.train_std.p());
      for (Eigen::Index i = n1 - 1; i >= 0; --i) {
        FitResult fit = fit_lasso_map(
            fd.train_std, grid.axis1[static_cast<std::size_t>(i)], &warm);
        warm = fit.beta;
        mse(i, 0) = fit.converged ? fold_mse(fd, fit.beta) : kInvalid;
      }
      break;
    }
    case PriorKind::Lq: {
      for (Eigen::Index j = 0; j < n2; ++j) {
        const double q = grid.axis2[static_cast<std::size_t>(j)];
        Eigen::VectorXd warm;
        const Eigen::VectorXd* warm_ptr = nullptr;
        for (Eigen::Index i = n1 - 1; i >= 0; --i) {
          FitResult fit = fit_lq_map(
              fd.train_std, grid.axis1[static_cast<std::size_t>(i)], q, warm_ptr);
          warm = fit.beta;
          warm_ptr = &warm;
          mse(i, j) = fit.converged ? fold_mse(fd, fit.beta) : kInvalid;
        }
      }
      break;
    }
    case PriorKind::ElasticNet: {
      for (Eigen::Index j = 0; j < n2; ++j) {
        const double lam2 = grid.axis2[static_cast<std::size_t>(j)];
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(fd.train_std.p());
        for (Eigen::Index i = n1 - 1; i >= 0; --i) {
          FitResult fit = fit_enet_map(
              fd.train_std, grid.axis1[static_cast<std::size_t>(i)], lam2, &warm);
          warm = fit.beta;
          mse(i, j) = fit.converged ? fold_mse(fd, fit.beta) : kInvalid;
        }
      }
      break;
    }
  }
  return mse;
}

// Shrinkage-first preference for argmin ties: smaller g, otherwise larger
// penalties (and smaller q, where the coefficients in play are below one).
bool prefer_over(const CvGrid& grid, Eigen::Index i1, Eigen::Index j1,
                 Eigen::Index i0, Eigen::Index j0) {
  if (grid.method == PriorKind::GPrior) return i1 < i0;
  if (i1 != i0) return i1 > i0;
  if (grid.method == PriorKind::Lq) return j1 < j0;
  return j1 > j0;
}

}  // namespace

CvResult kfold_cv(const Dataset& d, const CvGrid& grid, int threads) {
  d.validate();
  grid.validate(d.n());

  std::vector<FoldData> folds = make_folds(d, grid.k, grid.seed);
  const auto n1 = static_cast<Eigen::Index>(grid.axis1.size());
  const auto n2 = static_cast<Eigen::Index>(std::max<std::size_t>(1, grid.axis2.size()));

  std::vector<Eigen::MatrixXd> per_fold(folds.size());
  parallel_for_index(folds.size(), threads, [&](std::size_t f) {
    per_fold[f] = eval_fold(folds[f], grid);
  });

  CvResult out;
  out.cv_errors.resize(n1, n2);
  out.se.resize(n1, n2);
  out.valid.resize(n1, n2);
  const double kd = static_cast<double>(folds.size());
  bool any_valid = false;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) {
      double sum = 0.0, sum2 = 0.0;
      bool ok = true;
      for (const auto& m : per_fold) {
        double v = m(i, j);
        if (!std::isfinite(v)) {
          ok = false;
          break;
        }
        sum += v;
        sum2 += v * v;
      }
      out.valid(i, j) = ok ? 1 : 0;
      if (!ok) {
        out.cv_errors(i, j) = kInvalid;
        out.se(i, j) = kInvalid;
        continue;
      }
      double mean = sum / kd;
      double var = kd > 1 ? std::max(0.0, (sum2 - kd * mean * mean) / (kd - 1.0)) : 0.0;
      out.cv_errors(i, j) = mean;
      out.se(i, j) = std::sqrt(var / kd);
      if (!any_valid || mean < best ||
          (mean == best && prefer_over(grid, i, j, out.best_i, out.best_j))) {
        any_valid = true;
        best = mean;
        out.best_i = i;
        out.best_j = j;
      }
    }
  }
  if (!any_valid)
    throw NumericalError("kfold_cv: every grid point failed to converge");
  out.best_axis1 = grid.axis1[static_cast<std::size_t>(out.best_i)];
  if (grid.two_dimensional())
    out.best_axis2 = grid.axis2[static_cast<std::size_t>(out.best_j)];
  return out;
}

PriorSpec prior_at_best(const CvGrid& grid, const CvResult& result) {
  switch (grid.method) {
    case PriorKind::GPrior:
      return PriorSpec::gprior(result.best_axis1, grid.a, grid.b);
    case PriorKind::Laplace:
      return PriorSpec::laplace(result.best_axis1, grid.a, grid.b);
    case PriorKind::Lq:
      return PriorSpec::lq(result.best_axis1, *result.best_axis2, grid.a, grid.b);
    case PriorKind::ElasticNet:
      return PriorSpec::elastic_net(result.best_axis1, *result.best_axis2,
                                    grid.a, grid.b);
  }
  throw ConfigError("prior_at_best: unknown method");
}

Eigen::VectorXd SelectAndFitResult::beta_mean() const {
  if (t_posterior) return t_posterior->mu_tilde;
  if (summary) return summary->mean;
  throw ConfigError("SelectAndFitResult: no fit present");
}

SelectAndFitResult select_and_fit(const Dataset& d, const CvGrid& grid,
                                  const ChainConfig& cfg, int threads) {
  SelectAndFitResult out;
  out.cv = kfold_cv(d, grid, threads);
  out.chosen = prior_at_best(grid, out.cv);
  if (grid.method == PriorKind::GPrior) {
    GaussianPrior prior = gprior_or_ridge(
        d, std::get<GPriorSpec>(out.chosen.prior).g, grid.a, grid.b);
    out.t_posterior = posterior_t_params(d, prior);
  } else {
    out.chain = run_mcmc(d, out.chosen, cfg);
    out.summary = summarize(*out.chain);
  }
  return out;
}

void write_cv_csv(std::ostream& os, const CvGrid& grid, const CvResult& result) {
  const bool two_d = grid.two_dimensional();
  os << "axis1," << (two_d ? "axis2," : "") << "cv_error,se,valid\n";
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < result.cv_errors.rows(); ++i) {
    for (Eigen::Index j = 0; j < result.cv_errors.cols(); ++j) {
      os << grid.axis1[static_cast<std::size_t>(i)] << ",";
      if (two_d) os << grid.axis2[static_cast<std::size_t>(j)] << ",";
      if (result.valid(i, j))
        os << result.cv_errors(i, j) << "," << result.se(i, j) << ",1\n";
      else
        os << "nan,nan,0\n";
    }
  }
}

}  // namespace bpr
