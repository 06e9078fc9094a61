#include "bpr/map_fit.hpp"

#include <cassert>
#include <cmath>

#include "bpr/errors.hpp"

namespace bpr {

namespace {

constexpr int kMaxSweeps = 10000;
// Tighter than strictly needed for coefficient accuracy: the KKT residual
// after stopping is bounded by roughly N * p * tol, and the certification
// budget is 1e-8.
constexpr double kCdTol = 1e-12;

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Shared cyclic coordinate descent for the lasso (lambda2 = 0) and the
// elastic net.
FitResult coordinate_descent(const Dataset& d, double lambda1, double lambda2,
                             const Eigen::VectorXd* warm_start) {
  const Eigen::Index p = d.p();
  Eigen::VectorXd beta = warm_start && warm_start->size() == p
                             ? *warm_start
                             : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd colnorm2(p);
  for (Eigen::Index j = 0; j < p; ++j) colnorm2(j) = d.X.col(j).squaredNorm();
  Eigen::VectorXd resid = d.y - d.X * beta;

  auto objective = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& r) {
    return 0.5 * r.squaredNorm() + lambda1 * b.lpNorm<1>() +
           0.5 * lambda2 * b.squaredNorm();
  };

#ifndef NDEBUG
  double prev_obj = objective(beta, resid);
#endif
  int sweep = 0;
  bool converged = false;
  for (; sweep < kMaxSweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (colnorm2(j) == 0.0) continue;
      double old = beta(j);
      double z = d.X.col(j).dot(resid) + colnorm2(j) * old;
      double b = soft_threshold(z, lambda1) / (colnorm2(j) + lambda2);
      if (b != old) {
        resid += d.X.col(j) * (old - b);
        beta(j) = b;
        max_delta = std::max(max_delta, std::abs(b - old));
      }
    }
#ifndef NDEBUG
    double obj = objective(beta, resid);
    assert(obj <= prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)));
    prev_obj = obj;
#endif
    if (max_delta < kCdTol) {
      converged = true;
      ++sweep;
      break;
    }
  }
  // Drift in the running residual accumulates over sweeps; recompute once.
  resid = d.y - d.X * beta;

  FitResult out;
  out.beta = std::move(beta);
  out.objective = objective(out.beta, resid);
  out.iterations = sweep;
  out.converged = converged;
  return out;
}

}  // namespace

FitResult fit_ols(const Dataset& d) {
  d.validate();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(d.X);
  FitResult out;
  out.beta = cod.solve(d.y);
  out.objective = 0.5 * (d.y - d.X * out.beta).squaredNorm();
  out.iterations = 1;
  out.converged = true;
  return out;
}

FitResult fit_lasso_map(const Dataset& d, double lambda,
                        const Eigen::VectorXd* warm_start) {
  d.validate();
  if (lambda < 0.0) throw ConfigError("fit_lasso_map: lambda must be >= 0");
  if (lambda == 0.0) return fit_ols(d);
  return coordinate_descent(d, lambda, 0.0, warm_start);
}

FitResult fit_enet_map(const Dataset& d, double lambda1, double lambda2,
                       const Eigen::VectorXd* warm_start) {
  d.validate();
  if (lambda1 < 0.0 || lambda2 < 0.0)
    throw ConfigError("fit_enet_map: penalties must be >= 0");
  if (lambda1 == 0.0 && lambda2 == 0.0) return fit_ols(d);
  return coordinate_descent(d, lambda1, lambda2, warm_start);
}

FitResult fit_lq_map(const Dataset& d, double lambda, double q,
                     const Eigen::VectorXd* warm_start) {
  d.validate();
  if (lambda < 0.0) throw ConfigError("fit_lq_map: lambda must be >= 0");
  if (lambda == 0.0) return fit_ols(d);
  if (!(q > 1.0) || !(q < 2.0))
    throw ConfigError("fit_lq_map: q must lie strictly inside (1,2)");

  const Eigen::Index p = d.p();
  constexpr double kDelta = 1e-8;
  constexpr double kGradTol = 1e-6;
  constexpr int kMaxIter = 10000;

  Eigen::MatrixXd xtx = d.X.transpose() * d.X;
  Eigen::VectorXd xty = d.X.transpose() * d.y;

  auto objective = [&](const Eigen::VectorXd& b) {
    return 0.5 * (d.y - d.X * b).squaredNorm() +
           lambda * b.array().abs().pow(q).sum();
  };
  auto gradient = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd g = xtx * b - xty;
    for (Eigen::Index j = 0; j < p; ++j) {
      double a = std::abs(b(j));
      if (a > 0.0) g(j) += lambda * q * std::pow(a, q - 1.0) * (b(j) > 0 ? 1.0 : -1.0);
    }
    return g;
  };

  Eigen::VectorXd beta;
  if (warm_start && warm_start->size() == p) {
    beta = *warm_start;
  } else {
    // ridge start: (X^T X + I)^{-1} X^T y
    beta = (xtx + Eigen::MatrixXd::Identity(p, p)).llt().solve(xty);
  }

  double f = objective(beta);
  int iter = 0;
  bool converged = false;
  for (; iter < kMaxIter; ++iter) {
    Eigen::VectorXd g = gradient(beta);
    if (g.lpNorm<Eigen::Infinity>() < kGradTol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd h = xtx;
    for (Eigen::Index j = 0; j < p; ++j)
      h(j, j) += lambda * q * (q - 1.0) * std::pow(std::abs(beta(j)) + kDelta, q - 2.0);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) break;  // converged stays false
    Eigen::VectorXd step = llt.solve(-g);

    double t = 1.0;
    double f_new = objective(beta + t * step);
    int halvings = 0;
    while (f_new > f - 1e-4 * t * (-g.dot(step)) && halvings < 60) {
      t *= 0.5;
      f_new = objective(beta + t * step);
      ++halvings;
    }
    if (!(f_new < f) && halvings >= 60) break;
    beta += t * step;
#ifndef NDEBUG
    assert(f_new <= f + 1e-9 * (1.0 + std::abs(f)));
#endif
    f = f_new;
  }

  FitResult out;
  out.beta = std::move(beta);
  out.objective = f;
  out.iterations = iter;
  out.converged = converged;
  return out;
}

}  // namespace bpr
