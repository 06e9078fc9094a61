#include "bpr/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bpr/errors.hpp"

namespace bpr {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, StreamKind kind,
                     std::uint64_t index)
    : master_(master_seed), kind_(kind), index_(index) {
  std::uint64_t s =
      master_seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(kind) + 1));
  std::uint64_t mixed = splitmix64(s);
  s = mixed ^ index;
  std::uint64_t seed = splitmix64(s);
  engine_.seed(seed);
}

double RngStream::uniform() {
  // 53-bit mantissa, shifted into the open interval (0,1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * m;
  has_spare_ = true;
  return u * m;
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw ConfigError("exponential: rate must be positive");
  return -std::log(uniform()) / rate;
}

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw ConfigError("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Gamma(shape) = Gamma(shape+1) * U^{1/shape}
    double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze method.
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ConfigError("cholesky_lower: matrix must be square");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      std::ostringstream msg;
      msg << "cholesky_lower: leading minor " << j
          << " is not positive definite";
      throw NumericalError(msg.str(), static_cast<int>(j));
    }
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, RngStream& rng) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size())
    throw ConfigError("sample_mvn: dimension mismatch");
  Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::MatrixXd l = cholesky_lower(sym);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + l * z;
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw ConfigError("sample_inverse_gamma: parameters must be positive");
  return scale / rng.gamma(shape, 1.0);
}

double sample_inverse_gaussian(double mu, double lam, RngStream& rng) {
  if (!(mu > 0.0) || !(lam > 0.0))
    throw ConfigError("sample_inverse_gaussian: parameters must be positive");
  double y = rng.normal();
  y = y * y;
  double t = mu * y;
  double x1;
  if (t == 0.0) {
    x1 = mu;
  } else {
    // Smaller root of the MSH quadratic, written as mu*(s-t)/(s+t) with
    // s = sqrt(t*(t+4*lam)); this form stays strictly positive where the
    // textbook expression cancels catastrophically for large t.
    double s = std::sqrt(t * (t + 4.0 * lam));
    x1 = mu * ((s - t) / (s + t));
    if (x1 <= 0.0) x1 = std::numeric_limits<double>::min();
  }
  double u = rng.uniform();
  if (u <= mu / (mu + x1)) return x1;
  return mu * mu / x1;
}

}  // namespace bpr
