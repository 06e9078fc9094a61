#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace bpr {

// Task kinds for RNG stream splitting.  Every concurrent unit of work
// (a chain, a CV fold, a simulation replication, ...) draws from its own
// stream so results are reproducible independent of scheduling.
enum class StreamKind : std::uint64_t {
  Generic = 0,
  Chain = 1,
  Fold = 2,
  Replication = 3,
  Split = 4,
  Simulation = 5,
  Oracle = 6,
};

// SplitMix64 mixing step; used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic, seedable variate stream.
//
// The engine is std::mt19937_64 (bit-exact across standard libraries);
// every distribution transform is implemented here rather than with
// std::*_distribution so that sequences do not depend on the C++ runtime.
//
// Stream derivation: the engine seed is
//   splitmix64(splitmix64(master ^ 0x9E3779B97F4A7C15 * (kind+1)) ^ index)
// so identical (master seed, kind, index) replays identical sequences and
// distinct (kind, index) pairs give statistically independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamKind kind, std::uint64_t index);
  explicit RngStream(std::uint64_t master_seed)
      : RngStream(master_seed, StreamKind::Generic, 0) {}

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_index() const { return index_; }
  StreamKind kind() const { return kind_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform();
  // Standard normal via the Marsaglia polar method (second value cached).
  double normal();
  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate);
  // Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 via the boost trick.
  double gamma(double shape, double scale);

 private:
  std::uint64_t master_;
  StreamKind kind_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Throws NumericalError carrying the 0-based index of the first leading
// minor that fails positivity.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a);

// Draw from N(mean, cov).  cov must be symmetric positive definite.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& cov, RngStream& rng);

// Inverse gamma with density proportional to x^{-shape-1} exp(-scale/x).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

// Inverse Gaussian in the (mean mu, shape lam) parametrization,
// E = mu, Var = mu^3/lam.  Michael-Schucany-Haas transformation with the
// smaller root computed in cancellation-free form; never returns <= 0.
double sample_inverse_gaussian(double mu, double lam, RngStream& rng);

}  // namespace bpr
