#pragma once

#include <variant>

namespace bpr {

struct GPriorSpec {
  double g = 1.0;
};

struct LaplaceSpec {
  double lambda = 1.0;
};

struct LqSpec {
  double lambda = 1.0;
  double q = 1.5;
};

struct ElasticNetSpec {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

enum class PriorKind { GPrior, Laplace, Lq, ElasticNet };

// One of the four shrinkage priors plus the shared inverse-gamma
// hyperparameters (a, b) on sigma2.
struct PriorSpec {
  std::variant<GPriorSpec, LaplaceSpec, LqSpec, ElasticNetSpec> prior;
  double a = 0.01;
  double b = 0.01;

  PriorKind kind() const {
    return static_cast<PriorKind>(prior.index());
  }
  void validate() const;

  static PriorSpec gprior(double g, double a = 0.01, double b = 0.01);
  static PriorSpec laplace(double lambda, double a = 0.01, double b = 0.01);
  static PriorSpec lq(double lambda, double q, double a = 0.01, double b = 0.01);
  static PriorSpec elastic_net(double lambda1, double lambda2, double a = 0.01,
                               double b = 0.01);
};

const char* prior_kind_name(PriorKind k);

}  // namespace bpr
