#include "bpr/priors.hpp"

#include "bpr/errors.hpp"

namespace bpr {

void PriorSpec::validate() const {
  if (!(a > 0.0) || !(b > 0.0))
    throw ConfigError("PriorSpec: a and b must be positive");
  if (const auto* gp = std::get_if<GPriorSpec>(&prior)) {
    if (!(gp->g > 0.0)) throw ConfigError("PriorSpec: g must be positive");
  } else if (const auto* lp = std::get_if<LaplaceSpec>(&prior)) {
    if (!(lp->lambda > 0.0)) throw ConfigError("PriorSpec: lambda must be positive");
  } else if (const auto* lq = std::get_if<LqSpec>(&prior)) {
    if (!(lq->lambda > 0.0)) throw ConfigError("PriorSpec: lambda must be positive");
    if (!(lq->q > 1.0) || !(lq->q < 2.0))
      throw ConfigError("PriorSpec: q must lie strictly inside (1,2)");
  } else if (const auto* en = std::get_if<ElasticNetSpec>(&prior)) {
    if (!(en->lambda1 > 0.0) || !(en->lambda2 > 0.0))
      throw ConfigError("PriorSpec: lambda1 and lambda2 must be positive");
  }
}

PriorSpec PriorSpec::gprior(double g, double a, double b) {
  return PriorSpec{GPriorSpec{g}, a, b};
}
PriorSpec PriorSpec::laplace(double lambda, double a, double b) {
  return PriorSpec{LaplaceSpec{lambda}, a, b};
}
PriorSpec PriorSpec::lq(double lambda, double q, double a, double b) {
  return PriorSpec{LqSpec{lambda, q}, a, b};
}
PriorSpec PriorSpec::elastic_net(double lambda1, double lambda2, double a,
                                 double b) {
  return PriorSpec{ElasticNetSpec{lambda1, lambda2}, a, b};
}

const char* prior_kind_name(PriorKind k) {
  switch (k) {
    case PriorKind::GPrior: return "gprior";
    case PriorKind::Laplace: return "laplace";
    case PriorKind::Lq: return "lq";
    case PriorKind::ElasticNet: return "elastic_net";
  }
  return "unknown";
}

}  // namespace bpr
