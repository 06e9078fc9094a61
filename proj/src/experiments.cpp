#include "bpr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bpr/conjugate.hpp"
#include "bpr/cross_validation.hpp"
#include "bpr/errors.hpp"
#include "bpr/map_fit.hpp"
#include "bpr/parallel.hpp"
#include "bpr/rng.hpp"

namespace bpr {

const char* method_name(Method m) {
  switch (m) {
    case Method::Ols: return "ols";
    case Method::Lasso: return "lasso";
    case Method::Enet: return "enet";
    case Method::BayesGauss: return "bayes-gauss";
    case Method::BayesLasso: return "bayes-lasso";
    case Method::BayesLq: return "bayes-lq";
    case Method::BayesEnet: return "bayes-enet";
  }
  return "unknown";
}

std::optional<Method> method_from_string(const std::string& name) {
  for (Method m : all_methods())
    if (name == method_name(m)) return m;
  return std::nullopt;
}

std::vector<Method> all_methods() {
  return {Method::Ols,        Method::Lasso,      Method::Enet,
          Method::BayesGauss, Method::BayesLasso, Method::BayesLq,
          Method::BayesEnet};
}

double grouping_error(const Eigen::VectorXd& beta_hat,
                      const Eigen::VectorXd& beta_true,
                      const std::vector<int>& group_idx, bool sum_convention) {
  if (beta_hat.size() != beta_true.size())
    throw ConfigError("grouping_error: coefficient length mismatch");
  if (group_idx.empty()) throw ConfigError("grouping_error: empty group");
  double sum = 0.0;
  for (int idx : group_idx) {
    if (idx < 1 || idx > beta_hat.size())
      throw ConfigError("grouping_error: index out of range");
    double diff = beta_hat(idx - 1) - beta_true(idx - 1);
    sum += diff * diff;
  }
  return sum_convention ? sum : sum / static_cast<double>(group_idx.size());
}

namespace {

struct MethodFit {
  Eigen::VectorXd beta_mean;               // standardized scale
  std::optional<Eigen::VectorXd> beta_median;
};

// Tune by CV (where the method has tuning parameters) and fit on the
// standardized training data.  seed feeds both the fold partition and the
// chain.
MethodFit tune_and_fit(Method m, const Dataset& train_std,
                       const ChainConfig& chain_cfg, std::uint64_t seed) {
  MethodFit out;
  auto grid_for = [&](PriorKind kind) {
    CvGrid grid = default_grid(kind, train_std, seed);
    return grid;
  };
  ChainConfig cfg = chain_cfg;
  cfg.seed = seed;
  switch (m) {
    case Method::Ols:
      out.beta_mean = fit_ols(train_std).beta;
      break;
    case Method::Lasso: {
      CvGrid grid = grid_for(PriorKind::Laplace);
      CvResult cv = kfold_cv(train_std, grid);
      out.beta_mean = fit_lasso_map(train_std, cv.best_axis1).beta;
      break;
    }
    case Method::Enet: {
      CvGrid grid = grid_for(PriorKind::ElasticNet);
      CvResult cv = kfold_cv(train_std, grid);
      out.beta_mean =
          fit_enet_map(train_std, cv.best_axis1, *cv.best_axis2).beta;
      break;
    }
    case Method::BayesGauss: {
      CvGrid grid = grid_for(PriorKind::GPrior);
      SelectAndFitResult fit = select_and_fit(train_std, grid, cfg);
      out.beta_mean = fit.t_posterior->mu_tilde;
      break;
    }
    case Method::BayesLasso:
    case Method::BayesLq:
    case Method::BayesEnet: {
      PriorKind kind = m == Method::BayesLasso  ? PriorKind::Laplace
                       : m == Method::BayesLq   ? PriorKind::Lq
                                                : PriorKind::ElasticNet;
      CvGrid grid = grid_for(kind);
      SelectAndFitResult fit = select_and_fit(train_std, grid, cfg);
      out.beta_mean = fit.summary->mean;
      out.beta_median = fit.summary->median;
      break;
    }
  }
  return out;
}

double standardized_mse(const Dataset& test_std, const Eigen::VectorXd& beta) {
  return (test_std.X * beta - test_std.y).squaredNorm() /
         static_cast<double>(test_std.n());
}

struct RepOutcome {
  bool ok = false;
  std::string error;
  std::map<Method, MethodSeries> values;  // one entry per metric vector
};

void append_series(std::map<Method, MethodSeries>& into, Method m,
                   const MethodSeries& s) {
  MethodSeries& dst = into[m];
  dst.mse.insert(dst.mse.end(), s.mse.begin(), s.mse.end());
  dst.mse_median.insert(dst.mse_median.end(), s.mse_median.begin(),
                        s.mse_median.end());
  dst.ge.insert(dst.ge.end(), s.ge.begin(), s.ge.end());
  dst.ge_sum.insert(dst.ge_sum.end(), s.ge_sum.begin(), s.ge_sum.end());
}

std::uint64_t derive_seed(std::uint64_t master, StreamKind kind,
                          std::uint64_t index) {
  RngStream stream(master, kind, index);
  return stream.next_u64();
}

}  // namespace

ExperimentReport run_simulation_study(const SimConfig& cfg,
                                      const std::vector<Method>& methods,
                                      int n_reps, const ChainConfig& chain_cfg,
                                      std::uint64_t master_seed, int threads) {
  cfg.validate();
  if (n_reps < 1) throw ConfigError("run_simulation_study: n_reps must be >= 1");
  if (methods.empty()) throw ConfigError("run_simulation_study: no methods");

  // group = the correlated predictors (1-based), e.g. {3,4,5,6} by default
  std::vector<int> group;
  {
    std::set<int> g;
    for (const auto& pr : cfg.corr_pairs) {
      g.insert(pr.i);
      g.insert(pr.j);
    }
    group.assign(g.begin(), g.end());
  }

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(n_reps));
  parallel_for_index(static_cast<std::size_t>(n_reps), threads, [&](std::size_t r) {
    RepOutcome& rep = outcomes[r];
    try {
      std::uint64_t rep_seed = derive_seed(master_seed, StreamKind::Replication, r);
      SimData sim = simulate_dataset(cfg, rep_seed);
      auto [train_std, params] = standardize(sim.train);
      Dataset test_std = apply_standardization(sim.test, params);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        Method m = methods[mi];
        std::uint64_t method_seed = derive_seed(rep_seed, StreamKind::Generic, mi);
        MethodFit fit = tune_and_fit(m, train_std, chain_cfg, method_seed);
        MethodSeries s;
        s.mse.push_back(standardized_mse(test_std, fit.beta_mean));
        if (fit.beta_median)
          s.mse_median.push_back(standardized_mse(test_std, *fit.beta_median));
        if (!group.empty()) {
          auto [beta_raw, intercept] =
              destandardize_coefficients(fit.beta_mean, params);
          (void)intercept;
          s.ge.push_back(grouping_error(beta_raw, sim.beta_true, group, false));
          s.ge_sum.push_back(grouping_error(beta_raw, sim.beta_true, group, true));
        }
        rep.values[m] = std::move(s);
      }
      rep.ok = true;
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.error = e.what();
    }
  });

  ExperimentReport report;
  report.methods = methods;
  report.n_requested = n_reps;
  report.master_seed = master_seed;
  {
    std::ostringstream echo;
    echo << "simulation p=" << cfg.p << " n_train=" << cfg.n_train
         << " n_test=" << cfg.n_test << " noise_sd=" << cfg.noise_sd
         << " reps=" << n_reps << " chain=" << chain_cfg.n_iter << "/"
         << chain_cfg.n_burn;
    report.config_echo = echo.str();
  }
  for (int r = 0; r < n_reps; ++r) {
    const RepOutcome& rep = outcomes[static_cast<std::size_t>(r)];
    if (!rep.ok) {
      report.failed.push_back(r);
      report.warnings.push_back("replication " + std::to_string(r) +
                                " failed: " + rep.error);
      continue;
    }
    for (Method m : methods) append_series(report.series, m, rep.values.at(m));
  }
  return report;
}

ExperimentReport run_prostate_benchmark(const Dataset& d,
                                        const std::vector<Method>& methods,
                                        int n_splits,
                                        const ChainConfig& chain_cfg,
                                        std::uint64_t master_seed, int threads) {
  d.validate();
  if (n_splits < 1) throw ConfigError("run_prostate_benchmark: n_splits >= 1");
  if (methods.empty()) throw ConfigError("run_prostate_benchmark: no methods");

  ExperimentReport report;
  report.methods = methods;
  report.n_requested = n_splits;
  report.master_seed = master_seed;
  if (d.n() != 97 || d.p() != 8) {
    std::ostringstream warn;
    warn << "expected the canonical 97x8 table, got " << d.n() << "x" << d.p()
         << "; proceeding";
    report.warnings.push_back(warn.str());
  }
  const auto n_train = d.n() == 97
                           ? Eigen::Index{60}
                           : static_cast<Eigen::Index>(
                                 std::lround(static_cast<double>(d.n()) * 60.0 / 97.0));
  {
    std::ostringstream echo;
    echo << "benchmark n=" << d.n() << " p=" << d.p() << " n_train=" << n_train
         << " splits=" << n_splits << " chain=" << chain_cfg.n_iter << "/"
         << chain_cfg.n_burn;
    report.config_echo = echo.str();
  }

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(n_splits));
  parallel_for_index(static_cast<std::size_t>(n_splits), threads, [&](std::size_t s) {
    RepOutcome& rep = outcomes[s];
    try {
      std::uint64_t split_seed = derive_seed(master_seed, StreamKind::Split, s);
      auto [train, test] = train_test_split(d, n_train, split_seed);
      auto [train_std, params] = standardize(train);
      Dataset test_std = apply_standardization(test, params);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        Method m = methods[mi];
        std::uint64_t method_seed = derive_seed(split_seed, StreamKind::Generic, mi);
        MethodFit fit = tune_and_fit(m, train_std, chain_cfg, method_seed);
        MethodSeries series;
        series.mse.push_back(standardized_mse(test_std, fit.beta_mean));
        if (fit.beta_median)
          series.mse_median.push_back(standardized_mse(test_std, *fit.beta_median));
        rep.values[m] = std::move(series);
      }
      rep.ok = true;
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.error = e.what();
    }
  });

  for (int s = 0; s < n_splits; ++s) {
    const RepOutcome& rep = outcomes[static_cast<std::size_t>(s)];
    if (!rep.ok) {
      report.failed.push_back(s);
      report.warnings.push_back("split " + std::to_string(s) +
                                " failed: " + rep.error);
      continue;
    }
    for (Method m : methods) append_series(report.series, m, rep.values.at(m));
  }
  return report;
}

namespace {

// Exact draw from the joint prior the kernel targets; the augmented latent
// scales are included so the successive-conditional chain starts in
// stationarity.
McmcState draw_prior_state(PriorKind kernel, const PriorSpec& prior,
                           Eigen::Index p, RngStream& rng) {
  McmcState s;
  s.beta.resize(p);
  s.tau2 = Eigen::VectorXd::Ones(p);
  switch (kernel) {
    case PriorKind::Laplace: {
      const double lam = std::get<LaplaceSpec>(prior.prior).lambda;
      s.sigma2 = sample_inverse_gamma(prior.a, prior.b, rng);
      for (Eigen::Index j = 0; j < p; ++j) {
        s.tau2(j) = rng.exponential(0.5 * lam * lam);
        s.beta(j) = std::sqrt(s.sigma2 * s.tau2(j)) * rng.normal();
      }
      break;
    }
    case PriorKind::ElasticNet: {
      const auto& en = std::get<ElasticNetSpec>(prior.prior);
      s.sigma2 = sample_inverse_gamma(prior.a, prior.b, rng);
      for (Eigen::Index j = 0; j < p; ++j) {
        // tau2 density ~ exp(-lam1^2 t/2) (1 + lam2 t)^{-1/2}: rejection
        // from the exponential envelope.
        double t;
        do {
          t = rng.exponential(0.5 * en.lambda1 * en.lambda1);
        } while (rng.uniform() > 1.0 / std::sqrt(1.0 + en.lambda2 * t));
        s.tau2(j) = t;
        double prec = 1.0 / t + en.lambda2;
        s.beta(j) = std::sqrt(s.sigma2 / prec) * rng.normal();
      }
      break;
    }
    case PriorKind::Lq: {
      const auto& lq = std::get<LqSpec>(prior.prior);
      double pd = static_cast<double>(p);
      double shape = prior.a + 0.5 * pd - pd / lq.q;
      if (!(shape > 0.0))
        throw ConfigError(
            "geweke_validation: a + p/2 - p/q must be positive for the Lq "
            "prior to be proper");
      s.sigma2 = sample_inverse_gamma(shape, prior.b, rng);
      double scale = std::pow(s.sigma2 / lq.lambda, 1.0 / lq.q);
      for (Eigen::Index j = 0; j < p; ++j) {
        double g = rng.gamma(1.0 / lq.q, 1.0);
        double mag = scale * std::pow(g, 1.0 / lq.q);
        s.beta(j) = rng.uniform() < 0.5 ? mag : -mag;
      }
      break;
    }
    case PriorKind::GPrior:
      throw ConfigError("geweke_validation: no sampler kernel for the g-prior");
  }
  return s;
}

Eigen::VectorXd draw_response(const Eigen::MatrixXd& x, const McmcState& s,
                              RngStream& rng) {
  Eigen::VectorXd y = x * s.beta;
  const double sd = std::sqrt(s.sigma2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  return y;
}

void record(const McmcState& s, std::vector<std::vector<double>>& fns) {
  fns[0].push_back(s.beta(0));
  fns[1].push_back(s.beta(0) * s.beta(0));
  fns[2].push_back(s.sigma2);
  fns[3].push_back(std::log(s.sigma2));
  fns[4].push_back(s.beta(0) * s.beta(1));
}

}  // namespace

std::vector<GewekeResult> geweke_validation(PriorKind kernel, Eigen::Index n,
                                            Eigen::Index p,
                                            const PriorSpec& prior,
                                            int n_draws, std::uint64_t seed,
                                            GewekeMode mode) {
  if (n_draws < 1) throw ConfigError("geweke_validation: n_draws must be >= 1");
  if (n < 1 || p < 2)
    throw ConfigError("geweke_validation: need n >= 1 and p >= 2");
  prior.validate();
  if (kernel != prior.kind())
    throw ConfigError("geweke_validation: kernel and prior kind differ");

  // Fixed design shared by both simulators.
  RngStream xrng(seed, StreamKind::Generic, 0);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = xrng.normal();

  const std::vector<std::string> names = {"beta1", "beta1_sq", "sigma2",
                                          "log_sigma2", "beta1_beta2"};

  // Marginal-conditional: i.i.d. draws from prior x likelihood.
  std::vector<std::vector<double>> mc(names.size());
  {
    RngStream rng(seed, StreamKind::Oracle, 1);
    for (int i = 0; i < n_draws; ++i) {
      McmcState s = draw_prior_state(kernel, prior, p, rng);
      (void)draw_response(x, s, rng);  // y is irrelevant to the test functions
      record(s, mc);
    }
  }

  // Successive-conditional: alternate one kernel sweep with a fresh y.
  std::vector<std::vector<double>> sc(names.size());
  {
    RngStream rng(seed, StreamKind::Oracle, 2);
    McmcState s = draw_prior_state(kernel, prior, p, rng);
    Eigen::VectorXd y = draw_response(x, s, rng);
    for (int i = 0; i < n_draws; ++i) {
      Dataset d;
      d.X = x;
      d.y = y;
      McmcKernel k(d, prior);
      if (mode == GewekeMode::CorruptSigmaShape) k.set_sigma2_shape_corruption(1.0);
      k.sweep(s, rng, i);
      y = draw_response(x, s, rng);
      record(s, sc);
    }
  }

  std::vector<GewekeResult> out;
  for (std::size_t f = 0; f < names.size(); ++f) {
    const auto& a = mc[f];
    const auto& b = sc[f];
    auto mean_of = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x_ : v) m += x_;
      return m / static_cast<double>(v.size());
    };
    double ma = mean_of(a), mb = mean_of(b);
    double sa = 0.0;
    for (double v : a) sa += (v - ma) * (v - ma);
    double se_a = std::sqrt(sa / static_cast<double>(a.size() - 1) /
                            static_cast<double>(a.size()));
    double se_b = batch_means_se(b);
    GewekeResult r;
    r.test_function = names[f];
    r.mean_marginal = ma;
    r.se_marginal = se_a;
    r.mean_successive = mb;
    r.se_successive = se_b;
    r.z = (ma - mb) / std::sqrt(se_a * se_a + se_b * se_b);
    out.push_back(std::move(r));
  }
  return out;
}

void write_report_csv(std::ostream& os, const ExperimentReport& report) {
  os << "method,replication,metric,value\n";
  os << std::setprecision(17);
  auto emit = [&](Method m, const char* metric, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      os << method_name(m) << "," << i << "," << metric << "," << v[i] << "\n";
  };
  for (Method m : report.methods) {
    auto it = report.series.find(m);
    if (it == report.series.end()) continue;
    emit(m, "mse", it->second.mse);
    emit(m, "mse_median", it->second.mse_median);
    emit(m, "ge", it->second.ge);
    emit(m, "ge_sum", it->second.ge_sum);
  }
}

namespace {

nlohmann::json metric_summary(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  std::vector<double> s = v;
  std::sort(s.begin(), s.end());
  auto quant = [&](double prob) {
    double h = (static_cast<double>(s.size()) - 1.0) * prob;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - std::floor(h)) * (s[hi] - s[lo]);
  };
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return {{"n", v.size()},   {"mean", mean},        {"median", quant(0.5)},
          {"q25", quant(0.25)}, {"q75", quant(0.75)}, {"min", s.front()},
          {"max", s.back()}};
}

}  // namespace

void write_report_json(std::ostream& os, const ExperimentReport& report) {
  nlohmann::json j;
  j["master_seed"] = report.master_seed;
  j["n_requested"] = report.n_requested;
  j["failed"] = report.failed;
  j["warnings"] = report.warnings;
  j["config"] = report.config_echo;
  for (Method m : report.methods) {
    auto it = report.series.find(m);
    if (it == report.series.end()) continue;
    nlohmann::json jm;
    jm["mse"] = metric_summary(it->second.mse);
    if (!it->second.mse_median.empty())
      jm["mse_median"] = metric_summary(it->second.mse_median);
    if (!it->second.ge.empty()) {
      jm["ge"] = metric_summary(it->second.ge);
      jm["ge_sum"] = metric_summary(it->second.ge_sum);
    }
    j["methods"][method_name(m)] = jm;
  }
  os << j.dump(2) << "\n";
}

}  // namespace bpr
