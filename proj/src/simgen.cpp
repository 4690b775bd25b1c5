#include "coqr/simgen.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <vector>

#include "coqr/parallel.hpp"

namespace coqr {

ErrorDist parse_error_dist(const std::string& tag) {
  if (tag == "normal" || tag == "n01") return ErrorDist::Normal01;
  if (tag == "t3" || tag == "t") return ErrorDist::StudentT3;
  if (tag == "pareto") return ErrorDist::Pareto21;
  if (tag == "gpd") return ErrorDist::Gpd;
  if (tag == "gev") return ErrorDist::Gev;
  throw UnsupportedDistribution("unknown error distribution '" + tag +
                                "' (expected normal|t3|pareto|gpd|gev)");
}

std::string error_dist_name(ErrorDist dist) {
  switch (dist) {
    case ErrorDist::Normal01: return "normal";
    case ErrorDist::StudentT3: return "t3";
    case ErrorDist::Pareto21: return "pareto";
    case ErrorDist::Gpd: return "gpd";
    case ErrorDist::Gev: return "gev";
  }
  throw UnsupportedDistribution("unmapped error distribution tag");
}

void SimulationConfig::validate() const {
  if (n < 2) throw InputError("simulation: n must be at least 2");
  if (p < 2) throw InputError("simulation: p must be at least 2");
  if (mu.size() != p) throw DimensionMismatch("simulation: mu length != p");
  if (!(rho >= 0.0 && rho < 1.0))
    throw InputError("simulation: rho must lie in [0, 1)");
  if (beta_true.size() != p)
    throw DimensionMismatch("simulation: beta_true length != p");
  if (std::abs(beta_true.sum()) > 1e-8)
    throw InputError("simulation: beta_true must sum to zero");
  if (replicates < 1) throw InputError("simulation: replicates must be at least 1");
  if (!(tau > 0.0 && tau < 1.0)) throw TauOutOfRange("simulation: tau out of (0,1)");
}

Eigen::MatrixXd sample_mvn(int n, const Eigen::VectorXd& mu, double rho, Rng& rng) {
  const int p = static_cast<int>(mu.size());
  if (!(rho >= 0.0 && rho < 1.0)) throw InputError("sample_mvn: rho must lie in [0, 1)");
  Eigen::MatrixXd sigma(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) sigma(a, b) = std::pow(rho, std::abs(a - b));
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw FactorizationFailure("sample_mvn: AR(1) covariance failed to factor");
  const Eigen::MatrixXd chol = llt.matrixL();

  Eigen::MatrixXd out(n, p);
  Eigen::VectorXd g(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) g[j] = rng.normal();
    out.row(i) = (mu + chol * g).transpose();
  }
  return out;
}

Eigen::MatrixXd gen_covariates(int n, int p, const Eigen::VectorXd& mu, double rho,
                               Rng& rng) {
  if (mu.size() != p) throw DimensionMismatch("gen_covariates: mu length != p");
  Eigen::MatrixXd latent = sample_mvn(n, mu, rho, rng);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    const double shift = latent.row(i).maxCoeff();
    x.row(i) = (latent.row(i).array() - shift).exp();
    x.row(i) /= x.row(i).sum();
  }
  return x;
}

Eigen::VectorXd gen_errors(ErrorDist dist, int n, Rng& rng) {
  Eigen::VectorXd e(n);
  switch (dist) {
    case ErrorDist::Normal01:
      for (int i = 0; i < n; ++i) e[i] = rng.normal();
      break;
    case ErrorDist::StudentT3:
      for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        const double a = rng.normal(), b = rng.normal(), c = rng.normal();
        e[i] = z / std::sqrt((a * a + b * b + c * c) / 3.0);
      }
      break;
    case ErrorDist::Pareto21:
      for (int i = 0; i < n; ++i) e[i] = std::pow(rng.uniform01(), -0.5);
      break;
    case ErrorDist::Gpd: {
      const double xi = 0.2, sigma = 1.2;
      for (int i = 0; i < n; ++i)
        e[i] = sigma * (std::pow(1.0 - rng.uniform01(), -xi) - 1.0) / xi;
      break;
    }
    case ErrorDist::Gev: {
      const double xi = 0.2, mu = 3.0, sigma = 1.5;
      for (int i = 0; i < n; ++i)
        e[i] = mu + sigma * (std::pow(-std::log(rng.uniform01()), -xi) - 1.0) / xi;
      break;
    }
  }
  return e;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_true,
                             const Eigen::VectorXd& errors) {
  if (x.cols() != beta_true.size())
    throw DimensionMismatch("gen_response: beta_true length != covariate columns");
  if (x.rows() != errors.size())
    throw DimensionMismatch("gen_response: error length != covariate rows");
  return x.array().log().matrix() * beta_true + errors;
}

Eigen::VectorXd fit_constrained_ls(const LogContrastDesign& design) {
  const int p = design.p();
  const Eigen::MatrixXd gram = design.z.transpose() * design.z;
  const Eigen::VectorXd zty = design.z.transpose() * design.yc;

  auto assemble = [&](const Eigen::MatrixXd& g) {
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(p + 1, p + 1);
    kkt.topLeftCorner(p, p) = g;
    kkt.topRightCorner(p, 1).setOnes();
    kkt.bottomLeftCorner(1, p).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
    rhs.head(p) = zty;
    return std::make_pair(kkt, rhs);
  };

  auto [kkt, rhs] = assemble(gram);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    const double jitter = 1e-10 * gram.trace() / p;
    Eigen::MatrixXd ridged = gram;
    ridged.diagonal().array() += jitter;
    std::tie(kkt, rhs) = assemble(ridged);
    lu.compute(kkt);
    if (!lu.isInvertible())
      throw SingularSystem("constrained least squares: system singular after ridge jitter");
  }
  Eigen::VectorXd beta = lu.solve(rhs).head(p);
  if (std::abs(beta.sum()) > 1e-8)
    throw NumericalError("constrained least squares: zero-sum violated: " +
                         std::to_string(beta.sum()));
  return beta;
}

MetricsReport summarize_estimates(const std::vector<Eigen::VectorXd>& betas,
                                  const Eigen::VectorXd& beta_true) {
  if (betas.empty()) throw InputError("summarize: no replicate estimates");
  const int p = static_cast<int>(beta_true.size());
  MetricsReport report;
  report.bj = Eigen::VectorXd::Zero(p);
  for (const auto& beta : betas) {
    if (beta.size() != p) throw DimensionMismatch("summarize: estimate length != p");
    report.bj += (beta - beta_true).cwiseAbs();
  }
  report.bj /= static_cast<double>(betas.size());
  report.l1 = report.bj.sum();
  return report;
}

MetricsReport summarize_selection(const std::vector<Eigen::VectorXd>& betas,
                                  const Eigen::VectorXd& beta_true, double zero_tol) {
  MetricsReport report = summarize_estimates(betas, beta_true);
  report.has_selection = true;
  for (const auto& beta : betas) {
    for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
      const bool truly_nonzero = beta_true[j] != 0.0;
      const bool kept = std::abs(beta[j]) > zero_tol;
      if (truly_nonzero && kept) report.tp += 1.0;
      else if (truly_nonzero && !kept) report.fn += 1.0;
      else if (!truly_nonzero && kept) report.fp += 1.0;
      else report.tn += 1.0;
    }
  }
  const double r = static_cast<double>(betas.size());
  report.tp /= r;
  report.tn /= r;
  report.fp /= r;
  report.fn /= r;
  return report;
}

Eigen::VectorXd example1_mu(int p) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < std::min(p, 3); ++j) mu[j] = std::log(0.5 * p);
  return mu;
}

Eigen::VectorXd example2_mu(int p) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < std::min(p, 5); ++j) mu[j] = std::log(0.5 * p);
  return mu;
}

Eigen::VectorXd example1_beta() {
  Eigen::VectorXd beta(6);
  beta << 1.0, -0.8, 0.6, -1.5, -0.5, 1.2;
  return beta;
}

Eigen::VectorXd example2_beta(int p) {
  if (p < 8) throw InputError("example 2 needs p >= 8");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta[0] = 1.0;
  beta[1] = -0.8;
  beta[2] = 0.6;
  beta[5] = -1.5;
  beta[6] = -0.5;
  beta[7] = 1.2;
  return beta;
}

SimulationConfig example1_config(int n, ErrorDist dist, int replicates,
                                 std::uint64_t seed) {
  SimulationConfig config;
  config.n = n;
  config.p = 6;
  config.mu = example1_mu(config.p);
  config.rho = 0.2;
  config.beta_true = example1_beta();
  config.error_dist = dist;
  config.replicates = replicates;
  config.seed = seed;
  return config;
}

SimulationConfig example2_config(int n, int p, ErrorDist dist, int replicates,
                                 std::uint64_t seed) {
  SimulationConfig config;
  config.n = n;
  config.p = p;
  config.mu = example2_mu(p);
  config.rho = 0.2;
  config.beta_true = example2_beta(p);
  config.error_dist = dist;
  config.replicates = replicates;
  config.seed = seed;
  return config;
}

namespace {

// One replicate's data, drawn from the replicate's own stream.
LogContrastDesign replicate_design(const SimulationConfig& config, int replicate) {
  Rng rng(config.seed, static_cast<std::uint64_t>(replicate));
  const Eigen::MatrixXd x = gen_covariates(config.n, config.p, config.mu, config.rho, rng);
  const Eigen::VectorXd errors = gen_errors(config.error_dist, config.n, rng);
  const Eigen::VectorXd y = gen_response(x, config.beta_true, errors);
  return log_contrast_design(CompositionalDataset(x, y));
}

}  // namespace

Example1Report run_example1(const SimulationConfig& config) {
  config.validate();
  std::vector<Eigen::VectorXd> mr_betas(config.replicates), qr_betas(config.replicates);
  parallel_for(config.replicates, [&](int r) {
    const LogContrastDesign design = replicate_design(config, r);
    mr_betas[r] = fit_constrained_ls(design);
    qr_betas[r] = fit_qr(design, config.tau).beta;
  });
  Example1Report report;
  report.mr = summarize_estimates(mr_betas, config.beta_true);
  report.qr = summarize_estimates(qr_betas, config.beta_true);
  return report;
}

Example2Report run_example2(const SimulationConfig& config, const GridSpec& grid) {
  config.validate();
  std::vector<Eigen::VectorXd> betas(config.replicates);
  parallel_for(config.replicates, [&](int r) {
    const LogContrastDesign design = replicate_design(config, r);
    betas[r] = fit_adaptive_lasso(design, config.tau, grid).second.beta;
  });
  Example2Report report;
  report.qr_ala = summarize_selection(betas, config.beta_true);
  return report;
}

}  // namespace coqr
