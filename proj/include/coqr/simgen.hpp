#ifndef COQR_SIMGEN_HPP
#define COQR_SIMGEN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "coqr/model.hpp"
#include "coqr/rng.hpp"
#include "coqr/tuning.hpp"

namespace coqr {

// Error-term distributions of the simulation studies. Parameter readings:
//   Pareto21   shape a = 2, scale s = 1:       s * U^(-1/a)
//   Gpd        shape 0.2, location 0, scale 1.2: sigma*((1-U)^(-xi) - 1)/xi
//   Gev        shape 0.2, location 3, scale 1.5: mu + sigma*((-log U)^(-xi) - 1)/xi
enum class ErrorDist { Normal01, StudentT3, Pareto21, Gpd, Gev };

ErrorDist parse_error_dist(const std::string& tag);
std::string error_dist_name(ErrorDist dist);

struct SimulationConfig {
  int n = 0;
  int p = 0;
  Eigen::VectorXd mu;         // mean vector for the latent normal rows
  double rho = 0.2;           // AR correlation, Sigma_ab = rho^|a-b|
  Eigen::VectorXd beta_true;  // zero-sum coefficients
  ErrorDist error_dist = ErrorDist::Normal01;
  int replicates = 1;
  std::uint64_t seed = 0;
  double tau = 0.5;

  void validate() const;
};

// Rows of N_p(mu, Sigma) with Sigma_ab = rho^|a-b|, via the lower-triangular
// Cholesky factor.
Eigen::MatrixXd sample_mvn(int n, const Eigen::VectorXd& mu, double rho, Rng& rng);

// Compositional covariates: x_ij = exp(o_ij) / sum_k exp(o_ik).
Eigen::MatrixXd gen_covariates(int n, int p, const Eigen::VectorXd& mu, double rho,
                               Rng& rng);

Eigen::VectorXd gen_errors(ErrorDist dist, int n, Rng& rng);

// Y = (log X) * beta_true + errors. Requires sum(beta_true) = 0, which makes
// the response invariant to row rescaling of X.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_true,
                             const Eigen::VectorXd& errors);

// Least squares under the zero-sum constraint (the mean-regression
// comparator): minimize ||yc - z beta||^2 s.t. sum beta = 0, through the
// bordered normal equations; a trace-scaled ridge retry handles singular
// Gram matrices.
Eigen::VectorXd fit_constrained_ls(const LogContrastDesign& design);

// Per-method replicate summary. b_j and L1 are mean absolute coefficient
// errors; the selection counts are filled only by Example-2 style runs.
struct MetricsReport {
  Eigen::VectorXd bj;
  double l1 = 0.0;
  double tp = 0.0, tn = 0.0, fp = 0.0, fn = 0.0;
  bool has_selection = false;
};

// Mean absolute errors over replicate estimates.
MetricsReport summarize_estimates(const std::vector<Eigen::VectorXd>& betas,
                                  const Eigen::VectorXd& beta_true);
// As above plus averaged TP/TN/FP/FN against the true support:
// TP = nonzeros kept, TN = zeros removed, FP = zeros kept, FN = nonzeros removed.
MetricsReport summarize_selection(const std::vector<Eigen::VectorXd>& betas,
                                  const Eigen::VectorXd& beta_true,
                                  double zero_tol = 1e-6);

// Study settings: mu_j = log(0.5 p) on the first 3 (5) components.
Eigen::VectorXd example1_mu(int p);
Eigen::VectorXd example2_mu(int p);
Eigen::VectorXd example1_beta();        // (1, -0.8, 0.6, -1.5, -0.5, 1.2)
Eigen::VectorXd example2_beta(int p);   // (1, -0.8, 0.6, 0, 0, -1.5, -0.5, 1.2, 0, ...)

SimulationConfig example1_config(int n, ErrorDist dist, int replicates,
                                 std::uint64_t seed);
SimulationConfig example2_config(int n, int p, ErrorDist dist, int replicates,
                                 std::uint64_t seed);

struct Example1Report {
  MetricsReport mr;  // constrained least squares
  MetricsReport qr;  // quantile regression at config.tau
};

struct Example2Report {
  MetricsReport qr_ala;  // adaptive-LASSO quantile regression
};

// Estimation study: per replicate, fit both methods and accumulate
// coefficient errors. Replicate r draws from Rng(seed, r), covariates first,
// then errors, so runs are reproducible replicate by replicate.
Example1Report run_example1(const SimulationConfig& config);

// Selection study: per replicate, BIC-tuned adaptive-LASSO fit and selection
// counts against the true support.
Example2Report run_example2(const SimulationConfig& config, const GridSpec& grid = {});

}  // namespace coqr

#endif  // COQR_SIMGEN_HPP
