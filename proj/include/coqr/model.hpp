#ifndef COQR_MODEL_HPP
#define COQR_MODEL_HPP

#include <Eigen/Dense>
#include <memory>

#include "coqr/errors.hpp"
#include "coqr/lp.hpp"

namespace coqr {

// Response paired with covariate rows on the open simplex (every entry
// strictly positive, rows summing to one within 1e-8).
struct CompositionalDataset {
  Eigen::MatrixXd covariates;  // n x p
  Eigen::VectorXd response;    // n

  CompositionalDataset(Eigen::MatrixXd x, Eigen::VectorXd y);
};

// Divide each row of a positive matrix by its row sum.
Eigen::MatrixXd closure(const Eigen::MatrixXd& raw);

// Column-centered log covariates and centered response, with the offsets
// retained so fitted models can predict on new rows.
struct LogContrastDesign {
  Eigen::MatrixXd z;        // n x p, column means zero
  Eigen::VectorXd yc;       // centered response
  Eigen::VectorXd z_means;  // column means of log covariates
  double y_mean = 0.0;

  int n() const { return static_cast<int>(z.rows()); }
  int p() const { return static_cast<int>(z.cols()); }
};

LogContrastDesign log_contrast_design(const CompositionalDataset& data);

// Design straight from positive covariates: optionally apply closure, then
// take logs and center. The zero-sum constraint makes the closure step
// mathematically inert, so this is the single entry point for both the
// compositional and raw-covariate treatments.
LogContrastDesign make_design(const Eigen::MatrixXd& positive_covariates,
                              const Eigen::VectorXd& response,
                              bool apply_closure = true);

// rho_tau(u) = u * (tau - 1{u < 0})
double check_loss(double u, double tau);
double check_loss_sum(const Eigen::VectorXd& residuals, double tau);

// Slack-variable linear programs over gamma = (beta+, beta-, u, v, b0+, b0-).
//
// Mean-centering eliminates the mean intercept but not the tau-quantile one,
// so the program carries a free unpenalized location pair b0 = b0+ - b0-
// after the slack blocks. Least squares does not need it (centering profiles
// the mean intercept exactly); the check loss does, and without it the
// skewed-error studies are not reproducible.
LPProblem build_unpenalized_lp(const LogContrastDesign& design, double tau);
LPProblem build_penalized_lp(const LogContrastDesign& design, double tau,
                             double lambda, const Eigen::VectorXd& weights);

struct QuantileFit {
  Eigen::VectorXd beta;       // length p, sums to zero
  double intercept = 0.0;     // tau-quantile location left after centering
  double tau = 0.5;
  double objective = 0.0;     // sum of check losses (penalty excluded)
  double penalty = 0.0;       // lambda * sum_j w_j |beta_j|
  Eigen::VectorXd residuals;  // yc - z beta - intercept
  double lambda = 0.0;
  Eigen::VectorXd weights;    // all ones when unpenalized
};

// Zero-sum quantile regression, solved through the slack-variable program.
QuantileFit fit_qr(const LogContrastDesign& design, double tau);

// Adaptive-LASSO penalized variant at a fixed lambda and weight vector.
QuantileFit fit_penalized(const LogContrastDesign& design, double tau,
                          double lambda, const Eigen::VectorXd& weights);

// Predicted responses for new positive covariate rows:
//   yhat = y_mean + (log x_new - z_means) . beta
Eigen::VectorXd predict(const QuantileFit& fit, const LogContrastDesign& design,
                        const Eigen::MatrixXd& new_rows);
Eigen::VectorXd predict(const Eigen::VectorXd& beta, const LogContrastDesign& design,
                        const Eigen::MatrixXd& new_rows);

// Holds one slack-variable program and re-solves it as the penalty level
// changes, reusing the previous optimal basis. A fresh instance per design
// and weight vector; lambdas may arrive in any order.
class PenalizedPathSolver {
public:
  PenalizedPathSolver(const LogContrastDesign& design, double tau,
                      const Eigen::VectorXd& weights);
  ~PenalizedPathSolver();
  PenalizedPathSolver(PenalizedPathSolver&&) noexcept;
  PenalizedPathSolver& operator=(PenalizedPathSolver&&) noexcept;

  QuantileFit fit(double lambda);

private:
  const LogContrastDesign* design_;
  double tau_;
  Eigen::VectorXd weights_;
  std::unique_ptr<SimplexSolver> solver_;
  bool cold_ = true;
};

}  // namespace coqr

#endif  // COQR_MODEL_HPP
