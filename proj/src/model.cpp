#include "coqr/model.hpp"

#include <cmath>
#include <string>

namespace coqr {

namespace {

void require_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw TauOutOfRange("tau must lie strictly between 0 and 1, got " +
                        std::to_string(tau));
}

void require_positive(const Eigen::MatrixXd& x, const char* what) {
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (!(x(i, j) > 0.0) || !std::isfinite(x(i, j)))
        throw NonPositiveEntry(std::string(what) + ": entry (" + std::to_string(i) +
                               "," + std::to_string(j) + ") = " +
                               std::to_string(x(i, j)) + " is not strictly positive");
}

// Builds gamma = (beta+, beta-, u, v, b0+, b0-) cost and constraints shared
// by the penalized and unpenalized programs; only the cost head differs.
LPProblem assemble_lp(const LogContrastDesign& design, double tau,
                      const Eigen::VectorXd& beta_cost) {
  const int n = design.n();
  const int p = design.p();
  if (n < 1) throw EmptyDesign("design has no observations");
  if (p < 2) throw EmptyDesign("design needs at least two components");

  const int m = 2 * p + 2 * n + 2;
  LPProblem lp;
  lp.cost = Eigen::VectorXd::Zero(m);
  lp.cost.head(p) = beta_cost;
  lp.cost.segment(p, p) = beta_cost;
  lp.cost.segment(2 * p, n).setConstant(tau);
  lp.cost.segment(2 * p + n, n).setConstant(1.0 - tau);

  lp.aeq = Eigen::MatrixXd::Zero(1 + n, m);
  lp.aeq.row(0).head(p).setOnes();
  lp.aeq.row(0).segment(p, p).setConstant(-1.0);
  lp.aeq.block(1, 0, n, p) = design.z;
  lp.aeq.block(1, p, n, p) = -design.z;
  lp.aeq.block(1, 2 * p, n, n).setIdentity();
  lp.aeq.block(1, 2 * p + n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  lp.aeq.block(1, 2 * p + 2 * n, n, 1).setOnes();
  lp.aeq.block(1, 2 * p + 2 * n + 1, n, 1).setConstant(-1.0);

  lp.beq = Eigen::VectorXd::Zero(1 + n);
  lp.beq.tail(n) = design.yc;
  return lp;
}

QuantileFit extract_fit(const LogContrastDesign& design, double tau, double lambda,
                        const Eigen::VectorXd& weights, const LPSolution& sol) {
  const int n = design.n();
  const int p = design.p();
  if (sol.status == LpStatus::Infeasible)
    throw NumericalError("quantile program reported infeasible (slack columns always admit a solution)");
  if (sol.status == LpStatus::Unbounded)
    throw NumericalError("quantile program reported unbounded");

  QuantileFit fit;
  fit.tau = tau;
  fit.lambda = lambda;
  fit.weights = weights;
  fit.beta = sol.gamma.head(p) - sol.gamma.segment(p, p);
  fit.intercept = sol.gamma[2 * p + 2 * n] - sol.gamma[2 * p + 2 * n + 1];
  fit.residuals = (design.yc - design.z * fit.beta).array() - fit.intercept;
  fit.objective = check_loss_sum(fit.residuals, tau);
  fit.penalty = lambda * weights.dot(fit.beta.cwiseAbs());

  const double lp_loss = tau * sol.gamma.segment(2 * p, n).sum() +
                         (1.0 - tau) * sol.gamma.segment(2 * p + n, n).sum();
  if (std::abs(lp_loss - fit.objective) > 1e-7 * (1.0 + fit.objective))
    throw NumericalError("quantile program objective inconsistent with recomputed check loss: " +
                         std::to_string(lp_loss) + " vs " + std::to_string(fit.objective));
  if (std::abs(fit.beta.sum()) > 1e-7)
    throw NumericalError("fitted coefficients violate the zero-sum constraint: sum = " +
                         std::to_string(fit.beta.sum()));
  return fit;
}

}  // namespace

CompositionalDataset::CompositionalDataset(Eigen::MatrixXd x, Eigen::VectorXd y)
    : covariates(std::move(x)), response(std::move(y)) {
  if (covariates.rows() != response.size())
    throw DimensionMismatch("dataset: " + std::to_string(covariates.rows()) +
                            " covariate rows vs " + std::to_string(response.size()) +
                            " responses");
  if (!response.allFinite()) throw NonFiniteInput("dataset: non-finite response");
  require_positive(covariates, "dataset");
  for (Eigen::Index i = 0; i < covariates.rows(); ++i) {
    const double s = covariates.row(i).sum();
    if (std::abs(s - 1.0) > 1e-8)
      throw InputError("dataset: row " + std::to_string(i) + " sums to " +
                       std::to_string(s) + ", not 1; apply closure first");
  }
}

Eigen::MatrixXd closure(const Eigen::MatrixXd& raw) {
  require_positive(raw, "closure");
  Eigen::MatrixXd out = raw;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) /= out.row(i).sum();
  return out;
}

LogContrastDesign log_contrast_design(const CompositionalDataset& data) {
  LogContrastDesign design;
  design.z = data.covariates.array().log().matrix();
  design.z_means = design.z.colwise().mean();
  design.z.rowwise() -= design.z_means.transpose();
  design.y_mean = data.response.mean();
  design.yc = data.response.array() - design.y_mean;
  return design;
}

LogContrastDesign make_design(const Eigen::MatrixXd& positive_covariates,
                              const Eigen::VectorXd& response, bool apply_closure) {
  if (apply_closure)
    return log_contrast_design(CompositionalDataset(closure(positive_covariates), response));
  require_positive(positive_covariates, "design");
  if (positive_covariates.rows() != response.size())
    throw DimensionMismatch("design: covariate rows vs response length");
  if (!response.allFinite()) throw NonFiniteInput("design: non-finite response");
  LogContrastDesign design;
  design.z = positive_covariates.array().log().matrix();
  design.z_means = design.z.colwise().mean();
  design.z.rowwise() -= design.z_means.transpose();
  design.y_mean = response.mean();
  design.yc = response.array() - design.y_mean;
  return design;
}

double check_loss(double u, double tau) {
  require_tau(tau);
  return u >= 0.0 ? tau * u : (tau - 1.0) * u;
}

double check_loss_sum(const Eigen::VectorXd& residuals, double tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i)
    total += residuals[i] >= 0.0 ? tau * residuals[i] : (tau - 1.0) * residuals[i];
  return total;
}

LPProblem build_unpenalized_lp(const LogContrastDesign& design, double tau) {
  require_tau(tau);
  return assemble_lp(design, tau, Eigen::VectorXd::Zero(design.p()));
}

LPProblem build_penalized_lp(const LogContrastDesign& design, double tau,
                             double lambda, const Eigen::VectorXd& weights) {
  require_tau(tau);
  if (lambda < 0.0)
    throw NegativeLambda("lambda must be nonnegative, got " + std::to_string(lambda));
  if (weights.size() != design.p())
    throw DimensionMismatch("weights length " + std::to_string(weights.size()) +
                            " != p = " + std::to_string(design.p()));
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]))
      throw NonPositiveWeight("weight " + std::to_string(j) + " = " +
                              std::to_string(weights[j]) + " must be positive and finite");
  return assemble_lp(design, tau, lambda * weights);
}

QuantileFit fit_qr(const LogContrastDesign& design, double tau) {
  require_tau(tau);
  if (design.n() < 2) throw DegenerateDesign("quantile fit needs at least two observations");
  SimplexSolver solver(build_unpenalized_lp(design, tau));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(design.p());
  return extract_fit(design, tau, 0.0, ones, solver.solve());
}

QuantileFit fit_penalized(const LogContrastDesign& design, double tau, double lambda,
                          const Eigen::VectorXd& weights) {
  PenalizedPathSolver path(design, tau, weights);
  return path.fit(lambda);
}

Eigen::VectorXd predict(const Eigen::VectorXd& beta, const LogContrastDesign& design,
                        const Eigen::MatrixXd& new_rows) {
  if (new_rows.cols() != design.p())
    throw DimensionMismatch("predict: " + std::to_string(new_rows.cols()) +
                            " columns vs p = " + std::to_string(design.p()));
  if (beta.size() != design.p())
    throw DimensionMismatch("predict: coefficient length vs p");
  require_positive(new_rows, "predict");
  Eigen::MatrixXd contrast = new_rows.array().log().matrix();
  contrast.rowwise() -= design.z_means.transpose();
  return (contrast * beta).array() + design.y_mean;
}

Eigen::VectorXd predict(const QuantileFit& fit, const LogContrastDesign& design,
                        const Eigen::MatrixXd& new_rows) {
  return predict(fit.beta, design, new_rows).array() + fit.intercept;
}

PenalizedPathSolver::PenalizedPathSolver(const LogContrastDesign& design, double tau,
                                         const Eigen::VectorXd& weights)
    : design_(&design), tau_(tau), weights_(weights) {
  require_tau(tau);
  if (design.n() < 2) throw DegenerateDesign("quantile fit needs at least two observations");
}

PenalizedPathSolver::~PenalizedPathSolver() = default;
PenalizedPathSolver::PenalizedPathSolver(PenalizedPathSolver&&) noexcept = default;
PenalizedPathSolver& PenalizedPathSolver::operator=(PenalizedPathSolver&&) noexcept = default;

QuantileFit PenalizedPathSolver::fit(double lambda) {
  if (cold_) {
    cold_ = false;
    solver_ = std::make_unique<SimplexSolver>(
        build_penalized_lp(*design_, tau_, lambda, weights_));
    return extract_fit(*design_, tau_, lambda, weights_, solver_->solve());
  }
  // Only the cost head over (beta+, beta-) changes with lambda; the slack
  // blocks and constraints are shared, so the solver keeps its basis.
  if (lambda < 0.0)
    throw NegativeLambda("lambda must be nonnegative, got " + std::to_string(lambda));
  const int n = design_->n();
  const int p = design_->p();
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(2 * p + 2 * n + 2);
  cost.head(p) = lambda * weights_;
  cost.segment(p, p) = lambda * weights_;
  cost.segment(2 * p, n).setConstant(tau_);
  cost.segment(2 * p + n, n).setConstant(1.0 - tau_);
  return extract_fit(*design_, tau_, lambda, weights_,
                     solver_->resolve_with_cost(cost));
}

}  // namespace coqr
