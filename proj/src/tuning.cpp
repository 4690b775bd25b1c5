#include "coqr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coqr {

namespace {
constexpr double kWeightFloor = 1e-8;
constexpr double kZeroLossTol = 1e-12;

// Any lambda at or above this bound forces beta = 0: moving along a feasible
// direction d (sum d = 0) changes the loss by at most
// max(tau, 1-tau) * sum_j |d_j| * ||z_col_j||_1, so once every
// lambda * w_j dominates its column bound the penalty wins.
double lambda_upper_bound(const LogContrastDesign& design, double tau,
                          const Eigen::VectorXd& weights) {
  const double slope = std::max(tau, 1.0 - tau);
  double bound = 0.0;
  for (int j = 0; j < design.p(); ++j) {
    const double col_l1 = design.z.col(j).cwiseAbs().sum();
    bound = std::max(bound, slope * col_l1 / weights[j]);
  }
  return std::max(bound, kWeightFloor);
}
}  // namespace

Eigen::VectorXd adaptive_weights(const Eigen::VectorXd& beta_tilde, double kappa) {
  Eigen::VectorXd w(beta_tilde.size());
  for (Eigen::Index j = 0; j < beta_tilde.size(); ++j)
    w[j] = 1.0 / std::pow(std::max(std::abs(beta_tilde[j]), kWeightFloor), kappa);
  return w;
}

int count_nonzero(const Eigen::VectorXd& beta, double zero_tol) {
  int df = 0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) > zero_tol) ++df;
  return df;
}

double bic(const LogContrastDesign& design, double tau, const QuantileFit& fit,
           double zero_tol) {
  (void)tau;
  const double loss = fit.objective;
  if (loss <= kZeroLossTol)
    throw ZeroLossDegenerate("bic: check-loss sum " + std::to_string(loss) +
                             " is numerically zero; log undefined");
  const double n = static_cast<double>(design.n());
  return std::log(loss) + (std::log(n) / n) * count_nonzero(fit.beta, zero_tol);
}

std::vector<double> make_lambda_grid(const LogContrastDesign& design, double tau,
                                     const Eigen::VectorXd& weights,
                                     const GridSpec& spec, double zero_tol) {
  if (!spec.explicit_lambdas.empty()) {
    std::vector<double> grid = spec.explicit_lambdas;
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    return grid;
  }
  if (spec.num_points < 1)
    throw InputError("grid: num_points must be at least 1");
  if (!(spec.span > 0.0 && spec.span <= 1.0))
    throw InputError("grid: span must lie in (0, 1]");

  PenalizedPathSolver path(design, tau, weights);
  double lambda = lambda_upper_bound(design, tau, weights);
  // Geometric bracketing: walk down while the fit stays empty, up while it
  // does not; lambda_max is the smallest tested lambda with df = 0.
  if (count_nonzero(path.fit(lambda).beta, zero_tol) == 0) {
    while (lambda > 1e-300 &&
           count_nonzero(path.fit(lambda / 2.0).beta, zero_tol) == 0)
      lambda /= 2.0;
  } else {
    do {
      lambda *= 2.0;
      if (!std::isfinite(lambda))
        throw NumericalError("grid: no penalty level empties the model");
    } while (count_nonzero(path.fit(lambda).beta, zero_tol) != 0);
  }

  std::vector<double> grid(spec.num_points);
  if (spec.num_points == 1) {
    grid[0] = lambda;
    return grid;
  }
  const double log_max = std::log(lambda);
  const double log_min = std::log(lambda * spec.span);
  for (int i = 0; i < spec.num_points; ++i) {
    const double t = static_cast<double>(i) / (spec.num_points - 1);
    grid[i] = std::exp(log_max + t * (log_min - log_max));
  }
  return grid;
}

std::pair<TuningPath, QuantileFit> fit_adaptive_lasso(const LogContrastDesign& design,
                                                      double tau, const GridSpec& spec) {
  const QuantileFit pilot = fit_qr(design, tau);
  const Eigen::VectorXd weights = adaptive_weights(pilot.beta, 1.0);

  TuningPath path;
  path.lambdas = make_lambda_grid(design, tau, weights, spec);

  PenalizedPathSolver solver(design, tau, weights);
  const double inf = std::numeric_limits<double>::infinity();
  bool any_ok = false;
  for (const double lambda : path.lambdas) {
    QuantileFit fit = solver.fit(lambda);
    path.dfs.push_back(count_nonzero(fit.beta));
    try {
      path.bics.push_back(bic(design, tau, fit));
      path.degenerate.push_back(false);
      any_ok = true;
    } catch (const ZeroLossDegenerate&) {
      path.bics.push_back(inf);
      path.degenerate.push_back(true);
    }
    path.fits.push_back(std::move(fit));
  }
  if (!any_ok)
    throw AllLambdasDegenerate("every grid point has numerically zero loss; "
                               "BIC cannot rank the path");

  path.selected_index = 0;
  for (std::size_t i = 1; i < path.bics.size(); ++i)
    if (path.bics[i] < path.bics[path.selected_index]) path.selected_index = i;

  QuantileFit chosen = path.fits[path.selected_index];
  return {std::move(path), std::move(chosen)};
}

}  // namespace coqr
