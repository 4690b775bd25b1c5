#ifndef COQR_TUNING_HPP
#define COQR_TUNING_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <utility>
#include <vector>

#include "coqr/model.hpp"

namespace coqr {

// Penalty-grid description. With an empty explicit grid, lambda_max is found
// by geometric search as the smallest tested lambda that zeroes every
// coefficient, and the grid is num_points log-spaced values descending from
// lambda_max to lambda_max * span.
struct GridSpec {
  int num_points = 50;
  double span = 1e-4;
  std::vector<double> explicit_lambdas;  // used verbatim (descending) when nonempty
};

// w_j = 1 / max(|beta_tilde_j|, 1e-8)^kappa; zeroed pilot coefficients get
// weight 1e8 instead of an infinite weight, keeping the program well posed.
Eigen::VectorXd adaptive_weights(const Eigen::VectorXd& beta_tilde, double kappa = 1.0);

// Number of coefficients with |beta_j| above the zero tolerance.
int count_nonzero(const Eigen::VectorXd& beta, double zero_tol = 1e-6);

// BIC(lambda) = log(sum of check losses) + (log n / n) * df.
// Throws ZeroLossDegenerate when the loss sum is at or below 1e-12.
double bic(const LogContrastDesign& design, double tau, const QuantileFit& fit,
           double zero_tol = 1e-6);

struct TuningPath {
  std::vector<double> lambdas;  // descending
  std::vector<QuantileFit> fits;
  std::vector<int> dfs;
  std::vector<double> bics;        // +inf at degenerate grid points
  std::vector<bool> degenerate;    // zero-loss flags, excluded from selection
  std::size_t selected_index = 0;  // argmin of bics, first index on ties
};

// Descending penalty grid for a design: geometric bracketing for lambda_max
// (reusing one path solver), then num_points log-spaced values.
std::vector<double> make_lambda_grid(const LogContrastDesign& design, double tau,
                                     const Eigen::VectorXd& weights,
                                     const GridSpec& spec, double zero_tol = 1e-6);

// Full pipeline: pilot fit, adaptive weights (kappa = 1), per-lambda
// penalized fits, BIC selection. Returns the path and the selected fit.
std::pair<TuningPath, QuantileFit> fit_adaptive_lasso(const LogContrastDesign& design,
                                                      double tau,
                                                      const GridSpec& spec = {});

}  // namespace coqr

#endif  // COQR_TUNING_HPP
