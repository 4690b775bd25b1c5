#ifndef COQR_EVAL_HPP
#define COQR_EVAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "coqr/model.hpp"
#include "coqr/rng.hpp"
#include "coqr/tuning.hpp"

namespace coqr {

// Y = log(b / (100 - b)) for a percentage response b in (0, 100).
double logit_response(double percent);

// Fold assignment per row, values in [0, folds). Balanced by construction:
// a shuffle followed by round-robin assignment.
struct SplitPlan {
  std::vector<int> assignment;
  int folds = 0;
  std::uint64_t seed = 0;
};

SplitPlan make_folds(int n, int folds, Rng& rng);

// sum (y_i - yhat_i)^2 / sum (y_j - ybar)^2, both sums over the test set.
// ybar defaults to the test-set mean; pass reference_mean to center the
// denominator elsewhere (e.g. on the training mean).
double nmse(const Eigen::VectorXd& y_test, const Eigen::VectorXd& y_pred,
            std::optional<double> reference_mean = {});

// Cross-validated penalty selection: the grid is built once on the full
// design; each fold re-centers its own training rows, refits the pilot and
// weights, walks the grid, and scores held-out check loss. Returns the
// lambda with the smallest pooled held-out loss (largest lambda on ties).
double cv_select_lambda(const LogContrastDesign& design, double tau, int folds,
                        const GridSpec& spec, Rng& rng);

struct ApplicationConfig {
  double tau = 0.5;
  int repeats = 100;
  int cv_folds = 10;
  bool apply_closure = true;
  GridSpec grid;
  std::uint64_t seed = 0;
};

struct MethodSummary {
  double mean_nmse = 0.0;
  double sd_nmse = 0.0;
  std::vector<double> per_repeat;
};

struct ApplicationSummary {
  MethodSummary qr_ala;       // CV-tuned adaptive-LASSO quantile regression
  MethodSummary ls_baseline;  // unpenalized constrained least squares
};

// Repeated random 90/10 splits: train (closure when configured, centering,
// CV-tuned adaptive-LASSO fit plus the least-squares baseline), then NMSE on
// the held-out tenth. Repeat r uses Rng(seed, r).
ApplicationSummary run_application(const Eigen::MatrixXd& covariates,
                                   const Eigen::VectorXd& response,
                                   const ApplicationConfig& config);

}  // namespace coqr

#endif  // COQR_EVAL_HPP
