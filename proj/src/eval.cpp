#include "coqr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coqr/parallel.hpp"
#include "coqr/simgen.hpp"

namespace coqr {

double logit_response(double percent) {
  if (!(percent > 0.0 && percent < 100.0))
    throw OutOfDomain("logit response needs a percentage strictly inside (0, 100), got " +
                      std::to_string(percent));
  return std::log(percent / (100.0 - percent));
}

SplitPlan make_folds(int n, int folds, Rng& rng) {
  if (folds < 2) throw FoldTooSmall("need at least 2 folds");
  if (n < folds)
    throw FoldTooSmall("cannot split " + std::to_string(n) + " rows into " +
                       std::to_string(folds) + " nonempty folds");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  SplitPlan plan;
  plan.folds = folds;
  plan.assignment.assign(n, 0);
  for (int i = 0; i < n; ++i) plan.assignment[order[i]] = i % folds;
  return plan;
}

double nmse(const Eigen::VectorXd& y_test, const Eigen::VectorXd& y_pred,
            std::optional<double> reference_mean) {
  if (y_test.size() != y_pred.size())
    throw DimensionMismatch("nmse: prediction length != response length");
  if (y_test.size() == 0) throw InputError("nmse: empty test set");
  const double mean = reference_mean.value_or(y_test.mean());
  const double denom = (y_test.array() - mean).square().sum();
  if (denom <= 1e-12 * (1.0 + mean * mean))
    throw ConstantResponse("nmse: test responses are constant");
  return (y_test - y_pred).squaredNorm() / denom;
}

namespace {

// Design from a row subset, re-centered on that subset's own logs.
LogContrastDesign subset_design(const Eigen::MatrixXd& logs, const Eigen::VectorXd& y,
                                const std::vector<int>& rows) {
  LogContrastDesign design;
  design.z.resize(static_cast<Eigen::Index>(rows.size()), logs.cols());
  design.yc.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    design.z.row(static_cast<Eigen::Index>(i)) = logs.row(rows[i]);
    design.yc[static_cast<Eigen::Index>(i)] = y[rows[i]];
  }
  design.z_means = design.z.colwise().mean();
  design.z.rowwise() -= design.z_means.transpose();
  design.y_mean = design.yc.mean();
  design.yc.array() -= design.y_mean;
  return design;
}

}  // namespace

double cv_select_lambda(const LogContrastDesign& design, double tau, int folds,
                        const GridSpec& spec, Rng& rng) {
  const int n = design.n();
  if (n < folds)
    throw FoldTooSmall("cross validation needs n >= folds, got n = " + std::to_string(n));

  // Raw-equivalent rows of the design: uncentered logs and responses.
  Eigen::MatrixXd logs = design.z;
  logs.rowwise() += design.z_means.transpose();
  Eigen::VectorXd y = design.yc.array() + design.y_mean;

  // One grid for all folds, anchored on the full-data pilot weights.
  const QuantileFit pilot = fit_qr(design, tau);
  const std::vector<double> grid =
      make_lambda_grid(design, tau, adaptive_weights(pilot.beta), spec);

  const SplitPlan plan = make_folds(n, folds, rng);
  std::vector<double> held_out_loss(grid.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < n; ++i)
      (plan.assignment[i] == f ? test_rows : train_rows).push_back(i);

    const LogContrastDesign train = subset_design(logs, y, train_rows);
    const Eigen::VectorXd fold_weights = adaptive_weights(fit_qr(train, tau).beta);
    PenalizedPathSolver solver(train, tau, fold_weights);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const QuantileFit fit = solver.fit(grid[g]);
      double loss = 0.0;
      for (const int t : test_rows) {
        const double contrast = (logs.row(t).transpose() - train.z_means).dot(fit.beta);
        loss += check_loss(y[t] - (train.y_mean + fit.intercept + contrast), tau);
      }
      held_out_loss[g] += loss;
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (held_out_loss[g] < held_out_loss[best]) best = g;
  return grid[best];
}

ApplicationSummary run_application(const Eigen::MatrixXd& covariates,
                                   const Eigen::VectorXd& response,
                                   const ApplicationConfig& config) {
  const int n = static_cast<int>(covariates.rows());
  if (n != response.size())
    throw DimensionMismatch("run_application: covariate rows != response length");
  if (config.repeats < 1) throw InputError("run_application: repeats must be at least 1");
  if (n < 20) throw InputError("run_application: needs at least 20 rows for 90/10 splits");

  const int n_test = std::max(2, n / 10);
  std::vector<double> qr_scores(config.repeats), ls_scores(config.repeats);

  parallel_for(config.repeats, [&](int r) {
    Rng rng(config.seed, static_cast<std::uint64_t>(r));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    const std::vector<int> test_rows(order.begin(), order.begin() + n_test);
    const std::vector<int> train_rows(order.begin() + n_test, order.end());

    auto rows_of = [&](const std::vector<int>& rows, Eigen::MatrixXd& x, Eigen::VectorXd& y) {
      x.resize(static_cast<Eigen::Index>(rows.size()), covariates.cols());
      y.resize(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) = covariates.row(rows[i]);
        y[static_cast<Eigen::Index>(i)] = response[rows[i]];
      }
    };
    Eigen::MatrixXd x_train, x_test;
    Eigen::VectorXd y_train, y_test;
    rows_of(train_rows, x_train, y_train);
    rows_of(test_rows, x_test, y_test);

    const LogContrastDesign design = make_design(x_train, y_train, config.apply_closure);
    const Eigen::MatrixXd x_test_arm = config.apply_closure ? closure(x_test) : x_test;

    const double lambda_opt =
        cv_select_lambda(design, config.tau, config.cv_folds, config.grid, rng);
    const Eigen::VectorXd weights = adaptive_weights(fit_qr(design, config.tau).beta);
    const QuantileFit fit = fit_penalized(design, config.tau, lambda_opt, weights);
    qr_scores[r] = nmse(y_test, predict(fit, design, x_test_arm));

    ls_scores[r] = nmse(y_test, predict(fit_constrained_ls(design), design, x_test_arm));
  });

  auto summarize = [](const std::vector<double>& scores) {
    MethodSummary s;
    s.per_repeat = scores;
    for (const double v : scores) s.mean_nmse += v;
    s.mean_nmse /= static_cast<double>(scores.size());
    double ss = 0.0;
    for (const double v : scores) ss += (v - s.mean_nmse) * (v - s.mean_nmse);
    s.sd_nmse = scores.size() > 1 ? std::sqrt(ss / (scores.size() - 1)) : 0.0;
    return s;
  };

  ApplicationSummary summary;
  summary.qr_ala = summarize(qr_scores);
  summary.ls_baseline = summarize(ls_scores);
  return summary;
}

}  // namespace coqr
