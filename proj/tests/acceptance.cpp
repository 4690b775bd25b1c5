// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "coqr/csv.hpp"
#include "coqr/eval.hpp"
#include "coqr/model.hpp"
#include "coqr/simgen.hpp"
#include "coqr/tuning.hpp"
#include "oracles.hpp"

using namespace coqr;
using clk = std::chrono::steady_clock;

namespace {

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

struct Criterion {
  bool pass = true;
  std::string details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details += (details.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) {
    details += (details.empty() ? "" : "; ") + what;
  }
};

void report(int id, const std::string& name, const Criterion& c) {
  std::printf("%s  criterion %d: %s%s%s\n", c.pass ? "PASS" : "FAIL", id, name.c_str(),
              c.details.empty() ? "" : " — ", c.details.c_str());
  std::fflush(stdout);
}

constexpr int kReplicates = 500;

Example1Report example1_run(int n, ErrorDist dist, std::uint64_t seed) {
  return run_example1(example1_config(n, dist, kReplicates, seed));
}

// ---------------------------------------------------------------- criterion 1
Criterion criterion1() {
  Criterion c;
  const auto t0 = clk::now();
  const int sizes[] = {50, 100, 200, 500};
  const double qr_expected[] = {0.870, 0.603, 0.424, 0.259};
  const double mr_expected[] = {0.701, 0.477, 0.336, 0.209};
  char buf[160];
  for (int i = 0; i < 4; ++i) {
    const auto report = example1_run(sizes[i], ErrorDist::Normal01, 101 + i);
    std::snprintf(buf, sizeof buf, "n=%d QR L1 %.3f (table %.3f), MR L1 %.3f (table %.3f)",
                  sizes[i], report.qr.l1, qr_expected[i], report.mr.l1, mr_expected[i]);
    c.note(buf);
    c.require(std::abs(report.qr.l1 - qr_expected[i]) <= 0.04,
              std::string("QR L1 off at n=") + std::to_string(sizes[i]));
    c.require(std::abs(report.mr.l1 - mr_expected[i]) <= 0.04,
              std::string("MR L1 off at n=") + std::to_string(sizes[i]));
  }
  const double elapsed = seconds_since(t0);
  std::snprintf(buf, sizeof buf, "elapsed %.1fs (budget 600s)", elapsed);
  c.note(buf);
  c.require(elapsed < 600.0, "runtime budget exceeded");
  return c;
}

// ---------------------------------------------------------------- criterion 2
Criterion criterion2() {
  Criterion c;
  char buf[200];

  const auto t3 = example1_run(500, ErrorDist::StudentT3, 201);
  std::snprintf(buf, sizeof buf, "t3 n=500 QR L1 %.3f (table 0.287)", t3.qr.l1);
  c.note(buf);
  c.require(std::abs(t3.qr.l1 - 0.287) <= 0.04, "t3 QR L1 off at n=500");

  const struct {
    ErrorDist dist;
    const char* tag;
    double table_qr[4];  // paper values at n = 50,100,200,500, for reference
  } rows[] = {
      {ErrorDist::Pareto21, "pareto", {0.486, 0.317, 0.231, 0.147}},
      {ErrorDist::Gpd, "gpd", {0.924, 0.632, 0.448, 0.285}},
      {ErrorDist::Gev, "gev", {1.627, 1.109, 0.781, 0.495}},
  };
  const int sizes[] = {50, 100, 200, 500};
  for (int d = 0; d < 3; ++d) {
    for (int i = 0; i < 4; ++i) {
      const auto rep = example1_run(sizes[i], rows[d].dist, 210 + 10 * d + i);
      std::snprintf(buf, sizeof buf, "%s n=%d QR %.3f < MR %.3f (table QR %.3f)",
                    rows[d].tag, sizes[i], rep.qr.l1, rep.mr.l1, rows[d].table_qr[i]);
      c.note(buf);
      c.require(rep.qr.l1 < rep.mr.l1,
                std::string(rows[d].tag) + " ordering violated at n=" +
                    std::to_string(sizes[i]));
    }
  }
  return c;
}

// ---------------------------------------------------------------- criterion 3
Criterion criterion3() {
  Criterion c;
  char buf[200];

  const auto normal = run_example2(example2_config(200, 20, ErrorDist::Normal01,
                                                   kReplicates, 301));
  std::snprintf(buf, sizeof buf,
                "normal (200,20): TP %.3f FP %.3f L1 %.3f (table 6.000/0.276/0.511)",
                normal.qr_ala.tp, normal.qr_ala.fp, normal.qr_ala.l1);
  c.note(buf);
  c.require(normal.qr_ala.tp >= 5.95 && normal.qr_ala.tp <= 6.0, "TP out of [5.95, 6.00]");
  c.require(normal.qr_ala.fp <= 0.45, "FP above 0.45");
  c.require(std::abs(normal.qr_ala.l1 - 0.511) <= 0.08, "L1 off by more than 0.08");

  const auto pareto = run_example2(example2_config(100, 10, ErrorDist::Pareto21,
                                                   kReplicates, 302));
  std::snprintf(buf, sizeof buf, "pareto (100,10): TP %.3f FN %.3f (table 6.000/0.000)",
                pareto.qr_ala.tp, pareto.qr_ala.fn);
  c.note(buf);
  c.require(pareto.qr_ala.tp >= 5.95 && pareto.qr_ala.tp <= 6.0, "pareto TP out of range");
  c.require(pareto.qr_ala.fn <= 0.05, "pareto FN above 0.05");
  return c;
}

// ---------------------------------------------------------------- criterion 4
Criterion criterion4() {
  Criterion c;
  int checked = 0;
  double worst = 0.0;
  Rng shape_rng(40404, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(shape_rng.next_u64() % 5);
    const int m = k + 1 + static_cast<int>(shape_rng.next_u64() % (9 - k));
    Rng rng(50000 + trial, 0);
    const LPProblem lp = testing::random_feasible_lp(k, m, rng);
    const LPSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
      c.require(false, "solver failed on trial " + std::to_string(trial));
      continue;
    }
    const auto oracle = testing::enumerate_bfs_min_cost(lp);
    if (!oracle) {
      c.require(false, "oracle found no feasible basis on trial " + std::to_string(trial));
      continue;
    }
    const double gap = std::abs(sol.objective - *oracle);
    worst = std::max(worst, gap);
    if (gap > 1e-8) c.require(false, "objective gap " + std::to_string(gap));
    ++checked;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d random LPs, worst |gap| %.2e (tol 1e-8)", checked, worst);
  c.note(buf);
  return c;
}

// ---------------------------------------------------------------- criterion 5
Criterion criterion5() {
  Criterion c;
  double worst_qr = 0.0, worst_pen = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(60000 + trial, 0);
    const int n = 5 + static_cast<int>(rng.next_u64() % 4);  // 5..8
    Eigen::MatrixXd raw(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) raw(i, j) = std::exp(rng.normal());
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();
    const auto design = log_contrast_design(CompositionalDataset(closure(raw), y));
    const double tau = 0.2 + 0.6 * rng.uniform01();

    const QuantileFit fit = fit_qr(design, tau);
    const double oracle = testing::qr_subset_interpolation_cost(design, tau);
    const double gap = std::abs(fit.objective - oracle);
    worst_qr = std::max(worst_qr, gap);
    if (gap > 1e-7 * (1.0 + oracle))
      c.require(false, "fit_qr gap " + std::to_string(gap) + " on trial " +
                           std::to_string(trial));

    const Eigen::VectorXd w = Eigen::VectorXd::Ones(3);
    const QuantileFit pen = fit_penalized(design, 0.5, 0.5, w);
    const double total = pen.objective + pen.penalty;
    const double grid = testing::penalized_grid_search(design, 0.5, 0.5, w);
    worst_pen = std::max(worst_pen, std::abs(total - grid));
    if (!(total <= grid + 1e-7 && grid <= total + 1e-3))
      c.require(false, "fit_penalized vs grid gap " + std::to_string(total - grid) +
                           " on trial " + std::to_string(trial));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "100 instances: worst fit_qr |gap| %.2e (tol 1e-7), worst penalized |gap| %.2e (tol 1e-3)",
                worst_qr, worst_pen);
  c.note(buf);
  return c;
}

// ---------------------------------------------------------------- criterion 6
Criterion criterion6() {
  Criterion c;
  char buf[240];

  // Corpus: the paper's Example-1 settings at tau = 0.5 for all five error
  // distributions, plus pure-noise designs.
  struct Instance {
    LogContrastDesign design;
    std::string tag;
  };
  std::vector<Instance> corpus;
  for (const ErrorDist dist : {ErrorDist::Normal01, ErrorDist::StudentT3,
                               ErrorDist::Pareto21, ErrorDist::Gpd, ErrorDist::Gev}) {
    for (const int n : {50, 200}) {
      const auto config = example1_config(n, dist, 1, 600 + n);
      Rng rng(config.seed, 0);
      const auto x = gen_covariates(n, 6, config.mu, config.rho, rng);
      const auto e = gen_errors(dist, n, rng);
      const auto y = gen_response(x, config.beta_true, e);
      corpus.push_back({log_contrast_design(CompositionalDataset(x, y)),
                        error_dist_name(dist) + " n=" + std::to_string(n)});
    }
  }
  for (int s = 0; s < 4; ++s) {
    Rng rng(700 + s, 0);
    const int n = 30 + 10 * s;
    const auto x = gen_covariates(n, 5, Eigen::VectorXd::Zero(5), 0.2, rng);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = rng.normal();
    corpus.push_back({log_contrast_design(CompositionalDataset(x, y)),
                      "noise n=" + std::to_string(n)});
  }

  // Zero-sum, objective consistency, slack complementarity, coverage.
  // Coverage runs at tau = 0.5 (the paper's operating point) and two other
  // quantile levels.
  int coverage_checks = 0;
  double worst_coverage = 0.0;
  std::string worst_tag;
  for (const auto& [design, tag] : corpus) {
    for (const double tau : {0.5, 0.3, 0.75}) {
      const QuantileFit fit = fit_qr(design, tau);
      c.require(std::abs(fit.beta.sum()) <= 1e-7, tag + ": zero-sum violated");
      const Eigen::VectorXd residuals =
          (design.yc - design.z * fit.beta).array() - fit.intercept;
      const double recomputed = check_loss_sum(residuals, tau);
      c.require(std::abs(fit.objective - recomputed) <= 1e-7 * (1.0 + recomputed),
                tag + ": objective inconsistency");

      const int n = design.n(), p = design.p();
      int below = 0, above = 0;
      for (int i = 0; i < n; ++i) {
        if (fit.residuals[i] < -1e-10) ++below;
        if (fit.residuals[i] > 1e-10) ++above;
      }
      const double dev = std::max(std::abs(below - n * tau),
                                  std::abs(above - n * (1.0 - tau)));
      ++coverage_checks;
      if (dev > worst_coverage) {
        worst_coverage = dev;
        worst_tag = tag;
      }
      if (dev > p)
        c.require(false, tag + ": coverage bound violated at tau " + std::to_string(tau) +
                             " (dev " + std::to_string(dev) + " > p)");
    }

    const LPSolution sol = solve_lp(build_unpenalized_lp(design, 0.5));
    const int n = design.n(), p = design.p();
    bool complementary = true;
    for (int j = 0; j < p; ++j)
      if (std::min(sol.gamma[j], sol.gamma[p + j]) != 0.0) complementary = false;
    for (int i = 0; i < n; ++i)
      if (std::min(sol.gamma[2 * p + i], sol.gamma[2 * p + n + i]) != 0.0)
        complementary = false;
    if (std::min(sol.gamma[2 * p + 2 * n], sol.gamma[2 * p + 2 * n + 1]) != 0.0)
      complementary = false;
    c.require(complementary, tag + ": slack complementarity violated");
  }
  std::snprintf(buf, sizeof buf, "coverage bound held on %d fits (worst dev %.1f, %s)",
                coverage_checks, worst_coverage, worst_tag.c_str());
  c.note(buf);

  // lambda = 0 collapse and lambda -> infinity null model.
  {
    Rng rng(710, 0);
    const auto x = gen_covariates(40, 6, example1_mu(6), 0.2, rng);
    const auto e = gen_errors(ErrorDist::Normal01, 40, rng);
    const auto y = gen_response(x, example1_beta(), e);
    const auto design = log_contrast_design(CompositionalDataset(x, y));
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(6);
    const auto plain = fit_qr(design, 0.5);
    const auto zero = fit_penalized(design, 0.5, 0.0, w);
    c.require(std::abs(plain.objective - zero.objective) <= 1e-7 &&
                  (plain.beta - zero.beta).cwiseAbs().maxCoeff() <= 1e-9,
              "lambda=0 collapse violated");
    const auto huge = fit_penalized(design, 0.5, 1e9, w);
    c.require(huge.beta.cwiseAbs().maxCoeff() <= 1e-9, "lambda->inf null model violated");
  }

  // Row-scaling / closure invariance at 1e-6.
  {
    Rng rng(711, 0);
    Eigen::MatrixXd raw(35, 5);
    for (int i = 0; i < 35; ++i)
      for (int j = 0; j < 5; ++j) raw(i, j) = std::exp(rng.normal());
    Eigen::VectorXd y(35);
    for (int i = 0; i < 35; ++i) y[i] = rng.normal();
    Eigen::MatrixXd scaled = raw;
    for (int i = 0; i < 35; ++i) scaled.row(i) *= 0.25 + 8.0 * rng.uniform01();
    const auto fit_a = fit_qr(make_design(raw, y), 0.5);
    const auto fit_b = fit_qr(make_design(scaled, y), 0.5);
    c.require((fit_a.beta - fit_b.beta).cwiseAbs().maxCoeff() <= 1e-6,
              "row-scaling/closure invariance violated");
  }

  // Seeded bit-reproducibility of a full study.
  {
    const auto config = example1_config(50, ErrorDist::Gpd, 8, 712);
    const auto a = run_example1(config);
    const auto b = run_example1(config);
    c.require((a.qr.bj - b.qr.bj).cwiseAbs().maxCoeff() == 0.0 &&
                  (a.mr.bj - b.mr.bj).cwiseAbs().maxCoeff() == 0.0 &&
                  a.qr.l1 == b.qr.l1 && a.mr.l1 == b.mr.l1,
              "seeded bit-reproducibility violated");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 7
Criterion criterion7() {
  Criterion c;
  char buf[200];

  // Substitute study: synthetic compositional data with heavy-tailed noise.
  const int n = 150, p = 10;
  Rng rng(77001, 0);
  const Eigen::MatrixXd x = gen_covariates(n, p, example2_mu(p), 0.2, rng);
  const Eigen::VectorXd noise = gen_errors(ErrorDist::Pareto21, n, rng);
  const Eigen::VectorXd y = gen_response(x, example2_beta(p), noise);

  ApplicationConfig config;
  config.tau = 0.5;
  config.repeats = 100;
  config.cv_folds = 10;
  config.seed = 77002;
  const ApplicationSummary noisy = run_application(x, y, config);
  std::snprintf(buf, sizeof buf,
                "heavy-tail synthetic: QR-ALA NMSE %.3f vs constrained-LS %.3f over 100 splits",
                noisy.qr_ala.mean_nmse, noisy.ls_baseline.mean_nmse);
  c.note(buf);
  c.require(noisy.qr_ala.mean_nmse < noisy.ls_baseline.mean_nmse,
            "QR-ALA did not beat the least-squares baseline");

  const Eigen::VectorXd y_clean = gen_response(x, example2_beta(p), Eigen::VectorXd::Zero(n));
  config.seed = 77003;
  const ApplicationSummary clean = run_application(x, y_clean, config);
  std::snprintf(buf, sizeof buf, "noiseless synthetic: QR-ALA NMSE %.4f (< 0.05)",
                clean.qr_ala.mean_nmse);
  c.note(buf);
  c.require(clean.qr_ala.mean_nmse < 0.05, "noiseless NMSE not under 0.05");

  // Optional: the body-fat study, when the user supplies a cleaned CSV with a
  // `body.fat` percentage column (see README).
  if (const char* fat_path = std::getenv("COQR_FAT_CSV")) {
    try {
      const CsvTable table = read_csv(fat_path);
      Eigen::VectorXd response;
      Eigen::MatrixXd covariates;
      std::vector<std::string> names;
      table.split_response("body.fat", response, covariates, names);
      Eigen::VectorXd transformed(response.size());
      for (Eigen::Index i = 0; i < response.size(); ++i)
        transformed[i] = logit_response(response[i]);
      config.seed = 77004;
      const ApplicationSummary fat = run_application(covariates, transformed, config);
      std::snprintf(buf, sizeof buf,
                    "fat data: QR-ALA NMSE %.3f vs constrained-LS %.3f (table: 0.353 < 0.424)",
                    fat.qr_ala.mean_nmse, fat.ls_baseline.mean_nmse);
      c.note(buf);
      c.require(fat.qr_ala.mean_nmse < fat.ls_baseline.mean_nmse,
                "fat data ordering violated");
    } catch (const std::exception& e) {
      c.require(false, std::string("fat data run failed: ") + e.what());
    }
  } else {
    c.note("fat dataset not supplied (set COQR_FAT_CSV to include it)");
  }
  return c;
}

}  // namespace

int main() {
  std::printf("acceptance suite (%d-replicate studies; single process)\n", kReplicates);
  const auto t0 = clk::now();
  int failures = 0;
  struct Entry {
    int id;
    const char* name;
    Criterion (*fn)();
  };
  const Entry entries[] = {
      {1, "Table 1 N(0,1) rows within +/-0.04, under 10 minutes", criterion1},
      {2, "Table 1 heavy-tail rows: t3 exact, QR < MR ordering", criterion2},
      {3, "Table 2 (200,20) and Table 3 pareto (100,10) selection", criterion3},
      {4, "LP oracle equivalence on 200 random programs", criterion4},
      {5, "QR oracle equivalence on 100 random instances", criterion5},
      {6, "invariant suite", criterion6},
      {7, "eval pipeline on synthetic data (Table 4 substitute)", criterion7},
  };
  for (const auto& entry : entries) {
    Criterion c;
    try {
      c = entry.fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.note(std::string("exception: ") + e.what());
    }
    report(entry.id, entry.name, c);
    if (!c.pass) ++failures;
  }
  std::printf("%d/7 criteria passed in %.1fs\n", 7 - failures, seconds_since(t0));
  return failures;
}
