// coqr: constrained quantile regression for compositional covariates.
//
// Subcommands: fit (CSV -> coefficients), simulate (Monte Carlo studies),
// eval (repeated-split NMSE comparison). Every stochastic command either
// takes --seed or derives one and prints it, so runs can be reproduced.
// Exit codes: 0 ok, 2 input error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "coqr/csv.hpp"
#include "coqr/eval.hpp"
#include "coqr/model.hpp"
#include "coqr/simgen.hpp"
#include "coqr/tuning.hpp"

using json = nlohmann::ordered_json;

namespace {

std::uint64_t ensure_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t derived =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  std::printf("seed: %" PRIu64 " (derived; pass --seed %" PRIu64 " to reproduce)\n",
              derived, derived);
  return derived;
}

void emit(const json& record, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << record.dump(2) << "\n";
  } else {
    std::ofstream out(output_path);
    if (!out) throw coqr::InputError("cannot write '" + output_path + "'");
    out << record.dump(2) << "\n";
  }
}

json metrics_to_json(const coqr::MetricsReport& report) {
  json j;
  j["bj"] = std::vector<double>(report.bj.data(), report.bj.data() + report.bj.size());
  j["l1"] = report.l1;
  if (report.has_selection) {
    j["tp"] = report.tp;
    j["tn"] = report.tn;
    j["fp"] = report.fp;
    j["fn"] = report.fn;
  }
  return j;
}

int run_fit(const std::string& file, const std::string& response, double tau,
            std::optional<double> lambda, const std::string& tune, int folds,
            std::optional<std::uint64_t> seed_opt, const std::string& output) {
  const coqr::CsvTable table = coqr::read_csv(file);
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::vector<std::string> names;
  table.split_response(response, y, x, names);
  const coqr::LogContrastDesign design = coqr::make_design(x, y);

  json record;
  record["command"] = "fit";
  record["file"] = file;
  record["response"] = response;
  record["n"] = design.n();
  record["p"] = design.p();
  record["tau"] = tau;

  coqr::QuantileFit fit;
  if (tune == "bic") {
    const auto [path, chosen] = coqr::fit_adaptive_lasso(design, tau);
    fit = chosen;
    record["tune"] = "bic";
    record["grid_size"] = path.lambdas.size();
  } else if (tune == "cv") {
    const std::uint64_t seed = ensure_seed(seed_opt);
    coqr::Rng rng(seed, 0);
    const double lambda_opt =
        coqr::cv_select_lambda(design, tau, folds, coqr::GridSpec{}, rng);
    const Eigen::VectorXd weights =
        coqr::adaptive_weights(coqr::fit_qr(design, tau).beta);
    fit = coqr::fit_penalized(design, tau, lambda_opt, weights);
    record["tune"] = "cv";
    record["folds"] = folds;
    record["seed"] = seed;
  } else if (lambda && *lambda > 0.0) {
    const Eigen::VectorXd weights =
        coqr::adaptive_weights(coqr::fit_qr(design, tau).beta);
    fit = coqr::fit_penalized(design, tau, *lambda, weights);
    record["tune"] = "none";
  } else {
    fit = coqr::fit_qr(design, tau);
    record["tune"] = "none";
  }

  record["lambda"] = fit.lambda;
  record["objective"] = fit.objective;
  record["penalty"] = fit.penalty;
  record["intercept"] = fit.intercept;
  record["df"] = coqr::count_nonzero(fit.beta);
  record["beta_sum"] = fit.beta.sum();
  json beta;
  for (int j = 0; j < design.p(); ++j) beta[names[j]] = fit.beta[j];
  record["beta"] = beta;

  std::printf("fit  file=%s response=%s n=%d p=%d tau=%g lambda=%g\n", file.c_str(),
              response.c_str(), design.n(), design.p(), tau, fit.lambda);
  std::printf("%-16s %12s\n", "component", "beta");
  for (int j = 0; j < design.p(); ++j)
    std::printf("%-16s %12.6f\n", names[j].c_str(), fit.beta[j]);
  std::printf("%-16s %12.6f\n", "(sum)", fit.beta.sum());
  std::printf("objective %.6f  penalty %.6f  intercept %.6f  df %d\n", fit.objective,
              fit.penalty, fit.intercept, coqr::count_nonzero(fit.beta));

  emit(record, output);
  return 0;
}

int run_simulate(int example, const std::string& dist_tag, int n, int p, double rho,
                 int replicates, double tau, std::optional<std::uint64_t> seed_opt,
                 const std::string& output) {
  const coqr::ErrorDist dist = coqr::parse_error_dist(dist_tag);
  const std::uint64_t seed = ensure_seed(seed_opt);

  json record;
  record["command"] = "simulate";
  record["example"] = example;
  record["dist"] = dist_tag;
  record["replicates"] = replicates;
  record["seed"] = seed;
  record["tau"] = tau;
  record["rho"] = rho;

  if (example == 1) {
    if (p != 0 && p != 6)
      throw coqr::InputError("example 1 is a p = 6 study; drop --p or pass 6");
    coqr::SimulationConfig config = coqr::example1_config(n, dist, replicates, seed);
    config.rho = rho;
    config.tau = tau;
    const coqr::Example1Report report = coqr::run_example1(config);
    record["n"] = config.n;
    record["p"] = config.p;
    record["methods"]["MR"] = metrics_to_json(report.mr);
    record["methods"]["QR"] = metrics_to_json(report.qr);

    std::printf("example 1  dist=%s n=%d p=%d replicates=%d seed=%" PRIu64 " tau=%g\n",
                dist_tag.c_str(), config.n, config.p, replicates, seed, tau);
    std::printf("%-8s", "method");
    for (int j = 1; j <= config.p; ++j) std::printf("      b%d", j);
    std::printf("      L1\n");
    for (const auto& [name, metrics] :
         {std::pair{"MR", report.mr}, std::pair{"QR", report.qr}}) {
      std::printf("%-8s", name);
      for (int j = 0; j < config.p; ++j) std::printf("  %6.3f", metrics.bj[j]);
      std::printf("  %6.3f\n", metrics.l1);
    }
  } else if (example == 2) {
    if (p != 10 && p != 20)
      throw coqr::InputError("example 2 uses p in {10, 20}");
    coqr::SimulationConfig config = coqr::example2_config(n, p, dist, replicates, seed);
    config.rho = rho;
    config.tau = tau;
    const coqr::Example2Report report = coqr::run_example2(config);
    record["n"] = config.n;
    record["p"] = config.p;
    record["methods"]["QR-ALA"] = metrics_to_json(report.qr_ala);

    std::printf("example 2  dist=%s n=%d p=%d replicates=%d seed=%" PRIu64 " tau=%g\n",
                dist_tag.c_str(), config.n, config.p, replicates, seed, tau);
    std::printf("%-8s %7s %7s %7s %7s %7s\n", "method", "L1", "TP", "TN", "FP", "FN");
    const auto& m = report.qr_ala;
    std::printf("%-8s %7.3f %7.3f %7.3f %7.3f %7.3f\n", "QR-ALA", m.l1, m.tp, m.tn,
                m.fp, m.fn);
  } else {
    throw coqr::InputError("--example must be 1 or 2");
  }

  emit(record, output);
  return 0;
}

int run_eval(const std::string& file, const std::string& response, int repeats,
             double tau, int folds, bool original,
             std::optional<std::uint64_t> seed_opt, const std::string& output) {
  const coqr::CsvTable table = coqr::read_csv(file);
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::vector<std::string> names;
  table.split_response(response, y, x, names);

  const std::uint64_t seed = ensure_seed(seed_opt);
  coqr::ApplicationConfig config;
  config.tau = tau;
  config.repeats = repeats;
  config.cv_folds = folds;
  config.apply_closure = !original;
  config.seed = seed;

  const coqr::ApplicationSummary summary = coqr::run_application(x, y, config);

  const char* arm = original ? "original" : "compositional";
  std::printf("eval  file=%s arm=%s repeats=%d tau=%g folds=%d seed=%" PRIu64 "\n",
              file.c_str(), arm, repeats, tau, folds, seed);
  std::printf("%-22s %10s %10s\n", "method", "mean_nmse", "sd_nmse");
  std::printf("%-22s %10.4f %10.4f\n", "QR-ALA (cv-tuned)", summary.qr_ala.mean_nmse,
              summary.qr_ala.sd_nmse);
  std::printf("%-22s %10.4f %10.4f\n", "constrained-LS",
              summary.ls_baseline.mean_nmse, summary.ls_baseline.sd_nmse);

  json record;
  record["command"] = "eval";
  record["file"] = file;
  record["response"] = response;
  record["arm"] = arm;
  record["repeats"] = repeats;
  record["tau"] = tau;
  record["folds"] = folds;
  record["seed"] = seed;
  record["methods"]["QR-ALA"] = {{"mean_nmse", summary.qr_ala.mean_nmse},
                                 {"sd_nmse", summary.qr_ala.sd_nmse},
                                 {"nmse", summary.qr_ala.per_repeat}};
  record["methods"]["constrained-LS"] = {{"mean_nmse", summary.ls_baseline.mean_nmse},
                                         {"sd_nmse", summary.ls_baseline.sd_nmse},
                                         {"nmse", summary.ls_baseline.per_repeat}};
  emit(record, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained quantile regression for compositional covariates"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit the zero-sum log-contrast quantile model");
  std::string fit_file, fit_response = "y", fit_tune, fit_output;
  double fit_tau = 0.5;
  std::optional<double> fit_lambda;
  std::optional<std::uint64_t> fit_seed;
  int fit_folds = 10;
  fit->add_option("data", fit_file, "CSV with a header row")->required();
  fit->add_option("--response", fit_response, "response column name (default y)");
  fit->add_option("--tau", fit_tau, "quantile level in (0,1)")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  fit->add_option("--lambda", fit_lambda, "fixed penalty level (adaptive weights)");
  fit->add_option("--tune", fit_tune, "penalty selection: bic or cv")
      ->check(CLI::IsMember({"bic", "cv"}));
  fit->add_option("--folds", fit_folds, "cv folds (with --tune cv)")->check(CLI::Range(2, 1000));
  fit->add_option("--seed", fit_seed, "rng seed (with --tune cv)");
  fit->add_option("--output", fit_output, "write the JSON record here");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the Monte Carlo studies");
  int sim_example = 1, sim_n = 50, sim_p = 0, sim_replicates = 0;
  double sim_rho = 0.2, sim_tau = 0.5;
  std::string sim_dist = "normal", sim_output;
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--example", sim_example, "study: 1 (estimation) or 2 (selection)")
      ->check(CLI::IsMember({1, 2}));
  sim->add_option("--dist", sim_dist, "error distribution: normal|t3|pareto|gpd|gev");
  sim->add_option("--n", sim_n, "sample size")->check(CLI::PositiveNumber);
  sim->add_option("--p", sim_p, "components (example 2: 10 or 20)");
  sim->add_option("--rho", sim_rho, "AR correlation of the latent normal");
  sim->add_option("--replicates", sim_replicates, "Monte Carlo replicates")
      ->required()
      ->check(CLI::PositiveNumber);
  sim->add_option("--tau", sim_tau, "quantile level")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--output", sim_output, "write the JSON record here");

  // eval
  auto* ev = app.add_subcommand("eval", "repeated-split NMSE comparison on a CSV");
  std::string ev_file, ev_response = "y", ev_output;
  int ev_repeats = 100, ev_folds = 10;
  double ev_tau = 0.5;
  bool ev_original = false, ev_compositional = false;
  std::optional<std::uint64_t> ev_seed;
  ev->add_option("data", ev_file, "CSV with a header row")->required();
  ev->add_option("--response", ev_response, "response column name (default y)");
  ev->add_option("--repeats", ev_repeats, "number of random 90/10 splits")
      ->check(CLI::PositiveNumber);
  ev->add_option("--tau", ev_tau, "quantile level")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  ev->add_option("--folds", ev_folds, "cv folds within each training split")
      ->check(CLI::Range(2, 1000));
  ev->add_flag("--original", ev_original, "fit raw covariate logs (no closure)");
  ev->add_flag("--compositional", ev_compositional, "apply closure first (default)");
  ev->add_option("--seed", ev_seed, "rng seed");
  ev->add_option("--output", ev_output, "write the JSON record here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit)
      return run_fit(fit_file, fit_response, fit_tau, fit_lambda, fit_tune, fit_folds,
                     fit_seed, fit_output);
    if (*sim)
      return run_simulate(sim_example, sim_dist, sim_n, sim_p, sim_rho, sim_replicates,
                          sim_tau, sim_seed, sim_output);
    if (*ev) {
      if (ev_original && ev_compositional)
        throw coqr::InputError("--original and --compositional are mutually exclusive");
      return run_eval(ev_file, ev_response, ev_repeats, ev_tau, ev_folds, ev_original,
                      ev_seed, ev_output);
    }
  } catch (const coqr::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const coqr::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
