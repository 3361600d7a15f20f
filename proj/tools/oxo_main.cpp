#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oxo/harness.hpp"

using namespace oxo;

namespace {

int cmd_run(const std::string& config_path, std::string csv, std::string json,
            std::string svg) {
  harness::ExperimentConfig cfg = harness::parse_config_file(config_path);
  harness::apply_env_seed(cfg);
  const harness::RegretSeries series = harness::run_experiment(cfg);
  if (!csv.empty()) cfg.out_csv = csv;
  if (!json.empty()) cfg.out_json = json;
  if (!svg.empty()) cfg.out_svg = svg;
  if (!cfg.out_csv.empty()) harness::export_csv(series, cfg.out_csv);
  if (!cfg.out_json.empty()) harness::export_json_summary(series, cfg.out_json);
  if (!cfg.out_svg.empty()) harness::export_svg_plot(series, cfg.out_svg);
  std::printf("learner=%s adversary=%s T=%ld seed=%llu\n",
              harness::to_string(cfg.learner).c_str(),
              losses::to_string(cfg.adversary).c_str(), cfg.T,
              static_cast<unsigned long long>(cfg.seed));
  std::printf("final_regret=%.12g total_loss=%.12g best_fixed_total=%.12g\n",
              series.final_regret(),
              series.rounds.empty() ? 0.0 : series.rounds.back().cum_loss,
              series.best_total);
  if (cfg.out_csv.empty() && cfg.out_json.empty() && cfg.out_svg.empty())
    std::printf("(no output paths configured; use out_csv/out_json/out_svg "
                "or --csv/--json/--svg)\n");
  return 0;
}

int cmd_verify(const std::string& suite_name, long trials,
               std::uint64_t seed) {
  const harness::Suite suite = harness::suite_from_string(suite_name);
  const harness::SuiteReport rep =
      harness::verify_lemma_suite(suite, trials, seed);
  std::printf("suite=%s trials=%ld failures=%ld failure_rate=%.6f "
              "upper99=%.6f budget=%.6f\n",
              rep.name.c_str(), rep.trials, rep.failures, rep.failure_rate,
              rep.upper99, rep.budget);
  std::printf("notes: %s\n", rep.notes.c_str());
  std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 1;
}

int cmd_estimate_grad(const std::string& family, std::vector<double> a,
                      double b, std::vector<double> a2, double b2,
                      std::vector<double> x, long t, double rho, double g_const,
                      double beta, double r, const std::string& mode_name,
                      std::uint64_t seed, int grid_budget) {
  losses::LossFunction f = [&]() -> losses::LossFunction {
    if (family == "square") return losses::SquareLoss{a, b};
    if (family == "log") return losses::LogLoss{a};
    if (family == "linear") return losses::LinearLoss{a};
    if (family == "maxquad")
      return losses::MaxQuadratic{losses::SquareLoss{a, b},
                                  losses::SquareLoss{a2, b2}};
    fail(ErrorCategory::invalid_input, "unknown family: " + family);
  }();
  if (x.size() != f.dim())
    fail(ErrorCategory::invalid_input, "x dimension does not match the loss");
  const int n = static_cast<int>(x.size());
  double schedule_r = r;
  if (schedule_r <= 0.0)
    schedule_r = rho * g_const /
                 (M_PI * std::pow(n, 3) * (n / rho + 1.0) * beta * t);
  RandomSource rng = derive_stream(seed, "estimate-grad");
  const qsim::SimMode mode = qsim::sim_mode_from_string(mode_name);
  const qsim::QuantumGradEstimate est = qsim::estimate_gradient(
      f, x, t, rho, g_const, beta, schedule_r, mode, rng, grid_budget);
  const linalg::Vector truth = f.gradient(x);

  std::printf("family: %s\n", f.family_name().c_str());
  std::printf("mode: %s\n", qsim::to_string(mode).c_str());
  std::printf("t: %ld\n", t);
  std::printf("b: %d\n", est.params.b);
  std::printf("c: %d\n", est.params.c);
  std::printf("r: %.17g\n", est.params.r);
  std::printf("clamped: %d\n", est.params.clamped ? 1 : 0);
  std::printf("queries: %d\n", est.queries_used);
  std::printf("outcomes:");
  for (int m : est.outcomes) std::printf(" %d", m);
  std::printf("\n");
  std::printf("gradient_estimate:");
  for (double v : est.gradient) std::printf(" %.17g", v);
  std::printf("\n");
  std::printf("gradient_true:");
  for (double v : truth) std::printf(" %.17g", v);
  std::printf("\n");
  std::printf("l1_error: %.17g\n",
              linalg::norm1(linalg::sub(est.gradient, truth)));
  std::printf("error_bound_l1: %.17g\n", est.error_bound_l1);
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& out) {
  const harness::RegretSeries series = harness::import_csv(csv_path);
  const std::string dest = out.empty() ? csv_path + ".svg" : out;
  harness::export_svg_plot(series, dest);
  std::printf("wrote %s\n", dest.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online exp-concave optimization with simulated quantum "
               "gradient estimation"};
  app.require_subcommand(1);

  std::string config_path, csv_out, json_out, svg_out;
  CLI::App* run = app.add_subcommand("run", "play a configured experiment");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--csv", csv_out, "write the per-round CSV here");
  run->add_option("--json", json_out, "write the JSON summary here");
  run->add_option("--svg", svg_out, "write the regret plot here");

  std::string suite_name;
  long trials = 500;
  std::uint64_t seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "run a lemma suite");
  verify->add_option("suite", suite_name,
                     "qgb | qnsgb | qnsgbs | expconcave_lb | adagrad_trend")
      ->required();
  verify->add_option("--trials", trials, "trial count (>= 100)");
  verify->add_option("--seed", seed, "suite seed");

  std::string family = "square", mode_name = "full";
  std::vector<double> avec{1.0, 0.0}, a2vec, xvec{0.0, 0.0};
  double bscal = 0.0, b2scal = 0.0, rho = 0.2, g_const = 4.0, beta = 2.0,
         rval = 0.0;
  long tstep = 1;
  int grid_budget = qsim::kDefaultGridBudget;
  std::uint64_t eg_seed = 1;
  CLI::App* eg = app.add_subcommand(
      "estimate-grad", "run one simulated gradient estimation");
  eg->add_option("--family", family, "square | log | linear | maxquad");
  eg->add_option("--a", avec, "loss coefficients")->expected(-1);
  eg->add_option("--b", bscal, "square-loss offset");
  eg->add_option("--a2", a2vec, "second branch coefficients (maxquad)")
      ->expected(-1);
  eg->add_option("--b2", b2scal, "second branch offset (maxquad)");
  eg->add_option("--x", xvec, "evaluation point")->expected(-1);
  eg->add_option("--t", tstep, "round index for the schedule");
  eg->add_option("--rho", rho, "per-round failure budget");
  eg->add_option("--G", g_const, "Lipschitz constant");
  eg->add_option("--beta", beta, "smoothness constant");
  eg->add_option("--r", rval, "grid scale (<= 0: theorem schedule)");
  eg->add_option("--mode", mode_name, "full | idealized");
  eg->add_option("--seed", eg_seed, "measurement seed");
  eg->add_option("--grid-budget", grid_budget, "max total register qubits");

  std::string plot_csv, plot_out;
  CLI::App* plot = app.add_subcommand("plot", "render a CSV series as SVG");
  plot->add_option("csv", plot_csv, "input CSV")->required();
  plot->add_option("--out", plot_out, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, csv_out, json_out, svg_out);
    if (verify->parsed()) return cmd_verify(suite_name, trials, seed);
    if (eg->parsed())
      return cmd_estimate_grad(family, avec, bscal, a2vec, b2scal, xvec, tstep,
                               rho, g_const, beta, rval, mode_name, eg_seed,
                               grid_budget);
    if (plot->parsed()) return cmd_plot(plot_csv, plot_out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: category=%s message=%s\n",
                 to_string(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: category=internal message=%s\n", e.what());
    return exit_code(ErrorCategory::internal);
  }
  return 0;
}
