#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oxo/learners.hpp"
#include "oxo/losses.hpp"
#include "oxo/qsim.hpp"

namespace oxo::harness {

using geom::DecisionSet;
using linalg::Vector;

enum class LearnerKind {
  ons_exact,        // Newton step with analytic gradients
  fd_ons,           // Newton step with central finite differences
  qons,             // Newton step with the simulated gradient circuit
  adagrad,          // diagonal adaptive update on estimated gradients
  ons_hessian,      // full-rank update with analytic Hessians
  ons_hessian_est,  // full-rank update with the simulated Hessian circuit
  qons_nonsmooth,   // sample-then-estimate pipeline for non-smooth losses
};

LearnerKind learner_kind_from_string(const std::string& s);
std::string to_string(LearnerKind k);

struct ExperimentConfig {
  LearnerKind learner = LearnerKind::qons;
  losses::AdversaryKind adversary = losses::AdversaryKind::oblivious_square;

  std::string set_kind = "box";  // "box" or "ball"
  int dim = 2;
  double ball_radius = 1.0;
  Vector ball_center;  // defaults to the origin
  Vector box_lower;    // defaults to -1
  Vector box_upper;    // defaults to +1

  long T = 100;
  // Declared constants; values <= 0 are derived from the adversary family.
  double G = 0.0, D = 0.0, alpha = 0.0, beta = 0.0, L = 0.0;
  double rho = 0.0, delta = 0.0, p_smooth = 0.0;

  qsim::SimMode mode = qsim::SimMode::full;
  int grid_budget = qsim::kDefaultGridBudget;
  std::uint64_t seed = 1;

  double gamma = 0.0;      // <=0: theorem default
  double epsilon = 0.0;    // <=0: theorem default (AdaGrad: 1.0)
  double p_exponent = 0.5;
  double fd_h = 1e-6;
  double adversary_offset = 0.5;
  int hess_b = 8, hess_c = 9;  // Hessian-circuit registers
  double hess_r = 1e-3;        // Hessian-circuit grid scale

  std::string out_csv, out_json, out_svg;
};

// Flat key = value text, '#' comments, strict unknown-key rejection.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
// OXO_SEED environment variable overrides the configured seed.
void apply_env_seed(ExperimentConfig& cfg);

DecisionSet make_decision_set(const ExperimentConfig& cfg);

struct RoundRecord {
  long round = 0;
  double loss = 0.0;
  double cum_loss = 0.0;
  double cum_regret = 0.0;
  double grad_err_l1 = 0.0;
  int b = 0, c = 0;
  double r_t = 0.0;
  bool clamped = false;
  int queries = 0;
  // Extended in-memory log (not exported to CSV):
  Vector x;         // committed decision
  Vector z;         // non-smooth sample point (empty otherwise)
  Vector grad_est;  // gradient used by the update
};

struct RegretSeries {
  std::vector<RoundRecord> rounds;
  Vector x_star;
  double best_total = 0.0;
  std::vector<losses::LossFunction> realized;  // per-round losses
  ExperimentConfig config;
  bool has_config = false;

  double final_regret() const {
    return rounds.empty() ? 0.0 : rounds.back().cum_regret;
  }
};

// Plays T protocol rounds (commit x_t, receive f_t, estimate, update), then
// computes the best fixed decision in hindsight and fills the regret columns.
// Fully deterministic for a fixed config + seed. Module errors are rethrown
// with the failing round index attached.
RegretSeries run_experiment(const ExperimentConfig& cfg);

// Effective constants a run would use: declared values where given,
// family-derived bounds (on the dilated evaluation set) otherwise.
struct EffectiveConstants {
  double G = 0.0, D = 0.0, alpha = 0.0, beta = 0.0, L = 0.0;
};
EffectiveConstants effective_constants(const ExperimentConfig& cfg);

enum class Suite { qgb, qnsgb, qnsgbs, expconcave_lb, adagrad_trend };
Suite suite_from_string(const std::string& s);
std::string to_string(Suite s);

struct SuiteReport {
  std::string name;
  long trials = 0;
  long failures = 0;
  double failure_rate = 0.0;
  double upper99 = 0.0;  // one-sided 99% binomial upper bound
  double budget = 0.0;   // allowed failure probability (0 = none)
  bool pass = false;
  std::string notes;
};

SuiteReport verify_lemma_suite(Suite which, long trials, std::uint64_t seed);

// CSV: header + one row per round, 17 significant digits, stable column
// order (round, loss, cum_loss, cum_regret, grad_err_l1, b, c, r_t, clamped,
// queries).
std::string csv_string(const RegretSeries& series);
void export_csv(const RegretSeries& series, const std::string& path);
RegretSeries import_csv_string(const std::string& text);
RegretSeries import_csv(const std::string& path);

void export_json_summary(const RegretSeries& series, const std::string& path);
std::string json_summary_string(const RegretSeries& series);

// Cumulative regret against log-x rounds with two fitted reference curves
// (C n log t and C' t^{2/3}); exactly three polylines.
std::string svg_string(const RegretSeries& series);
void export_svg_plot(const RegretSeries& series, const std::string& path);

// Least-squares coefficients fitted on the second half of the series.
double fitted_log_coefficient(const RegretSeries& series);
double fitted_t23_coefficient(const RegretSeries& series);

}  // namespace oxo::harness
