#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "oxo/harness.hpp"

using namespace oxo;
using namespace oxo::harness;

namespace {

ExperimentConfig small_qons_config() {
  ExperimentConfig cfg;
  cfg.learner = LearnerKind::qons;
  cfg.adversary = losses::AdversaryKind::oblivious_square;
  cfg.T = 20;
  cfg.rho = 0.2;
  cfg.seed = 11;
  cfg.mode = qsim::SimMode::full;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const std::string text =
      "# comment\n"
      "learner = qons\n"
      "adversary = rotating_square\n"
      "set = box\n"
      "dim = 2\n"
      "T = 50\n"
      "rho = 0.1\n"
      "seed = 99\n";
  const ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.learner == LearnerKind::qons);
  CHECK(cfg.T == 50);
  CHECK(cfg.rho == 0.1);
  CHECK(cfg.delta == doctest::Approx(5.0));
  CHECK(cfg.seed == 99);

  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), Error);
  CHECK_THROWS_AS(parse_config_text("T = 10\nrho = 0.1\ndelta = 2.0\n"), Error);
  const ExperimentConfig d = parse_config_text("T = 10\ndelta = 2.0\n");
  CHECK(d.rho == doctest::Approx(0.2));
}

TEST_CASE("environment variable overrides the seed") {
  ExperimentConfig cfg;
  cfg.seed = 5;
  setenv("OXO_SEED", "777", 1);
  apply_env_seed(cfg);
  CHECK(cfg.seed == 777);
  unsetenv("OXO_SEED");
  apply_env_seed(cfg);
  CHECK(cfg.seed == 777);  // unchanged when unset
}

TEST_CASE("same config and seed give bit-identical runs") {
  const ExperimentConfig cfg = small_qons_config();
  const RegretSeries a = run_experiment(cfg);
  const RegretSeries b = run_experiment(cfg);
  CHECK(csv_string(a) == csv_string(b));
  ExperimentConfig other = cfg;
  other.seed = 12;
  const RegretSeries c = run_experiment(other);
  CHECK(csv_string(a) != csv_string(c));
}

TEST_CASE("single zero-regret round") {
  ExperimentConfig cfg;
  cfg.learner = LearnerKind::ons_exact;
  cfg.adversary = losses::AdversaryKind::adaptive_square;
  cfg.adversary_offset = 0.0;  // minimizer hyperplane through x_t
  cfg.T = 1;
  cfg.seed = 3;
  const RegretSeries s = run_experiment(cfg);
  CHECK(s.rounds.size() == 1);
  CHECK(std::abs(s.rounds[0].loss) <= 1e-12);
  CHECK(std::abs(s.final_regret()) <= 1e-6);
}

TEST_CASE("regret identity and query accounting") {
  const ExperimentConfig cfg = small_qons_config();
  const RegretSeries s = run_experiment(cfg);
  double cum = 0.0;
  for (std::size_t i = 0; i < s.rounds.size(); ++i) {
    cum += s.realized[i].value(s.rounds[i].x);
    const double best_prefix = [&] {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j)
        acc += s.realized[j].value(s.x_star);
      return acc;
    }();
    CHECK(s.rounds[i].cum_regret ==
          doctest::Approx(cum - best_prefix).epsilon(1e-9).scale(1.0));
    CHECK(s.rounds[i].queries == 4);
  }

  ExperimentConfig fd = cfg;
  fd.learner = LearnerKind::fd_ons;
  const RegretSeries sf = run_experiment(fd);
  for (const RoundRecord& r : sf.rounds) CHECK(r.queries == 2 * cfg.dim);
}

TEST_CASE("protocol order: adaptive adversary sees the committed point") {
  ExperimentConfig cfg;
  cfg.learner = LearnerKind::ons_exact;
  cfg.adversary = losses::AdversaryKind::adaptive_square;
  cfg.adversary_offset = 0.5;
  cfg.T = 30;
  cfg.seed = 21;
  const RegretSeries s = run_experiment(cfg);
  for (std::size_t i = 0; i < s.rounds.size(); ++i)
    CHECK(s.realized[i].value(s.rounds[i].x) ==
          doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("ons regret grows like the log of the horizon") {
  ExperimentConfig cfg;
  cfg.learner = LearnerKind::ons_exact;
  cfg.adversary = losses::AdversaryKind::rotating_square;
  cfg.T = 500;
  cfg.seed = 31;
  cfg.epsilon = 1.0;  // theorem-scale epsilon delays the log regime past T
  const RegretSeries s = run_experiment(cfg);
  const double r_half = s.rounds[249].cum_regret;
  const double r_full = s.rounds[499].cum_regret;
  CHECK(r_full <= r_half * (std::log(500.0) / std::log(250.0)) * 1.5);
  CHECK(r_full >= 0.0);
}

TEST_CASE("csv export and round-trip") {
  const ExperimentConfig cfg = small_qons_config();
  const RegretSeries s = run_experiment(cfg);
  const std::string csv = csv_string(s);
  const RegretSeries back = import_csv_string(csv);
  REQUIRE(back.rounds.size() == s.rounds.size());
  for (std::size_t i = 0; i < s.rounds.size(); ++i) {
    CHECK(back.rounds[i].round == s.rounds[i].round);
    CHECK(back.rounds[i].loss == s.rounds[i].loss);
    CHECK(back.rounds[i].cum_loss == s.rounds[i].cum_loss);
    CHECK(back.rounds[i].cum_regret == s.rounds[i].cum_regret);
    CHECK(back.rounds[i].grad_err_l1 == s.rounds[i].grad_err_l1);
    CHECK(back.rounds[i].b == s.rounds[i].b);
    CHECK(back.rounds[i].c == s.rounds[i].c);
    CHECK(back.rounds[i].r_t == s.rounds[i].r_t);
    CHECK(back.rounds[i].clamped == s.rounds[i].clamped);
    CHECK(back.rounds[i].queries == s.rounds[i].queries);
  }

  RegretSeries empty;
  CHECK(csv_string(empty) ==
        "round,loss,cum_loss,cum_regret,grad_err_l1,b,c,r_t,clamped,queries\n");
}

TEST_CASE("svg plot contains exactly three polylines") {
  const ExperimentConfig cfg = small_qons_config();
  const RegretSeries s = run_experiment(cfg);
  const std::string svg = svg_string(s);
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++count;
    pos += 9;
  }
  CHECK(count == 3);
  CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("json summary fields") {
  const ExperimentConfig cfg = small_qons_config();
  const RegretSeries s = run_experiment(cfg);
  const std::string j = json_summary_string(s);
  for (const char* key :
       {"\"config\"", "\"final_regret\"", "\"best_fixed_total\"", "\"x_star\"",
        "\"queries_total\"", "\"fitted_regret_per_nlogt\"", "\"seed\""})
    CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("learner iterates stay feasible across kinds") {
  for (LearnerKind kind : {LearnerKind::ons_exact, LearnerKind::fd_ons,
                           LearnerKind::adagrad, LearnerKind::ons_hessian}) {
    ExperimentConfig cfg;
    cfg.learner = kind;
    cfg.adversary = losses::AdversaryKind::oblivious_square;
    cfg.T = 25;
    cfg.rho = 0.2;
    cfg.mode = qsim::SimMode::idealized;
    cfg.seed = 41;
    const RegretSeries s = run_experiment(cfg);
    const DecisionSet k = make_decision_set(cfg);
    const int want_queries = kind == LearnerKind::fd_ons ? 2 * cfg.dim
                             : kind == LearnerKind::adagrad ? 4
                                                            : 0;
    for (const RoundRecord& r : s.rounds) {
      CHECK(k.contains(r.x, 1e-8));
      CHECK(r.queries == want_queries);
    }
  }
}

TEST_CASE("estimated-hessian learner runs end to end") {
  ExperimentConfig cfg;
  cfg.learner = LearnerKind::ons_hessian_est;
  cfg.adversary = losses::AdversaryKind::rotating_square;
  cfg.T = 10;
  cfg.hess_b = 6;
  cfg.seed = 43;
  const RegretSeries s = run_experiment(cfg);
  const DecisionSet k = make_decision_set(cfg);
  for (const RoundRecord& r : s.rounds) {
    CHECK(k.contains(r.x, 1e-8));
    CHECK(r.queries == 4 * cfg.dim);
    CHECK(r.b == 6);
  }
}

TEST_CASE("nonsmooth run on a max-quadratic stream") {
  ExperimentConfig cfg;
  cfg.learner = LearnerKind::qons_nonsmooth;
  cfg.adversary = losses::AdversaryKind::oblivious_maxquad;
  cfg.T = 15;
  cfg.rho = 0.1;
  cfg.p_smooth = 0.1;
  cfg.seed = 51;
  const RegretSeries s = run_experiment(cfg);
  const DecisionSet k = make_decision_set(cfg);
  const EffectiveConstants c = effective_constants(cfg);
  const double eta = std::min(1.0 / (8.0 * c.G * c.D), c.alpha / 2.0);
  RandomSource yrng(1);
  for (std::size_t i = 0; i < s.rounds.size(); ++i) {
    CHECK(k.contains(s.rounds[i].x, 1e-8));
    const double r_prime =
        1.0 / (static_cast<double>(i + 1) * std::sqrt(2.0));
    for (int rep = 0; rep < 3; ++rep) {
      const linalg::Vector y = k.sample(yrng);
      CHECK(learn::qnsgbs_gap(s.realized[i], s.rounds[i].x, y, s.rounds[i].z,
                              s.rounds[i].grad_est, eta, c.D, c.G,
                              r_prime) >= -1e-9);
    }
  }
}

TEST_CASE("lemma QNSGB holds on the logged rounds of a QONS run") {
  const ExperimentConfig cfg = small_qons_config();
  const RegretSeries s = run_experiment(cfg);
  const DecisionSet k = make_decision_set(cfg);
  const EffectiveConstants c = effective_constants(cfg);
  const double eta = std::min(1.0 / (8.0 * c.G * c.D), c.alpha / 2.0);
  RandomSource yrng(17);
  for (std::size_t i = 0; i < s.rounds.size(); ++i)
    for (int rep = 0; rep < 3; ++rep) {
      const linalg::Vector y = k.sample(yrng);
      CHECK(learn::qnsgb_gap(s.realized[i], s.rounds[i].x, y,
                             s.rounds[i].grad_est, eta, c.D, c.G) >= -1e-9);
    }
}

TEST_CASE("verify suites") {
  const SuiteReport qnsgb = verify_lemma_suite(Suite::qnsgb, 400, 7);
  CHECK(qnsgb.pass);
  CHECK(qnsgb.failures == 0);

  const SuiteReport lb = verify_lemma_suite(Suite::expconcave_lb, 400, 7);
  CHECK(lb.pass);

  const SuiteReport qnsgbs = verify_lemma_suite(Suite::qnsgbs, 300, 7);
  CHECK(qnsgbs.pass);

  const SuiteReport qgb = verify_lemma_suite(Suite::qgb, 150, 7);
  CHECK(qgb.pass);
  CHECK(qgb.upper99 < 0.2);

  const SuiteReport ada = verify_lemma_suite(Suite::adagrad_trend, 100, 7);
  CHECK(ada.pass);

  CHECK_THROWS_AS(verify_lemma_suite(Suite::qgb, 50, 7), Error);
}

TEST_CASE("effective constants fall back to family bounds") {
  ExperimentConfig cfg = small_qons_config();
  const EffectiveConstants c = effective_constants(cfg);
  CHECK(c.G > 0.0);
  CHECK(c.D == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(c.beta == doctest::Approx(2.0));
  cfg.G = 123.0;
  CHECK(effective_constants(cfg).G == 123.0);
}
