#include "oxo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "oxo/stats.hpp"

namespace oxo::harness {

using learn::LearnerState;
using learn::ParameterSchedule;
using linalg::norm1;
using linalg::sub;
using losses::Adversary;
using losses::LossFunction;

LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "ons_exact") return LearnerKind::ons_exact;
  if (s == "fd_ons") return LearnerKind::fd_ons;
  if (s == "qons") return LearnerKind::qons;
  if (s == "adagrad") return LearnerKind::adagrad;
  if (s == "ons_hessian") return LearnerKind::ons_hessian;
  if (s == "ons_hessian_est") return LearnerKind::ons_hessian_est;
  if (s == "qons_nonsmooth") return LearnerKind::qons_nonsmooth;
  fail(ErrorCategory::invalid_input, "unknown learner kind: " + s);
}

std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::ons_exact: return "ons_exact";
    case LearnerKind::fd_ons: return "fd_ons";
    case LearnerKind::qons: return "qons";
    case LearnerKind::adagrad: return "adagrad";
    case LearnerKind::ons_hessian: return "ons_hessian";
    case LearnerKind::ons_hessian_est: return "ons_hessian_est";
    case LearnerKind::qons_nonsmooth: return "qons_nonsmooth";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Vector parse_vector(const std::string& s) {
  Vector v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double x = std::stod(item, &pos);
    if (pos != item.size())
      fail(ErrorCategory::invalid_input, "config: bad number '" + item + "'");
    v.push_back(x);
  }
  return v;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double x = std::stod(s, &pos);
  if (pos != s.size())
    fail(ErrorCategory::invalid_input, "config: bad number '" + s + "'");
  return x;
}

long parse_long(const std::string& s) {
  std::size_t pos = 0;
  const long x = std::stol(s, &pos);
  if (pos != s.size())
    fail(ErrorCategory::invalid_input, "config: bad integer '" + s + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long long x = std::stoull(s, &pos);
  if (pos != s.size())
    fail(ErrorCategory::invalid_input, "config: bad integer '" + s + "'");
  return x;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  bool rho_given = false, delta_given = false;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCategory::invalid_input,
           "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "learner") cfg.learner = learner_kind_from_string(val);
    else if (key == "adversary") cfg.adversary = losses::adversary_kind_from_string(val);
    else if (key == "set") cfg.set_kind = val;
    else if (key == "dim") cfg.dim = static_cast<int>(parse_long(val));
    else if (key == "ball_radius") cfg.ball_radius = parse_double(val);
    else if (key == "ball_center") cfg.ball_center = parse_vector(val);
    else if (key == "box_lower") cfg.box_lower = parse_vector(val);
    else if (key == "box_upper") cfg.box_upper = parse_vector(val);
    else if (key == "T") cfg.T = parse_long(val);
    else if (key == "G") cfg.G = parse_double(val);
    else if (key == "D") cfg.D = parse_double(val);
    else if (key == "alpha") cfg.alpha = parse_double(val);
    else if (key == "beta") cfg.beta = parse_double(val);
    else if (key == "L") cfg.L = parse_double(val);
    else if (key == "rho") { cfg.rho = parse_double(val); rho_given = true; }
    else if (key == "delta") { cfg.delta = parse_double(val); delta_given = true; }
    else if (key == "p_smooth") cfg.p_smooth = parse_double(val);
    else if (key == "mode") cfg.mode = qsim::sim_mode_from_string(val);
    else if (key == "grid_budget") cfg.grid_budget = static_cast<int>(parse_long(val));
    else if (key == "seed") cfg.seed = parse_u64(val);
    else if (key == "gamma") cfg.gamma = parse_double(val);
    else if (key == "epsilon") cfg.epsilon = parse_double(val);
    else if (key == "p_exponent") cfg.p_exponent = parse_double(val);
    else if (key == "fd_h") cfg.fd_h = parse_double(val);
    else if (key == "adversary_offset") cfg.adversary_offset = parse_double(val);
    else if (key == "hess_b") cfg.hess_b = static_cast<int>(parse_long(val));
    else if (key == "hess_c") cfg.hess_c = static_cast<int>(parse_long(val));
    else if (key == "hess_r") cfg.hess_r = parse_double(val);
    else if (key == "out_csv") cfg.out_csv = val;
    else if (key == "out_json") cfg.out_json = val;
    else if (key == "out_svg") cfg.out_svg = val;
    else
      fail(ErrorCategory::invalid_input,
           "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (cfg.T < 1) fail(ErrorCategory::invalid_input, "config: T >= 1 required");
  if (rho_given && delta_given) {
    const double want = static_cast<double>(cfg.T) * cfg.rho;
    if (std::abs(cfg.delta - want) > 1e-9 * std::max(1.0, std::abs(want)))
      fail(ErrorCategory::invalid_input,
           "config: delta must equal T * rho when both are given");
  } else if (delta_given) {
    cfg.rho = cfg.delta / static_cast<double>(cfg.T);
  } else if (rho_given) {
    cfg.delta = static_cast<double>(cfg.T) * cfg.rho;
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_env_seed(ExperimentConfig& cfg) {
  const char* env = std::getenv("OXO_SEED");
  if (env != nullptr && *env != '\0') cfg.seed = parse_u64(env);
}

DecisionSet make_decision_set(const ExperimentConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(cfg.dim);
  if (cfg.dim < 1) fail(ErrorCategory::invalid_input, "config: dim >= 1");
  if (cfg.set_kind == "ball") {
    Vector c = cfg.ball_center.empty() ? Vector(n, 0.0) : cfg.ball_center;
    if (c.size() != n)
      fail(ErrorCategory::invalid_input, "config: ball_center dimension");
    return DecisionSet::ball(std::move(c), cfg.ball_radius);
  }
  if (cfg.set_kind == "box") {
    Vector lo = cfg.box_lower.empty() ? Vector(n, -1.0) : cfg.box_lower;
    Vector hi = cfg.box_upper.empty() ? Vector(n, 1.0) : cfg.box_upper;
    if (lo.size() != n || hi.size() != n)
      fail(ErrorCategory::invalid_input, "config: box bound dimensions");
    return DecisionSet::box(std::move(lo), std::move(hi));
  }
  fail(ErrorCategory::invalid_input, "config: set must be box or ball");
}

namespace {

bool uses_circuit(LearnerKind k) {
  return k == LearnerKind::qons || k == LearnerKind::adagrad ||
         k == LearnerKind::ons_hessian_est ||
         k == LearnerKind::qons_nonsmooth;
}

// Margin by which the loss domain exceeds K: circuit grids evaluate at
// x +- r/2 per axis and the non-smooth pipeline additionally samples z with
// ||z - x||_2 <= sqrt(n) r'_1 = 1.
double domain_margin(const ExperimentConfig& cfg) {
  switch (cfg.learner) {
    case LearnerKind::ons_exact:
    case LearnerKind::ons_hessian:
      return 0.0;
    case LearnerKind::fd_ons:
      return cfg.fd_h;
    case LearnerKind::qons:
    case LearnerKind::adagrad:
      return 0.1;
    case LearnerKind::ons_hessian_est:
      return std::max(0.1, cfg.hess_r * std::sqrt(cfg.dim));
    case LearnerKind::qons_nonsmooth:
      return 1.0 + 0.01;
  }
  return 0.0;
}

struct RunSetup {
  DecisionSet set;
  DecisionSet eval_set;  // set dilated by the domain margin
  EffectiveConstants consts;
  ParameterSchedule sched;
};

RunSetup build_setup(const ExperimentConfig& cfg) {
  DecisionSet set = make_decision_set(cfg);
  const double margin = domain_margin(cfg);
  DecisionSet eval_set = margin > 0.0 ? set.dilated(margin) : set;

  const std::uint64_t adv_seed = derive_stream(cfg.seed, "adversary").seed();
  Adversary adv(cfg.adversary, adv_seed, set, cfg.adversary_offset);
  const losses::LossConstants family = adv.uniform_constants(eval_set);

  EffectiveConstants c;
  c.G = cfg.G > 0.0 ? cfg.G : family.G;
  c.D = cfg.D > 0.0 ? cfg.D : set.diameter();
  c.alpha = cfg.alpha > 0.0 ? cfg.alpha : family.alpha;
  c.beta = cfg.beta > 0.0 ? cfg.beta : family.beta.value_or(0.0);
  c.L = cfg.L > 0.0 ? cfg.L : family.L.value_or(0.0);

  ParameterSchedule sched;
  const int n = cfg.dim;
  switch (cfg.learner) {
    case LearnerKind::ons_exact:
    case LearnerKind::fd_ons: {
      const double gamma = cfg.gamma > 0.0
                               ? cfg.gamma
                               : std::min(1.0 / (8.0 * c.G * c.D), c.alpha / 2.0);
      sched.gamma = gamma;
      sched.epsilon = cfg.epsilon > 0.0
                          ? cfg.epsilon
                          : 1.0 / (gamma * gamma * c.D * c.D);
      sched.n = n;
      sched.G = c.G;
      sched.beta = c.beta;
      break;
    }
    case LearnerKind::qons: {
      if (!(c.beta > 0.0))
        fail(ErrorCategory::invalid_input,
             "qons requires a smoothness constant (declared or derivable)");
      if (!(cfg.rho > 0.0))
        fail(ErrorCategory::invalid_input, "qons requires rho (or delta)");
      sched = learn::qons_schedule(cfg.T, n, c.G, c.D, c.alpha, c.beta, cfg.rho);
      if (cfg.epsilon > 0.0) sched.epsilon = cfg.epsilon;
      break;
    }
    case LearnerKind::adagrad: {
      if (!(c.beta > 0.0) || !(cfg.rho > 0.0))
        fail(ErrorCategory::invalid_input, "adagrad requires beta and rho");
      sched = learn::qons_schedule(cfg.T, n, c.G, c.D, c.alpha, c.beta, cfg.rho);
      sched.p_exponent = cfg.p_exponent;
      const double q = cfg.p_exponent > 0.5
                           ? 2.0 * cfg.p_exponent / (2.0 * cfg.p_exponent - 1.0)
                           : std::numeric_limits<double>::infinity();
      const double dq = set.diameter_lq(q);
      sched.gamma = cfg.gamma > 0.0 ? cfg.gamma : std::sqrt(2.0) / dq;
      sched.epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : 1.0;
      break;
    }
    case LearnerKind::ons_hessian:
    case LearnerKind::ons_hessian_est: {
      if (!(c.L > 0.0))
        fail(ErrorCategory::invalid_input,
             "hessian learners require a gradient Lipschitz constant L");
      sched = learn::ons_hessian_schedule(c.D, c.L);
      if (cfg.epsilon > 0.0) sched.epsilon = cfg.epsilon;
      sched.n = n;
      sched.G = c.G;
      break;
    }
    case LearnerKind::qons_nonsmooth: {
      if (!(cfg.rho > 0.0) || !(cfg.p_smooth > 0.0))
        fail(ErrorCategory::invalid_input,
             "qons_nonsmooth requires rho and p_smooth");
      sched = learn::nonsmooth_qons_schedule(cfg.T, n, c.G, c.D, c.alpha,
                                             cfg.rho, cfg.p_smooth);
      if (cfg.epsilon > 0.0) sched.epsilon = cfg.epsilon;
      break;
    }
  }

  // The dilation must cover the widest circuit grid actually used.
  if (uses_circuit(cfg.learner) &&
      cfg.learner != LearnerKind::ons_hessian_est) {
    const double reach = sched.r(1) * std::sqrt(static_cast<double>(n)) +
                         (cfg.learner == LearnerKind::qons_nonsmooth ? 1.0 : 0.0);
    if (reach > margin + 1e-12)
      fail(ErrorCategory::invalid_input,
           "config: circuit grid exceeds the loss domain margin");
  }
  return RunSetup{std::move(set), std::move(eval_set), c, sched};
}

}  // namespace

EffectiveConstants effective_constants(const ExperimentConfig& cfg) {
  return build_setup(cfg).consts;
}

RegretSeries run_experiment(const ExperimentConfig& cfg) {
  RunSetup setup = build_setup(cfg);
  const DecisionSet& k = setup.set;
  const int n = cfg.dim;

  const std::uint64_t adv_seed = derive_stream(cfg.seed, "adversary").seed();
  Adversary adv(cfg.adversary, adv_seed, k, cfg.adversary_offset);

  RandomSource rng_init = derive_stream(cfg.seed, "init");
  RandomSource rng_measure = derive_stream(cfg.seed, "measure");
  RandomSource rng_zsample = derive_stream(cfg.seed, "zsample");
  RandomSource rng_best = derive_stream(cfg.seed, "best-fixed");

  LearnerState state = learn::init_state(k, setup.sched, rng_init);

  RegretSeries series;
  series.config = cfg;
  series.has_config = true;
  series.rounds.reserve(cfg.T);
  series.realized.reserve(cfg.T);

  double cum_loss = 0.0;
  for (long t = 1; t <= cfg.T; ++t) {
    try {
      const Vector x_t = state.x;
      if (!k.contains(x_t, 1e-8))
        fail(ErrorCategory::internal, "iterate left the decision set");
      // Protocol order: the adversary sees the committed decision only.
      LossFunction f = adv.next(x_t, t);

      RoundRecord rec;
      rec.round = t;
      rec.x = x_t;
      rec.loss = f.value(x_t);
      cum_loss += rec.loss;
      rec.cum_loss = cum_loss;

      switch (cfg.learner) {
        case LearnerKind::ons_exact: {
          rec.grad_est = f.gradient(x_t);
          rec.queries = 0;
          state = learn::ons_step(state, f, k);
          break;
        }
        case LearnerKind::fd_ons: {
          const learn::FdGradient fd =
              learn::fd_gradient(f, x_t, cfg.fd_h, setup.consts.beta);
          rec.grad_est = fd.gradient;
          rec.queries = fd.queries_used;
          rec.grad_err_l1 = norm1(sub(fd.gradient, f.gradient(x_t)));
          state = learn::rank1_newton_step(state, fd.gradient,
                                           setup.sched.gamma, k);
          break;
        }
        case LearnerKind::qons: {
          const qsim::QuantumGradEstimate est = qsim::estimate_gradient(
              f, x_t, t, setup.sched.rho, setup.consts.G, setup.consts.beta,
              setup.sched.r(t), cfg.mode, rng_measure, cfg.grid_budget);
          rec.grad_est = est.gradient;
          rec.queries = est.queries_used;
          rec.grad_err_l1 = norm1(sub(est.gradient, f.gradient(x_t)));
          rec.b = est.params.b;
          rec.c = est.params.c;
          rec.r_t = est.params.r;
          rec.clamped = est.params.clamped;
          state = learn::qons_step(state, est, k);
          break;
        }
        case LearnerKind::adagrad: {
          const qsim::QuantumGradEstimate est = qsim::estimate_gradient(
              f, x_t, t, setup.sched.rho, setup.consts.G, setup.consts.beta,
              setup.sched.r(t), cfg.mode, rng_measure, cfg.grid_budget);
          rec.grad_est = est.gradient;
          rec.queries = est.queries_used;
          rec.grad_err_l1 = norm1(sub(est.gradient, f.gradient(x_t)));
          rec.b = est.params.b;
          rec.c = est.params.c;
          rec.r_t = est.params.r;
          rec.clamped = est.params.clamped;
          state = learn::adagrad_step(state, est.gradient, k);
          break;
        }
        case LearnerKind::ons_hessian: {
          const Vector g = f.gradient(x_t);
          rec.grad_est = g;
          rec.queries = 0;
          state = learn::ons_hessian_step(state, g, f.hessian(x_t), k, false);
          break;
        }
        case LearnerKind::ons_hessian_est: {
          const Vector g = f.gradient(x_t);
          const qsim::CircuitParams hp =
              qsim::make_params(cfg.hess_b, cfg.hess_c, n, cfg.hess_r,
                                setup.consts.L, cfg.grid_budget);
          const linalg::Matrix h =
              qsim::estimate_hessian(f, x_t, hp, rng_measure);
          rec.grad_est = g;
          rec.queries = 4 * n;  // n row circuits, 4 oracle calls each
          rec.b = hp.b;
          rec.c = hp.c;
          rec.r_t = hp.r;
          state = learn::ons_hessian_step(state, g, h, k, true);
          break;
        }
        case LearnerKind::qons_nonsmooth: {
          learn::NonsmoothStep step = learn::nonsmooth_qons_step(
              state, f, k, cfg.mode, rng_measure, rng_zsample,
              cfg.grid_budget);
          rec.grad_est = step.estimate.gradient;
          rec.z = step.z;
          rec.queries = step.estimate.queries_used;
          rec.grad_err_l1 =
              norm1(sub(step.estimate.gradient, f.gradient(step.z)));
          rec.b = step.estimate.params.b;
          rec.c = step.estimate.params.c;
          rec.r_t = step.estimate.params.r;
          rec.clamped = step.estimate.params.clamped;
          state = std::move(step.state);
          break;
        }
      }

      series.rounds.push_back(std::move(rec));
      series.realized.push_back(std::move(f));
    } catch (const Error& e) {
      throw Error(e.category(),
                  "round " + std::to_string(t) + ": " + e.what());
    }
  }

  const double tol = 1e-8 * static_cast<double>(cfg.T);
  series.x_star = losses::best_fixed(series.realized, k, tol, rng_best, 5);
  series.best_total = losses::total_value(series.realized, series.x_star);

  double cum_best = 0.0;
  for (long t = 1; t <= cfg.T; ++t) {
    cum_best += series.realized[t - 1].value(series.x_star);
    series.rounds[t - 1].cum_regret = series.rounds[t - 1].cum_loss - cum_best;
  }
  return series;
}

Suite suite_from_string(const std::string& s) {
  if (s == "qgb") return Suite::qgb;
  if (s == "qnsgb") return Suite::qnsgb;
  if (s == "qnsgbs") return Suite::qnsgbs;
  if (s == "expconcave_lb") return Suite::expconcave_lb;
  if (s == "adagrad_trend") return Suite::adagrad_trend;
  fail(ErrorCategory::invalid_input, "unknown verify suite: " + s);
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::qgb: return "qgb";
    case Suite::qnsgb: return "qnsgb";
    case Suite::qnsgbs: return "qnsgbs";
    case Suite::expconcave_lb: return "expconcave_lb";
    case Suite::adagrad_trend: return "adagrad_trend";
  }
  return "?";
}

namespace {

Vector random_unit_vec(RandomSource& rng, std::size_t n) {
  Vector a(n);
  double na = 0.0;
  do {
    for (std::size_t i = 0; i < n; ++i) a[i] = rng.normal();
    na = linalg::norm2(a);
  } while (na == 0.0);
  return linalg::scale(a, 1.0 / na);
}

// Positive unit direction for log losses (components in [0.6, 1.4]).
Vector random_log_dir(RandomSource& rng, std::size_t n) {
  Vector a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = rng.uniform(0.6, 1.4);
  return linalg::scale(a, 1.0 / linalg::norm2(a));
}

// Perturbation with a prescribed l1 norm.
Vector l1_perturbation(RandomSource& rng, std::size_t n, double l1) {
  Vector e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = rng.normal();
  const double cur = linalg::norm1(e);
  if (cur == 0.0) return Vector(n, 0.0);
  return linalg::scale(e, l1 / cur);
}

SuiteReport report_common(Suite which, long trials, long failures,
                          double budget, std::string notes) {
  SuiteReport r;
  r.name = to_string(which);
  r.trials = trials;
  r.failures = failures;
  r.failure_rate =
      trials > 0 ? static_cast<double>(failures) / trials : 0.0;
  r.upper99 = stats::binomial_upper_bound(failures, trials, 0.99);
  r.budget = budget;
  r.pass = budget > 0.0 ? (r.upper99 < budget) : (failures == 0);
  r.notes = std::move(notes);
  return r;
}

SuiteReport suite_qgb(long trials, std::uint64_t seed) {
  const int n = 2;
  const double rho = 0.2;
  const DecisionSet box = DecisionSet::box(Vector(n, -1.0), Vector(n, 1.0));
  // Unit-direction square losses with |b| <= 1 on the box dilated by the
  // grid reach: sup |a^T x - b| <= sqrt(2)*1.01 + 1.
  const double m_sup = std::sqrt(2.0) * 1.01 + 1.0;
  const double g_fam = 2.0 * m_sup;
  const double beta = 2.0;
  RandomSource rng = derive_stream(seed, "qgb");
  long failures = 0;
  static const long t_grid[3] = {1, 4, 16};
  for (long i = 0; i < trials; ++i) {
    const long t = t_grid[i % 3];
    const Vector a = random_unit_vec(rng, n);
    const double b = rng.uniform(-1.0, 1.0);
    const LossFunction f{losses::SquareLoss{a, b}};
    const Vector x = box.sample(rng);
    const double r_t = rho * g_fam /
                       (M_PI * 8.0 * (n / rho + 1.0) * beta * t);
    const qsim::QuantumGradEstimate est = qsim::estimate_gradient(
        f, x, t, rho, g_fam, beta, r_t, qsim::SimMode::full, rng);
    const double err = norm1(sub(est.gradient, f.gradient(x)));
    if (err > qsim::qgb_error_bound(n, rho, beta, r_t)) ++failures;
  }
  return report_common(Suite::qgb, trials, failures, rho,
                       "square losses, full simulation, t in {1,4,16}");
}

SuiteReport suite_qnsgb(long trials, std::uint64_t seed) {
  RandomSource rng = derive_stream(seed, "qnsgb");
  long failures = 0;
  const DecisionSet box = DecisionSet::box(Vector(2, -1.0), Vector(2, 1.0));
  const DecisionSet posbox = DecisionSet::box(Vector(2, 0.5), Vector(2, 1.0));
  for (long i = 0; i < trials; ++i) {
    const bool use_log = rng.uniform01() < 0.3;
    const DecisionSet& k = use_log ? posbox : box;
    LossFunction f = use_log
        ? LossFunction(losses::LogLoss{random_log_dir(rng, 2)})
        : LossFunction(losses::SquareLoss{random_unit_vec(rng, 2),
                                          rng.uniform(-1.0, 1.0)});
    const losses::LossConstants c = losses::exact_constants(f, k);
    const double d = k.diameter();
    const double eta = std::min(1.0 / (8.0 * c.G * d), c.alpha / 2.0);
    const Vector x = k.sample(rng);
    const Vector y = k.sample(rng);
    Vector est = f.gradient(x);
    linalg::axpy(est, 1.0,
                 l1_perturbation(rng, 2, rng.uniform(0.0, 2.0 * c.G)));
    if (learn::qnsgb_gap(f, x, y, est, eta, d, c.G) < -1e-9) ++failures;
  }
  return report_common(Suite::qnsgb, trials, failures, 0.0,
                       "square/log losses, perturbed estimates, slack 1e-9");
}

SuiteReport suite_qnsgbs(long trials, std::uint64_t seed) {
  RandomSource rng = derive_stream(seed, "qnsgbs");
  long failures = 0;
  const DecisionSet box = DecisionSet::box(Vector(2, -1.0), Vector(2, 1.0));
  const double r_prime_max = 1.0 / std::sqrt(2.0);
  const DecisionSet dil = box.dilated(std::sqrt(2.0) * r_prime_max + 1e-9);
  for (long i = 0; i < trials; ++i) {
    const Vector a1 = random_unit_vec(rng, 2);
    const Vector a2 = random_unit_vec(rng, 2);
    LossFunction f{losses::MaxQuadratic{
        losses::SquareLoss{a1, linalg::dot(a1, box.sample(rng))},
        losses::SquareLoss{a2, linalg::dot(a2, box.sample(rng))}}};
    const losses::LossConstants c = losses::exact_constants(f, dil);
    const double d = box.diameter();
    const double eta = std::min(1.0 / (8.0 * c.G * d), c.alpha / 2.0);
    const Vector x = box.sample(rng);
    const Vector y = box.sample(rng);
    const double r_prime = rng.uniform(0.0, r_prime_max);
    const Vector z = geom::sample_linf_ball(x, r_prime, rng);
    Vector est = f.gradient(z);
    linalg::axpy(est, 1.0,
                 l1_perturbation(rng, 2, rng.uniform(0.0, 2.0 * c.G)));
    if (learn::qnsgbs_gap(f, x, y, z, est, eta, d, c.G, r_prime) < -1e-9)
      ++failures;
  }
  return report_common(Suite::qnsgbs, trials, failures, 0.0,
                       "max-quadratic losses, sampled z, slack 1e-9");
}

SuiteReport suite_expconcave_lb(long trials, std::uint64_t seed) {
  RandomSource rng = derive_stream(seed, "expconcave");
  long failures = 0;
  const DecisionSet box = DecisionSet::box(Vector(2, -1.0), Vector(2, 1.0));
  const DecisionSet posbox = DecisionSet::box(Vector(2, 0.5), Vector(2, 1.0));
  for (long i = 0; i < trials; ++i) {
    const bool use_log = rng.uniform01() < 0.5;
    const DecisionSet& k = use_log ? posbox : box;
    LossFunction f = use_log
        ? LossFunction(losses::LogLoss{random_log_dir(rng, 2)})
        : LossFunction(losses::SquareLoss{random_unit_vec(rng, 2),
                                          rng.uniform(-1.0, 1.0)});
    const losses::LossConstants c = losses::exact_constants(f, k);
    const double d = k.diameter();
    const double eta = std::min(1.0 / (8.0 * c.G * d), c.alpha / 2.0);
    const Vector x = k.sample(rng);
    const Vector y = k.sample(rng);
    if (learn::expconcave_lb_gap(f, x, y, eta) < -1e-9) ++failures;
  }
  return report_common(Suite::expconcave_lb, trials, failures, 0.0,
                       "exact gradients, eta = min(1/(8GD), alpha/2)");
}

SuiteReport suite_adagrad_trend(long trials, std::uint64_t seed) {
  const long t0 = std::max<long>(100, trials);
  std::vector<double> ratio;
  for (long mult : {1, 2, 4}) {
    ExperimentConfig cfg;
    cfg.learner = LearnerKind::adagrad;
    cfg.adversary = losses::AdversaryKind::rotating_square;
    cfg.T = t0 * mult;
    cfg.rho = 0.2;
    cfg.mode = qsim::SimMode::idealized;
    cfg.seed = seed;
    const RegretSeries s = run_experiment(cfg);
    ratio.push_back(std::max(s.final_regret(), 0.0) /
                    std::sqrt(static_cast<double>(cfg.T)));
  }
  const double lo = *std::min_element(ratio.begin(), ratio.end());
  const double hi = *std::max_element(ratio.begin(), ratio.end());
  const bool ok = hi <= 2.0 * lo + 1.0;
  SuiteReport r = report_common(Suite::adagrad_trend, 3, ok ? 0 : 1, 0.0,
                                "R(T)/sqrt(T) stable across T, 2T, 4T");
  return r;
}

}  // namespace

SuiteReport verify_lemma_suite(Suite which, long trials, std::uint64_t seed) {
  if (trials < 100)
    fail(ErrorCategory::invalid_input, "verify: trials >= 100 required");
  switch (which) {
    case Suite::qgb: return suite_qgb(trials, seed);
    case Suite::qnsgb: return suite_qnsgb(trials, seed);
    case Suite::qnsgbs: return suite_qnsgbs(trials, seed);
    case Suite::expconcave_lb: return suite_expconcave_lb(trials, seed);
    case Suite::adagrad_trend: return suite_adagrad_trend(trials, seed);
  }
  fail(ErrorCategory::internal, "verify: unhandled suite");
}

}  // namespace oxo::harness
