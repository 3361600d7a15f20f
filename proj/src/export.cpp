#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oxo/harness.hpp"
#include "oxo/stats.hpp"

namespace oxo::harness {

namespace {

constexpr const char* kCsvHeader =
    "round,loss,cum_loss,cum_regret,grad_err_l1,b,c,r_t,clamped,queries";

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot open for writing: " + path);
  out << content;
  if (!out) fail(ErrorCategory::io, "write failed: " + path);
}

}  // namespace

std::string csv_string(const RegretSeries& series) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const RoundRecord& r : series.rounds) {
    out += std::to_string(r.round);
    out += ',';
    out += fmt17(r.loss);
    out += ',';
    out += fmt17(r.cum_loss);
    out += ',';
    out += fmt17(r.cum_regret);
    out += ',';
    out += fmt17(r.grad_err_l1);
    out += ',';
    out += std::to_string(r.b);
    out += ',';
    out += std::to_string(r.c);
    out += ',';
    out += fmt17(r.r_t);
    out += ',';
    out += r.clamped ? '1' : '0';
    out += ',';
    out += std::to_string(r.queries);
    out += '\n';
  }
  return out;
}

void export_csv(const RegretSeries& series, const std::string& path) {
  write_file(path, csv_string(series));
}

RegretSeries import_csv_string(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line))
    fail(ErrorCategory::io, "csv import: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    fail(ErrorCategory::io, "csv import: unexpected header");
  RegretSeries series;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10)
      fail(ErrorCategory::io, "csv import: bad row: " + line);
    RoundRecord r;
    r.round = std::stol(cells[0]);
    r.loss = std::stod(cells[1]);
    r.cum_loss = std::stod(cells[2]);
    r.cum_regret = std::stod(cells[3]);
    r.grad_err_l1 = std::stod(cells[4]);
    r.b = std::stoi(cells[5]);
    r.c = std::stoi(cells[6]);
    r.r_t = std::stod(cells[7]);
    r.clamped = cells[8] == "1";
    r.queries = std::stoi(cells[9]);
    series.rounds.push_back(std::move(r));
  }
  return series;
}

RegretSeries import_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::io, "cannot open csv: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return import_csv_string(buf.str());
}

namespace {

std::vector<double> second_half_values(const RegretSeries& s,
                                       std::vector<double>* basis_log,
                                       std::vector<double>* basis_t23,
                                       double n_dim) {
  std::vector<double> y;
  const std::size_t total = s.rounds.size();
  for (std::size_t i = total / 2; i < total; ++i) {
    const double t = static_cast<double>(s.rounds[i].round);
    if (t < 2.0) continue;
    y.push_back(s.rounds[i].cum_regret);
    if (basis_log) basis_log->push_back(n_dim * std::log(t));
    if (basis_t23) basis_t23->push_back(std::pow(t, 2.0 / 3.0));
  }
  return y;
}

}  // namespace

double fitted_log_coefficient(const RegretSeries& series) {
  const double n = series.has_config ? series.config.dim : 1.0;
  std::vector<double> basis;
  const std::vector<double> y = second_half_values(series, &basis, nullptr, n);
  if (y.empty()) return 0.0;
  return stats::fit_scale(y, basis);
}

double fitted_t23_coefficient(const RegretSeries& series) {
  std::vector<double> basis;
  const std::vector<double> y = second_half_values(series, nullptr, &basis, 1.0);
  if (y.empty()) return 0.0;
  return stats::fit_scale(y, basis);
}

std::string json_summary_string(const RegretSeries& series) {
  nlohmann::ordered_json j;
  if (series.has_config) {
    const ExperimentConfig& c = series.config;
    nlohmann::ordered_json cfg;
    cfg["learner"] = to_string(c.learner);
    cfg["adversary"] = losses::to_string(c.adversary);
    cfg["set"] = c.set_kind;
    cfg["dim"] = c.dim;
    cfg["T"] = c.T;
    cfg["G"] = c.G;
    cfg["D"] = c.D;
    cfg["alpha"] = c.alpha;
    cfg["beta"] = c.beta;
    cfg["L"] = c.L;
    cfg["rho"] = c.rho;
    cfg["delta"] = c.delta;
    cfg["p_smooth"] = c.p_smooth;
    cfg["mode"] = qsim::to_string(c.mode);
    cfg["grid_budget"] = c.grid_budget;
    cfg["seed"] = c.seed;
    cfg["gamma"] = c.gamma;
    cfg["epsilon"] = c.epsilon;
    cfg["p_exponent"] = c.p_exponent;
    cfg["fd_h"] = c.fd_h;
    cfg["adversary_offset"] = c.adversary_offset;
    cfg["hess_b"] = c.hess_b;
    cfg["hess_c"] = c.hess_c;
    cfg["hess_r"] = c.hess_r;
    j["config"] = std::move(cfg);
  }
  j["rounds"] = series.rounds.size();
  j["final_regret"] = series.final_regret();
  j["total_loss"] =
      series.rounds.empty() ? 0.0 : series.rounds.back().cum_loss;
  j["best_fixed_total"] = series.best_total;
  j["x_star"] = series.x_star;
  long queries = 0;
  for (const RoundRecord& r : series.rounds) queries += r.queries;
  j["queries_total"] = queries;
  j["fitted_regret_per_nlogt"] = fitted_log_coefficient(series);
  j["fitted_regret_per_t23"] = fitted_t23_coefficient(series);
  return j.dump(2) + "\n";
}

void export_json_summary(const RegretSeries& series, const std::string& path) {
  write_file(path, json_summary_string(series));
}

namespace {

struct SvgMap {
  double width = 800, height = 500;
  double ml = 70, mr = 20, mt = 20, mb = 50;
  double tmax = 1, ymax = 1;

  double px(double t) const {
    const double lt = std::log(std::max(t, 1.0));
    const double lmax = std::log(std::max(tmax, 2.0));
    return ml + (width - ml - mr) * (lt / lmax);
  }
  double py(double y) const {
    return height - mb - (height - mb - mt) * (y / ymax);
  }
};

std::string polyline(const SvgMap& m, const std::vector<double>& ts,
                     const std::vector<double>& ys, const char* color,
                     const char* dash) {
  std::string pts;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", m.px(ts[i]), m.py(ys[i]));
    pts += buf;
  }
  std::string out = "  <polyline fill=\"none\" stroke=\"";
  out += color;
  out += "\"";
  if (dash[0] != '\0') {
    out += " stroke-dasharray=\"";
    out += dash;
    out += "\"";
  }
  out += " stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
  return out;
}

}  // namespace

std::string svg_string(const RegretSeries& series) {
  const double n = series.has_config ? series.config.dim : 1.0;
  const double c_log = fitted_log_coefficient(series);
  const double c_t23 = fitted_t23_coefficient(series);

  std::vector<double> ts, regret, ref_log, ref_t23;
  for (const RoundRecord& r : series.rounds) {
    const double t = static_cast<double>(r.round);
    ts.push_back(t);
    regret.push_back(r.cum_regret);
    ref_log.push_back(c_log * n * std::log(std::max(t, 1.0)));
    ref_t23.push_back(c_t23 * std::pow(t, 2.0 / 3.0));
  }

  SvgMap m;
  m.tmax = ts.empty() ? 1.0 : ts.back();
  m.ymax = 1e-12;
  for (double v : regret) m.ymax = std::max(m.ymax, v);
  for (double v : ref_log) m.ymax = std::max(m.ymax, v);
  for (double v : ref_t23) m.ymax = std::max(m.ymax, v);

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"500\" viewBox=\"0 0 800 500\">\n";
  out += "  <rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  // Axes (log-x): drawn as lines, not polylines.
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                m.ml, m.height - m.mb, m.width - m.mr, m.height - m.mb);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                m.ml, m.mt, m.ml, m.height - m.mb);
  out += buf;
  out += "  <text x=\"400\" y=\"490\" font-size=\"13\" "
         "text-anchor=\"middle\">round t (log scale)</text>\n";
  out += "  <text x=\"15\" y=\"250\" font-size=\"13\" "
         "transform=\"rotate(-90 15 250)\" text-anchor=\"middle\">cumulative "
         "regret</text>\n";

  out += polyline(m, ts, regret, "#1f77b4", "");
  out += polyline(m, ts, ref_log, "#2ca02c", "6,3");
  out += polyline(m, ts, ref_t23, "#d62728", "2,3");

  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "fill=\"#2ca02c\">C n log t (C=%.4g)</text>\n",
                m.ml + 10, m.mt + 16, c_log);
  out += buf;
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                "fill=\"#d62728\">C' t^(2/3) (C'=%.4g)</text>\n",
                m.ml + 10, m.mt + 32, c_t23);
  out += buf;
  out += "</svg>\n";
  return out;
}

void export_svg_plot(const RegretSeries& series, const std::string& path) {
  write_file(path, svg_string(series));
}

}  // namespace oxo::harness
