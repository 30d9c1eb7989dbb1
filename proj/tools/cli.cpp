#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cxorder/kernels.hpp"
#include "cxorder/one_dim.hpp"

namespace cxorder::cli {
namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("missing \"") + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  return j.get<double>();
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  Vector v;
  v.reserve(j.size());
  for (const Json& x : j) v.push_back(number(x, what));
  return v;
}

Json vector_to_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text,
                std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv(const PgdTrace& trace) {
  std::string s = "iteration,objective,grad_norm\n";
  for (const auto& e : trace) {
    s += std::to_string(e.iteration) + "," + format_double(e.objective) + "," +
         format_double(e.grad_norm) + "\n";
  }
  return s;
}

std::string matrix_csv(const Matrix& m) {
  std::string s;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) s += ",";
      s += format_double(m(i, j));
    }
    s += "\n";
  }
  return s;
}

GaussProjectOptions gauss_options(const SolverOptions& opts) {
  GaussProjectOptions g;
  g.method = opts.method;
  if (opts.eta) g.pgd.eta = *opts.eta;
  if (opts.max_iter) g.pgd.max_iter = *opts.max_iter;
  if (opts.tol) g.pgd.tol = *opts.tol;
  g.pgd.record_trace = opts.record_trace;
  return g;
}

WotConfig wot_options(const SolverOptions& opts, std::size_t budget,
                      bool away_steps) {
  WotConfig c;
  if (opts.max_iter) c.max_iter = *opts.max_iter;
  if (opts.tol) c.fw_tol = *opts.tol;
  c.budget = budget;
  c.away_steps = away_steps;
  return c;
}

struct GaussianPair {
  GaussianMeasure mu;
  GaussianMeasure nu;
};

GaussianPair gaussian_pair(const Json& problem) {
  GaussianPair p{gaussian_from_json(require(problem, "mu")),
                 gaussian_from_json(require(problem, "nu"))};
  if (p.mu.dim() != p.nu.dim()) throw ParseError("mu and nu dimensions differ");
  return p;
}

struct DiscretePair {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

DiscretePair discrete_pair(const Json& problem) {
  DiscretePair p{discrete_from_json(require(problem, "mu")),
                 discrete_from_json(require(problem, "nu"))};
  if (p.mu.dim() != p.nu.dim()) throw ParseError("mu and nu dimensions differ");
  return p;
}

Json transform_to_json(const OrderTransform& t) {
  Json j;
  j["O"] = matrix_to_json(t.O.mat());
  j["D"] = vector_to_json(t.D);
  if (t.D_hat) j["D_hat"] = vector_to_json(*t.D_hat);
  if (t.C) j["C"] = matrix_to_json(t.C->mat());
  j["order_margin"] = t.order_margin;
  j["order_tol"] = t.order_tol;
  return j;
}

Json g_to_json(const GFunction& g) {
  return Json{{"nodes", vector_to_json(g.nodes)}, {"values", vector_to_json(g.values)}};
}

class CheckList {
 public:
  // Passes when value <= tolerance.
  void at_most(const std::string& name, double value, double tolerance) {
    add(name, value, tolerance, value <= tolerance);
  }
  // Passes when value >= -tolerance.
  void at_least_minus(const std::string& name, double value, double tolerance) {
    add(name, value, tolerance, value >= -tolerance);
  }
  void holds(const std::string& name, bool ok, double tolerance) {
    add(name, ok ? 1.0 : 0.0, tolerance, ok);
  }

  Json report() const {
    return Json{{"checks", checks_}, {"pass", pass_}};
  }

 private:
  Json checks_ = Json::array();
  bool pass_ = true;

  void add(const std::string& name, double value, double tolerance, bool ok) {
    checks_.push_back(
        Json{{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", ok}});
    pass_ = pass_ && ok;
  }
};

Json check_gaussian(const Json& problem, const std::optional<Json>& claims,
                    const SolverOptions& opts) {
  const GaussianPair g = gaussian_pair(problem);
  const SpdMatrix& mu = g.mu.cov;
  const SpdMatrix& nu = g.nu.cov;
  const GaussianProjections p = project_gaussian(mu, nu, gauss_options(opts));

  GaussianMeasure I(g.nu.mean, p.I.cov);
  GaussianMeasure J(g.mu.mean, p.J.cov);
  CheckList checks;
  const double scale = 1.0 + mu.mat().trace() + nu.mat().trace();
  if (claims && claims->contains("I")) {
    I = gaussian_from_json(claims->at("I"));
    if (I.dim() != mu.dim()) throw ParseError("claimed I has the wrong dimension");
    checks.at_most("I_matches_solver", frobenius_distance(I.cov.mat(), p.I.cov.mat()),
                   1e-6 * scale);
    checks.at_most("mean_I", std::sqrt(kernels::squared_distance(I.mean, g.nu.mean)),
                   1e-12 * scale);
  }
  if (claims && claims->contains("J")) {
    J = gaussian_from_json(claims->at("J"));
    if (J.dim() != mu.dim()) throw ParseError("claimed J has the wrong dimension");
    checks.at_most("J_matches_solver", frobenius_distance(J.cov.mat(), p.J.cov.mat()),
                   1e-6 * scale);
    checks.at_most("mean_J", std::sqrt(kernels::squared_distance(J.mean, g.mu.mean)),
                   1e-12 * scale);
  }

  const double tr_gap = std::abs(I.cov.mat().trace() + J.cov.mat().trace() -
                                 mu.mat().trace() - nu.mat().trace());
  checks.at_most("trace_identity", tr_gap, 1e-8 * scale);
  const double d_i = bw2(mu, I.cov);
  const double d_j = bw2(nu, J.cov);
  checks.at_most("distance_equality", std::abs(d_i - d_j), 1e-8 * scale);
  checks.at_most("distance_formula", std::abs(d_i - p.I.distance2), 1e-8 * scale);
  const double order_tol = order_tolerance(nu);
  checks.at_least_minus("order_I_below_nu",
                        min_eigenvalue(SymMatrix(nu.mat() - I.cov.mat())), order_tol);
  checks.at_least_minus("order_J_above_mu",
                        min_eigenvalue(SymMatrix(J.cov.mat() - mu.mat())), order_tol);
  Json r = checks.report();
  r["mode"] = "gaussian";
  return r;
}

Json check_1d(const DiscretePair& dp, const std::optional<Json>& claims) {
  const Projection1d p = project_1d(dp.mu, dp.nu);
  DiscreteMeasure I = p.I;
  DiscreteMeasure J = p.J;
  CheckList checks;
  const double m2 = dp.mu.second_moment() + dp.nu.second_moment();
  const double scale = 1.0 + m2;
  if (claims && claims->contains("I")) {
    I = discrete_from_json(claims->at("I"));
    if (I.dim() != 1) throw ParseError("claimed I is not 1-d");
    checks.at_most("I_matches_solver", std::sqrt(w2_squared_1d(I, p.I)), 1e-9 * scale);
  }
  if (claims && claims->contains("J")) {
    J = discrete_from_json(claims->at("J"));
    if (J.dim() != 1) throw ParseError("claimed J is not 1-d");
    checks.at_most("J_matches_solver", std::sqrt(w2_squared_1d(J, p.J)), 1e-9 * scale);
  }
  checks.at_most("mean_I", std::abs(I.barycenter()[0] - dp.nu.barycenter()[0]),
                 1e-12 * scale);
  checks.at_most("mean_J", std::abs(J.barycenter()[0] - dp.mu.barycenter()[0]),
                 1e-12 * scale);
  checks.at_most("second_moment_identity",
                 std::abs(I.second_moment() + J.second_moment() - m2), 1e-12 * scale);
  checks.at_most("distance_symmetry",
                 std::abs(w2_squared_1d(dp.mu, J) - w2_squared_1d(dp.nu, I)),
                 1e-12 * scale);
  checks.at_most("distance_equality",
                 std::abs(w2_squared_1d(dp.mu, I) - w2_squared_1d(dp.nu, J)),
                 1e-12 * scale);
  const double cx_tol = 1e-10 * scale;
  checks.holds("convex_order_I_below_nu", check_convex_order_1d(I, dp.nu, cx_tol), cx_tol);
  checks.holds("convex_order_mu_below_J", check_convex_order_1d(dp.mu, J, cx_tol), cx_tol);
  Json r = checks.report();
  r["mode"] = "one_d";
  return r;
}

Json check_discrete(const DiscretePair& dp, const std::optional<Json>& claims,
                    const SolverOptions& opts) {
  const WotConfig cfg = wot_options(opts, WotConfig{}.budget, true);
  const WotResult w = solve_wot(dp.mu, dp.nu, cfg);
  const DiscreteMeasure computed = barycentric_pushforward(w.coupling);
  DiscreteMeasure I = computed;
  CheckList checks;
  const double scale = 1.0 + dp.mu.second_moment() + dp.nu.second_moment();
  if (claims && claims->contains("I")) {
    I = discrete_from_json(claims->at("I"));
    if (I.dim() != dp.mu.dim()) throw ParseError("claimed I has the wrong dimension");
    checks.at_most("I_matches_solver", std::sqrt(exact_w2_squared(I, computed)),
                   1e-6 * scale);
  }
  checks.at_most("fw_gap", w.gap, cfg.fw_tol * scale);
  checks.at_most("mean_I",
                 std::sqrt(kernels::squared_distance(I.barycenter(), dp.nu.barycenter())),
                 1e-10 * scale);
  checks.at_most("value_equality", std::abs(w.value - exact_w2_squared(dp.mu, I)),
                 cfg.fw_tol * scale + 1e-8);
  Json r = checks.report();
  r["mode"] = "discrete";
  return r;
}

}  // namespace

// ------------------------------------------------------------- conversions

Json matrix_to_json(const Matrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vector_to_json(m.row(i)));
  return a;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (const Json& r : j) rows.push_back(vector_from_json(r, what));
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) {
      throw ParseError(std::string(what) + ": ragged rows");
    }
  }
  return Matrix::from_rows(rows);
}

GaussianMeasure gaussian_from_json(const Json& j) {
  Vector mean = vector_from_json(require(j, "mean"), "mean");
  const Matrix cov = matrix_from_json(require(j, "cov"), "cov");
  try {
    return GaussianMeasure(std::move(mean), SpdMatrix(cov));
  } catch (const Error& e) {
    throw ParseError(std::string("invalid Gaussian: ") + e.what());
  }
}

Json gaussian_to_json(const Vector& mean, const Matrix& cov) {
  return Json{{"mean", vector_to_json(mean)}, {"cov", matrix_to_json(cov)}};
}

DiscreteMeasure discrete_from_json(const Json& j) {
  const Json& pts = require(j, "points");
  const Vector weights = vector_from_json(require(j, "weights"), "weights");
  if (!pts.is_array()) throw ParseError("points: expected an array");
  Matrix points;
  if (!pts.empty() && pts.front().is_number()) {
    const Vector flat = vector_from_json(pts, "points");
    points = Matrix(flat.size(), 1);
    for (std::size_t i = 0; i < flat.size(); ++i) points(i, 0) = flat[i];
  } else {
    points = matrix_from_json(pts, "points");
  }
  try {
    return DiscreteMeasure(points, weights);
  } catch (const Error& e) {
    throw ParseError(std::string("invalid measure: ") + e.what());
  }
}

Json discrete_to_json(const DiscreteMeasure& m) {
  return Json{{"points", matrix_to_json(m.points())},
              {"weights", vector_to_json(m.weights())}};
}

bool is_gaussian(const Json& j) { return j.is_object() && j.contains("cov"); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- commands

GaussianReport cmd_project_gaussian(const Json& problem,
                                    const SolverOptions& opts) {
  const GaussianPair g = gaussian_pair(problem);
  GaussianProjections p = project_gaussian(g.mu.cov, g.nu.cov, gauss_options(opts));

  const double shift = kernels::squared_distance(g.mu.mean, g.nu.mean);
  Json r;
  r["I"] = gaussian_to_json(g.nu.mean, p.I.cov.mat());
  r["J"] = gaussian_to_json(g.mu.mean, p.J.cov.mat());
  r["bw2"] = p.I.distance2;
  r["w2_mu_I"] = std::sqrt(shift + p.I.distance2);
  r["w2_nu_J"] = std::sqrt(shift + p.J.distance2);
  r["method"] = std::string(method_name(p.I.method));
  r["transform"] = transform_to_json(*p.I.transform);
  r["diagnostics"] = Json{{"iterations", p.I.diagnostics.iterations},
                          {"solver_residual", p.I.diagnostics.solver_residual},
                          {"corr_residual", p.I.diagnostics.corr_residual}};
  r["dominance"] = std::string(dominance_name(dominance_check(g.mu.cov, g.nu.cov)));
  if (!g.nu.cov.is_pd()) {
    try {
      const UniquenessVerdict v = is_J_unique(g.mu.cov, g.nu.cov, gauss_options(opts));
      r["uniqueness"] = Json{{"unique", v.unique},
                             {"clause", std::string(clause_name(v.clause))},
                             {"explanation", v.explanation}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::rank_ambiguous) throw;
      r["uniqueness"] = Json{{"unique", nullptr},
                             {"clause", "rank_ambiguous"},
                             {"explanation", e.what()}};
    }
  }
  return {std::move(r), std::move(p.trace)};
}

Json cmd_project_1d(const Json& problem) {
  const DiscretePair dp = discrete_pair(problem);
  if (dp.mu.dim() != 1) throw ParseError("project-1d needs 1-d measures");
  const Projection1d p = project_1d(dp.mu, dp.nu);
  Json r;
  r["I"] = discrete_to_json(p.I);
  r["J"] = discrete_to_json(p.J);
  r["distance2"] = p.distance2;
  r["w2_mu_J_squared"] = w2_squared_1d(dp.mu, p.J);
  r["w2_nu_I_squared"] = w2_squared_1d(dp.nu, p.I);
  r["w2_mu_I_squared"] = w2_squared_1d(dp.mu, p.I);
  r["w2_nu_J_squared"] = w2_squared_1d(dp.nu, p.J);
  r["G"] = g_to_json(p.G);
  r["hull"] = g_to_json(p.hull);
  return r;
}

DiscreteReport cmd_project_discrete(const Json& problem,
                                    const SolverOptions& opts,
                                    std::size_t budget, bool away_steps) {
  const DiscretePair dp = discrete_pair(problem);
  const WotResult w = solve_wot(dp.mu, dp.nu, wot_options(opts, budget, away_steps));
  DiscreteReport out;
  out.json["I"] = discrete_to_json(barycentric_pushforward(w.coupling));
  out.json["value"] = w.value;
  out.json["gap"] = w.gap;
  out.json["iterations"] = w.iterations;
  out.json["status"] = w.status == WotStatus::converged ? "converged" : "gap_not_reached";
  out.json["coupling_rows"] = discrete_to_json(dp.mu);
  out.json["coupling_cols"] = discrete_to_json(dp.nu);
  out.coupling = w.coupling.pi();
  out.converged = w.status == WotStatus::converged;
  return out;
}

Json cmd_distance(const Json& problem) {
  const Json& mu = require(problem, "mu");
  const Json& nu = require(problem, "nu");
  if (is_gaussian(mu) != is_gaussian(nu)) {
    throw ParseError("mu and nu must both be Gaussian or both discrete");
  }
  Json r;
  if (is_gaussian(mu)) {
    const GaussianPair g = gaussian_pair(problem);
    r["w2"] = gaussian_w2(g.mu, g.nu);
    r["bw2"] = bw2(g.mu.cov, g.nu.cov);
    r["centered_w2"] = centered_w2(g.mu, g.nu);
  } else {
    const DiscretePair dp = discrete_pair(problem);
    const double w2sq = exact_w2_squared(dp.mu, dp.nu);
    r["w2"] = std::sqrt(w2sq);
    r["w2_squared"] = w2sq;
  }
  return r;
}

Json cmd_check(const Json& problem, const std::optional<Json>& claims,
               const SolverOptions& opts) {
  const Json& mu = require(problem, "mu");
  const Json& nu = require(problem, "nu");
  if (is_gaussian(mu) != is_gaussian(nu)) {
    throw ParseError("mu and nu must both be Gaussian or both discrete");
  }
  if (is_gaussian(mu)) return check_gaussian(problem, claims, opts);
  const DiscretePair dp = discrete_pair(problem);
  if (dp.mu.dim() == 1) return check_1d(dp, claims);
  return check_discrete(dp, claims, opts);
}

// -------------------------------------------------------------------- main

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Wasserstein-2 projections in the convex order", "cxorder"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::string trace_path;
  std::string coupling_path;
  std::string assert_path;
  SolverOptions opts;
  double eta = 0.0;
  int max_iter = 0;
  double tol = 0.0;
  std::size_t budget = WotConfig{}.budget;
  bool no_away = false;

  const std::map<std::string, SolveMethod> methods{
      {"auto", SolveMethod::automatic},
      {"closed-form", SolveMethod::closed_form},
      {"pgd", SolveMethod::pgd}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", input, "problem JSON {\"mu\": ..., \"nu\": ...}; - for stdin")
        ->required();
    sub->add_option("--output", output, "write the JSON report here instead of stdout");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--method", opts.method, "auto, closed-form or pgd")
        ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
    sub->add_option("--eta", eta, "initial PGD step size")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
  };

  CLI::App* gauss = app.add_subcommand("project-gaussian", "Gaussian I and J projections");
  add_common(gauss);
  add_solver(gauss);
  gauss->add_option("--trace", trace_path, "PGD trace CSV (iteration,objective,grad_norm)");

  CLI::App* one_d = app.add_subcommand("project-1d", "exact projections on the line");
  add_common(one_d);

  CLI::App* discrete = app.add_subcommand("project-discrete", "weak-OT projection I");
  add_common(discrete);
  add_solver(discrete);
  discrete->add_option("--budget", budget, "maximum n * m");
  discrete->add_flag("--no-away-steps", no_away, "plain Frank-Wolfe");
  discrete->add_option("--coupling", coupling_path, "dense coupling CSV");

  CLI::App* distance = app.add_subcommand("distance", "W2 between the two inputs");
  add_common(distance);

  CLI::App* check = app.add_subcommand("check", "run the invariant suite");
  add_common(check);
  add_solver(check);
  check->add_option("--assert-file", assert_path, "JSON with claimed \"I\"/\"J\" to verify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kParseError;
  }
  if (eta > 0.0) opts.eta = eta;
  if (max_iter > 0) opts.max_iter = max_iter;
  if (tol > 0.0) opts.tol = tol;
  opts.record_trace = !trace_path.empty();

  try {
    const Json problem = parse_json_file(input);
    int code = kOk;
    Json report;
    if (gauss->parsed()) {
      GaussianReport g = cmd_project_gaussian(problem, opts);
      if (!trace_path.empty()) write_text(trace_path, trace_csv(g.trace), out);
      report = std::move(g.json);
    } else if (one_d->parsed()) {
      report = cmd_project_1d(problem);
    } else if (discrete->parsed()) {
      DiscreteReport d = cmd_project_discrete(problem, opts, budget, !no_away);
      if (!coupling_path.empty()) write_text(coupling_path, matrix_csv(d.coupling), out);
      report = std::move(d.json);
      if (!d.converged) {
        err << "gap_not_reached: Frank-Wolfe gap " << report["gap"].get<double>()
            << " above tolerance\n";
        code = kSolverFailure;
      }
    } else if (distance->parsed()) {
      report = cmd_distance(problem);
    } else {
      std::optional<Json> claims;
      if (!assert_path.empty()) claims = parse_json_file(assert_path);
      report = cmd_check(problem, claims, opts);
      if (!report["pass"].get<bool>()) code = kCheckFailed;
    }
    write_text(output, dump(report), out);
    return code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const Error& e) {
    err << "solver failure: " << e.what();
    if (!std::isnan(e.residual())) err << " (residual " << e.residual() << ")";
    err << "\n";
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace cxorder::cli
