#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "borelsum/acceptance.hpp"
#include "borelsum/config.hpp"
#include "borelsum/error.hpp"
#include "borelsum/formal.hpp"
#include "borelsum/goursat.hpp"
#include "borelsum/invariants.hpp"
#include "borelsum/oracle.hpp"
#include "borelsum/singularity.hpp"
#include "borelsum/summation.hpp"
#include "borelsum/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace borelsum;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::string config_path;
  std::string out_dir = ".";
  std::string checkpoint;
  unsigned threads = 0;
  bool verify_conjugacy = false;
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string lambda_tag(double lam) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lam);
  return buf;
}

json grid_json(const goursat::GoursatDomain& d, std::optional<double> nu) {
  json g;
  g["xi_max"] = d.xi_max;
  g["T"] = d.T;
  g["n_xi"] = d.n_xi;
  g["n_zeta"] = d.n_zeta;
  g["n_t"] = d.n_t;
  g["quad_order"] = d.quad_order;
  g["sign"] = d.sign;
  g["interp"] = d.interp == num::InterpKind::Chebyshev ? "chebyshev" : "local-cubic";
  if (nu) g["nu"] = *nu;
  return g;
}

json header(const config::RunConfig& c, const std::string& command, json grid) {
  json h;
  h["tool"] = "borelsum";
  h["version"] = kVersion;
  h["command"] = command;
  h["config_hash"] = config::config_hash(c);
  h["grid"] = std::move(grid);
  return h;
}

std::string csv_header(const json& h) { return "# " + h.dump() + "\n"; }

void write_text(const Globals& g, const std::string& name, const std::string& text) {
  fs::create_directories(g.out_dir);
  const fs::path p = fs::path(g.out_dir) / name;
  std::ofstream os(p);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  os << text;
  if (!os) throw Error(ErrorCode::IoError, "failed writing " + p.string());
}

void write_json_file(const Globals& g, const std::string& name, const json& j) { write_text(g, name, j.dump(2) + "\n"); }

std::vector<double> x_samples(const config::RunConfig& c) {
  std::vector<double> xs(c.x_points);
  for (std::size_t m = 0; m < c.x_points; ++m) {
    xs[m] = c.x_min + (c.x_max - c.x_min) * static_cast<double>(m) / static_cast<double>(c.x_points - 1);
  }
  // the amplitude decomposition needs an x = 0 sample
  if (c.x_min <= 0.0 && c.x_max >= 0.0 && std::find(xs.begin(), xs.end(), 0.0) == xs.end()) {
    xs.insert(std::upper_bound(xs.begin(), xs.end(), 0.0), 0.0);
  }
  return xs;
}

bool per_lambda_T(const config::RunConfig& c) { return c.auto_T && c.potential.kind.rfind("pendulum", 0) == 0; }

goursat::GoursatDomain domain_for(const config::RunConfig& c, double lam) {
  if (per_lambda_T(c)) return c.domain_for(lam);
  return c.domain_for(*std::min_element(c.lambdas.begin(), c.lambdas.end()));
}

bool same_grid(const goursat::GoursatDomain& a, const goursat::GoursatDomain& b) {
  return a.xi_max == b.xi_max && a.T == b.T && a.n_xi == b.n_xi && a.n_zeta == b.n_zeta && a.n_t == b.n_t &&
         a.quad_order == b.quad_order && a.sign == b.sign && a.interp == b.interp && a.ray_angle == b.ray_angle;
}

/// Psi fields keyed by (T, sign); the plus field of each box may resume from and is saved to the checkpoint.
class FieldStore {
 public:
  FieldStore(const config::RunConfig& c, const Potential& p, const Globals& g) : c_(c), p_(p), g_(g) {}

  const goursat::PsiField& get(goursat::GoursatDomain d) {
    const auto key = std::make_pair(d.T, d.sign);
    auto it = fields_.find(key);
    if (it != fields_.end()) return it->second;
    std::optional<goursat::Checkpoint> ck;
    const std::string path = checkpoint_path(d);
    const std::string hash = goursat::potential_hash(p_);
    if (!path.empty() && fs::exists(path)) {
      ck = goursat::read_checkpoint(path);
      if (ck->potential_hash != hash || !same_grid(ck->field.domain(), d)) {
        std::cerr << "borelsum: checkpoint " << path << " belongs to another run; starting from Phi_0 = t\n";
        ck.reset();
      }
    }
    goursat::GridField f = goursat::solve_fixed_point(p_, d, c_.solve, ck ? &ck->field : nullptr);
    if (!path.empty()) goursat::write_checkpoint(f, hash, path);
    return fields_.emplace(key, goursat::PsiField(std::move(f))).first->second;
  }

 private:
  std::string checkpoint_path(const goursat::GoursatDomain& d) const {
    if (g_.checkpoint.empty() || d.sign != 1) return "";
    if (!per_lambda_T(c_)) return g_.checkpoint;
    char buf[48];
    std::snprintf(buf, sizeof buf, ".T%g", d.T);
    return g_.checkpoint + buf;
  }

  const config::RunConfig& c_;
  const Potential& p_;
  const Globals& g_;
  std::map<std::pair<double, int>, goursat::PsiField> fields_;
};

json diagnostics_json(const goursat::GridField& f) {
  const auto& d = f.diagnostics;
  json j;
  j["iterations"] = d.iterations;
  j["contraction_ratios"] = d.contraction_ratios;
  j["final_increment"] = d.final_increment;
  j["fixed_point_residual"] = d.fixed_point_residual;
  j["nu"] = f.norm_nu;
  j["nu_escalations"] = d.nu_escalations;
  j["truncation_bound"] = d.truncation_bound;
  return j;
}

summation::SolutionPair make_pair(FieldStore& store, const config::RunConfig& c, const Potential& p, double lam,
                                  const std::vector<double>& xs, bool independent_minus, json& info) {
  goursat::GoursatDomain d = domain_for(c, lam);
  const auto& plus = store.get(d);
  info["plus"] = diagnostics_json(plus.field());
  if (independent_minus || !p.real_on_axis()) {
    d.sign = -1;
    const auto& minus = store.get(d);
    info["minus"] = diagnostics_json(minus.field());
    return summation::build_solution_pair(plus, &minus, lam, xs);
  }
  return summation::build_solution_pair(plus, nullptr, lam, xs);
}

int cmd_solve(const config::RunConfig& c, const Globals& g) {
  const Potential p = config::make_potential(c.potential);
  FieldStore store(c, p, g);
  const auto xs = x_samples(c);
  json runs = json::array();
  for (double lam : c.lambdas) {
    json info;
    info["lambda"] = lam;
    const auto pair = make_pair(store, c, p, lam, xs, g.verify_conjugacy, info);
    const json h = header(c, "solve", grid_json(domain_for(c, lam), std::nullopt));
    std::ostringstream csv;
    csv << csv_header(h);
    pair.write_csv(csv);
    write_text(g, "solution_lambda" + lambda_tag(lam) + ".csv", csv.str());
    info["tail_bound"] = pair.tail_bound;
    info["quad_error"] = pair.quad_error;
    info["wronskian_drift"] = pair.wronskian_drift();
    info["minus_from_conjugation"] = pair.conjugated;
    if (!pair.conjugated) info["conjugacy_residual"] = pair.conjugacy_residual();
    runs.push_back(info);
  }
  json out;
  out["header"] = header(c, "solve", grid_json(domain_for(c, c.lambdas.front()), c.solve.nu));
  out["potential"] = p.description();
  out["runs"] = runs;
  write_json_file(g, "solve_summary.json", out);
  std::cout << "solve: " << c.lambdas.size() << " lambda value(s) written to " << g.out_dir << "\n";
  return 0;
}

std::optional<potentials::PendulumSpec> pendulum_spec(const config::PotentialConfig& pc) {
  if (pc.kind == "pendulum_sin") return potentials::pendulum_sin(pc.a, pc.b);
  if (pc.kind == "pendulum_exp") return potentials::pendulum_exp(pc.rate);
  return std::nullopt;
}

int cmd_invariant(const config::RunConfig& c0, const Globals& g) {
  config::RunConfig c = c0;
  const auto pend = pendulum_spec(c.potential);
  if (pend) {
    c.lambdas.clear();
    for (double e : c.pendulum_eps) c.lambdas.push_back(1.0 / e);
  }
  const Potential p = config::make_potential(c.potential);
  FieldStore store(c, p, g);
  const auto xs = x_samples(c);
  oracle::IntegrateOptions io;
  io.tol = c.oracle_tol;
  json runs = json::array();
  std::vector<double> log_eps, log_diff;
  bool within = true;
  for (double lam : c.lambdas) {
    json info;
    info["lambda"] = lam;
    const auto pair = make_pair(store, c, p, lam, xs, g.verify_conjugacy, info);
    cplx psi0 = c.psi0_for(lam), dpsi0 = c.dpsi0;
    std::optional<invariants::PendulumState> st;
    if (pend) {
      st = invariants::pendulum_state(*pend, 1.0 / lam, c.pendulum_x, c.pendulum_xdot);
      psi0 = st->psi;
      dpsi0 = st->dpsi;
    }
    const auto tr = oracle::integrate(p, lam, psi0, dpsi0, xs, io);
    auto rep = invariants::compute_C(pair, tr.psi, tr.dpsi);
    if (st) {
      const double diff = std::abs(rep.C_median / (lam * lam) - st->leading);
      rep.leading_comparison = invariants::LeadingComparison{st->leading, diff};
      log_eps.push_back(std::log(1.0 / lam));
      log_diff.push_back(std::log(std::max(diff, 1e-300)));
    }
    within = within && rep.drift <= c.drift_tol;
    json r;
    r["header"] = header(c, "invariant", grid_json(domain_for(c, lam), std::nullopt));
    r["lambda"] = lam;
    r["psi0"] = complex_json(psi0);
    r["dpsi0"] = complex_json(dpsi0);
    r["C_median"] = complex_json(rep.C_median);
    r["drift"] = rep.drift;
    r["wronskian_drift"] = rep.wronskian_drift;
    r["within_tolerance"] = rep.drift <= c.drift_tol;
    if (rep.leading_comparison) {
      r["leading_comparison"] = {{"eps2_C", rep.C_median.real() / (lam * lam)},
                                 {"c_leading", rep.leading_comparison->c_leading},
                                 {"abs_diff", rep.leading_comparison->abs_diff}};
    }
    json per = json::array();
    for (std::size_t m = 0; m < rep.x.size(); ++m) {
      per.push_back({{"x", rep.x[m]}, {"C1", complex_json(rep.C1[m])}, {"C2", complex_json(rep.C2[m])},
                     {"C", complex_json(rep.C[m])}});
    }
    r["per_x"] = per;
    r["solver"] = info;
    write_json_file(g, "invariant_lambda" + lambda_tag(lam) + ".json", r);
    runs.push_back({{"lambda", lam}, {"C_median", complex_json(rep.C_median)}, {"drift", rep.drift},
                    {"wronskian_drift", rep.wronskian_drift}});
  }
  json out;
  out["header"] = header(c, "invariant", grid_json(domain_for(c, c.lambdas.front()), c.solve.nu));
  out["potential"] = p.description();
  out["drift_tolerance"] = c.drift_tol;
  out["all_within_tolerance"] = within;
  out["runs"] = runs;
  if (log_eps.size() >= 2) {
    const auto lf = num::fit_line(log_eps, log_diff);
    out["leading_comparison_slope"] = lf.slope;
  }
  write_json_file(g, "invariant_summary.json", out);
  std::cout << "invariant: " << c.lambdas.size() << " report(s), drift " << (within ? "within" : "ABOVE")
            << " tolerance\n";
  return 0;
}

json branch_grid_json(const singularity::BranchGrid& b, int m) {
  return {{"tau", b.tau}, {"S", b.S}, {"n_v", b.n_v}, {"n_w", b.n_w}, {"quad_order", b.quad_order}, {"grading", m}};
}

int cmd_singularity(const config::RunConfig& c, const Globals& g) {
  const auto spec = config::make_branch_spec(c);
  const auto f = singularity::solve_branch_fixed_point(spec, c.branch);
  json out;
  out["header"] = header(c, "singularity", branch_grid_json(c.branch, f.grading()));
  out["beta"] = c.beta;
  out["v1"] = c.v1;
  out["v0"] = c.v1_scale;
  out["kernel"] = c.kernel == singularity::KernelConvention::Half ? "half" : "eqh";
  out["s"] = c.s_fixed;
  out["t_window"] = {c.t_lo, c.t_hi};
  out["iterations"] = f.diagnostics.iterations;
  out["fixed_point_residual"] = f.diagnostics.fixed_point_residual;
  double dev = 0.0;
  for (std::size_t i = 0; i < c.branch.n_v; ++i)
    for (std::size_t j = 0; j < c.branch.n_w; ++j)
      dev = std::max(dev, std::abs(f.samples()[i * c.branch.n_w + j] - f.node(i, j).second));
  out["max_abs_phi_minus_t"] = dev;
  int rc = 0;
  try {
    const auto fit = singularity::fit_singularity_exponent(f, c.s_fixed, c.t_lo, c.t_hi);
    if (fit.singular) {
      out["fitted_exponent"] = fit.exponent;
    } else {
      out["fitted_exponent"] = nullptr;
    }
    out["fit_residual"] = fit.residual;
    out["singular"] = fit.singular;
    out["status"] = fit.status;
    if (fit.singular) out["expected_exponent"] = 3.0 - c.beta;
    std::ostringstream csv;
    csv << csv_header(out["header"]);
    fit.write_csv(csv);
    write_text(g, "singularity_remainder.csv", csv.str());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FitUnstable) throw;
    out["fitted_exponent"] = nullptr;
    out["status"] = e.what();
    rc = kExitNumerical;
  }
  if (std::abs(c.v1_scale) > 0.0) {
    out["remainder_order"] = singularity::remainder_order(f, c.s_fixed, c.t_lo, c.t_hi).slope;
    if (c.beta > 0.0) out["witness_rate"] = singularity::nonanalyticity_witness(f, c.s_fixed).rate;
  }
  write_json_file(g, "singularity.json", out);
  std::cout << "singularity: " << out["status"].get<std::string>() << "\n";
  return rc;
}

int cmd_series(const config::RunConfig& c, const Globals& g) {
  const Potential p = config::make_potential(c.potential).leading_order();
  const auto s = formal::wkb_coefficients(p, 1, c.series_k_max);
  json out;
  out["header"] = header(c, "series", json{{"lo", s.grid().lo}, {"hi", s.grid().hi}, {"points", s.grid().points}});
  out["potential"] = p.description();
  out["x"] = c.series_x;
  out["recursion_residual"] = s.recursion_residual();
  json coeffs = json::array();
  for (int k = 1; k <= s.k_max(); ++k) {
    coeffs.push_back({{"k", k}, {"a_k", complex_json(s.coefficient(k, c.series_x))}});
  }
  out["coefficients"] = coeffs;
  if (s.k_max() >= 3) {
    const auto gf = formal::gevrey_fit(s, c.series_x);
    out["gevrey"] = {{"A", gf.A}, {"rho", gf.rho}, {"rms_residual", gf.rms_residual}};
  }
  try {
    const std::size_t count = static_cast<std::size_t>(std::min(s.k_max(), 8)) + 1;
    const auto tay = goursat::borel_taylor(p, c.series_x, count);
    json cmp = json::array();
    double fac = 1.0;
    for (int k = 1; k < static_cast<int>(count); ++k) {
      if (k > 1) fac *= k - 1;
      const cplx ex = s.coefficient(k, c.series_x) / fac;
      const cplx got = static_cast<double>(k) * tay[static_cast<std::size_t>(k)];
      cmp.push_back({{"k", k}, {"pde", complex_json(got)}, {"rel_err", std::abs(got - ex) / std::abs(ex)}});
    }
    out["borel_taylor_check"] = cmp;
  } catch (const Error& e) {
    out["borel_taylor_check"] = e.what();
  }
  std::ostringstream csv;
  csv << csv_header(out["header"]);
  s.write_csv(csv);
  write_text(g, "series.csv", csv.str());
  write_json_file(g, "series.json", out);
  std::cout << "series: " << s.k_max() << " coefficients, recursion residual " << s.recursion_residual() << "\n";
  return 0;
}

int cmd_verify(const config::RunConfig& c, const Globals& g) {
  acceptance::Options o;
  o.tolerance_scale = c.tolerance_scale;
  o.only = c.criteria;
  o.on_result = [](const acceptance::CriterionResult& r) { std::cout << acceptance::format_line(r) << std::endl; };
  const auto results = acceptance::run(o);
  std::ostringstream js;
  acceptance::write_json(results, js);
  json out;
  out["header"] = header(c, "verify", grid_json(goursat::GoursatDomain{}, std::nullopt));
  out["tolerance_scale"] = c.tolerance_scale;
  out["results"] = json::parse(js.str());
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
  out["failed"] = failed;
  write_json_file(g, "verify.json", out);
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Borel summation of WKB series and exact adiabatic invariants"};
  app.set_version_flag("--version", std::string(kVersion));
  Globals g;
  bool print_defaults = false;
  app.add_option("--config", g.config_path, "Key-value configuration file");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0: hardware concurrency)");
  app.add_option("--checkpoint", g.checkpoint, "GridField checkpoint to resume from and update");
  app.add_flag("--verify-conjugacy", g.verify_conjugacy, "Solve the minus branch independently and report conj residual");
  app.add_flag("--print-defaults", print_defaults, "Print every configuration key with its default and exit");

  auto* solve = app.add_subcommand("solve", "Solve the Borel-plane PDE and write the Borel-summed solution pair");
  auto* invariant = app.add_subcommand("invariant", "Compute the exact invariant C along oracle solutions");
  auto* sing = app.add_subcommand("singularity", "Branch-point potential: fixed point and exponent fit");
  auto* series = app.add_subcommand("series", "Formal WKB coefficients and their Borel-plane check");
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");

  std::optional<double> beta, s_fixed, x_opt, tol_scale;
  std::optional<std::string> v1;
  std::vector<double> t_window;
  std::optional<int> k_max;
  std::vector<int> criteria;
  sing->add_option("--beta", beta, "Branch exponent");
  sing->add_option("--v1", v1, "V1 catalog id (one, exp, cos)");
  sing->add_option("--s", s_fixed, "Fixed s for the fit");
  sing->add_option("--t-window", t_window, "Fit window: t_lo t_hi")->expected(2);
  series->add_option("--x", x_opt, "Evaluation point");
  series->add_option("--k-max", k_max, "Number of coefficients");
  verify->add_option("--tolerance-scale", tol_scale, "Multiply every tolerance");
  verify->add_option("--criteria", criteria, "Criterion numbers to run");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (print_defaults) {
    std::cout << config::defaults_text();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitConfig;
  }

  config::RunConfig c;
  try {
    config::KeyValue kv = g.config_path.empty() ? config::KeyValue{} : config::KeyValue::load(g.config_path);
    auto set = [&kv](const std::string& k, const std::string& v) { kv.set(k, v); };
    char buf[64];
    auto num = [&buf](double d) {
      std::snprintf(buf, sizeof buf, "%.17g", d);
      return std::string(buf);
    };
    if (beta) set("singularity.beta", num(*beta));
    if (v1) set("singularity.v1", *v1);
    if (s_fixed) set("singularity.s", num(*s_fixed));
    if (t_window.size() == 2) {
      set("singularity.t_lo", num(t_window[0]));
      set("singularity.t_hi", num(t_window[1]));
    }
    if (x_opt) set("series.x", num(*x_opt));
    if (k_max) set("series.k_max", std::to_string(*k_max));
    if (tol_scale) set("verify.tolerance_scale", num(*tol_scale));
    if (!criteria.empty()) {
      std::string s;
      for (int k : criteria) s += std::to_string(k) + " ";
      set("verify.criteria", s);
    }
    c = config::from_key_values(kv);
  } catch (const Error& e) {
    std::cerr << "borelsum: " << e.what() << "\n";
    return kExitConfig;
  }
  if (g.threads > 0) num::set_threads(g.threads);

  try {
    if (solve->parsed()) return cmd_solve(c, g);
    if (invariant->parsed()) return cmd_invariant(c, g);
    if (sing->parsed()) return cmd_singularity(c, g);
    if (series->parsed()) return cmd_series(c, g);
    if (verify->parsed()) return cmd_verify(c, g);
  } catch (const Error& e) {
    std::cerr << "borelsum: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "borelsum: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
