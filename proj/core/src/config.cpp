#include "borelsum/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "borelsum/error.hpp"

namespace borelsum::config {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::logic_error&) {
  }
  fail(key + ": not a number: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, tok));
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d)) fail(key + ": expected a non-negative integer");
  return static_cast<std::size_t>(d);
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) fail(key + ": expected an integer");
  return static_cast<int>(d);
}

cplx to_complex(const std::string& key, const std::string& v) {
  const auto l = to_list(key, v);
  if (l.size() == 1) return {l[0], 0.0};
  if (l.size() == 2) return {l[0], l[1]};
  fail(key + ": expected 're' or 're im'");
}

std::string fmt(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

std::optional<double> to_opt(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

struct Binding {
  std::string key;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

constexpr int kMaxEpsTerms = 4;

std::pair<std::vector<double>, std::vector<double>>& eps_term(RunConfig& c, int k) {
  auto& t = c.potential.eps_terms;
  while (static_cast<int>(t.size()) < k) t.push_back({{0.0}, c.potential.denominator});
  return t[static_cast<std::size_t>(k - 1)];
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = [] {
    std::vector<Binding> b;
    auto num = [&b](std::string key, std::string help, double RunConfig::*m) {
      b.push_back({key, help, [m, key](RunConfig& c, const std::string& v) { c.*m = to_double(key, v); },
                   [m](const RunConfig& c) { return fmt(c.*m); }});
    };
    auto pnum = [&b](std::string key, std::string help, double PotentialConfig::*m) {
      b.push_back({key, help, [m, key](RunConfig& c, const std::string& v) { c.potential.*m = to_double(key, v); },
                   [m](const RunConfig& c) { return fmt(c.potential.*m); }});
    };
    auto popt = [&b](std::string key, std::string help, std::optional<double> PotentialConfig::*m) {
      b.push_back({key, help, [m, key](RunConfig& c, const std::string& v) { c.potential.*m = to_opt(key, v); },
                   [m](const RunConfig& c) { return fmt_opt(c.potential.*m); }});
    };
    auto gsize = [&b](std::string key, std::string help, std::size_t goursat::GoursatDomain::*m) {
      b.push_back({key, help, [m, key](RunConfig& c, const std::string& v) { c.grid.*m = to_size(key, v); },
                   [m](const RunConfig& c) { return std::to_string(c.grid.*m); }});
    };
    auto bsize = [&b](std::string key, std::string help, std::size_t singularity::BranchGrid::*m) {
      b.push_back({key, help, [m, key](RunConfig& c, const std::string& v) { c.branch.*m = to_size(key, v); },
                   [m](const RunConfig& c) { return std::to_string(c.branch.*m); }});
    };
    auto bnum = [&b](std::string key, std::string help, double singularity::BranchGrid::*m) {
      b.push_back({key, help, [m, key](RunConfig& c, const std::string& v) { c.branch.*m = to_double(key, v); },
                   [m](const RunConfig& c) { return fmt(c.branch.*m); }});
    };

    b.push_back({"potential.kind", "zero | constant | rational | pendulum_sin | pendulum_exp | mathieu",
                 [](RunConfig& c, const std::string& v) { c.potential.kind = v; },
                 [](const RunConfig& c) { return c.potential.kind; }});
    b.push_back({"potential.numerator", "rational: numerator coefficients, ascending powers",
                 [](RunConfig& c, const std::string& v) { c.potential.numerator = to_list("potential.numerator", v); },
                 [](const RunConfig& c) { return fmt_list(c.potential.numerator); }});
    b.push_back({"potential.denominator", "rational: denominator coefficients, ascending powers",
                 [](RunConfig& c, const std::string& v) { c.potential.denominator = to_list("potential.denominator", v); },
                 [](const RunConfig& c) { return fmt_list(c.potential.denominator); }});
    for (int k = 1; k <= kMaxEpsTerms; ++k) {
      const std::string base = "potential.eps" + std::to_string(k);
      b.push_back({base + ".numerator", k == 1 ? "rational: eps^k term numerator (k = 1.." + std::to_string(kMaxEpsTerms) + ")" : "",
                   [k, base](RunConfig& c, const std::string& v) { eps_term(c, k).first = to_list(base + ".numerator", v); },
                   [k](const RunConfig& c) {
                     const auto& t = c.potential.eps_terms;
                     return static_cast<int>(t.size()) >= k ? fmt_list(t[static_cast<std::size_t>(k - 1)].first) : "";
                   }});
      b.push_back({base + ".denominator", "",
                   [k, base](RunConfig& c, const std::string& v) { eps_term(c, k).second = to_list(base + ".denominator", v); },
                   [k](const RunConfig& c) {
                     const auto& t = c.potential.eps_terms;
                     return static_cast<int>(t.size()) >= k ? fmt_list(t[static_cast<std::size_t>(k - 1)].second) : "";
                   }});
    }
    pnum("potential.c", "constant: value", &PotentialConfig::c);
    pnum("potential.a", "pendulum_sin: omega = a + b sin u; mathieu: a", &PotentialConfig::a);
    pnum("potential.b", "pendulum_sin / mathieu: b", &PotentialConfig::b);
    pnum("potential.rate", "pendulum_exp: omega = exp(rate u)", &PotentialConfig::rate);
    pnum("potential.alpha", "mathieu: alpha", &PotentialConfig::alpha);
    pnum("potential.sigma_lo", "mathieu: working interval", &PotentialConfig::sigma_lo);
    pnum("potential.sigma_hi", "", &PotentialConfig::sigma_hi);
    popt("potential.strip_halfwidth", "metadata overrides (auto keeps the computed value)",
         &PotentialConfig::strip_halfwidth);
    popt("potential.decay_K", "", &PotentialConfig::decay_K);
    popt("potential.decay_delta", "", &PotentialConfig::decay_delta);
    popt("potential.eps_B", "", &PotentialConfig::eps_B);

    b.push_back({"lambda", "list of lambda = 1/eps values",
                 [](RunConfig& c, const std::string& v) { c.lambdas = to_list("lambda", v); },
                 [](const RunConfig& c) { return fmt_list(c.lambdas); }});
    num("x.min", "real x samples for solution and invariant reports", &RunConfig::x_min);
    num("x.max", "", &RunConfig::x_max);
    b.push_back({"x.points", "", [](RunConfig& c, const std::string& v) { c.x_points = to_size("x.points", v); },
                 [](const RunConfig& c) { return std::to_string(c.x_points); }});

    b.push_back({"grid.xi_max", "Goursat box half-width in Re x",
                 [](RunConfig& c, const std::string& v) { c.grid.xi_max = to_double("grid.xi_max", v); },
                 [](const RunConfig& c) { return fmt(c.grid.xi_max); }});
    b.push_back({"grid.T", "Borel truncation; auto = 3 + 40 / min(lambda)",
                 [](RunConfig& c, const std::string& v) {
                   c.auto_T = v == "auto";
                   if (!c.auto_T) c.grid.T = to_double("grid.T", v);
                 },
                 [](const RunConfig& c) { return c.auto_T ? std::string("auto") : fmt(c.grid.T); }});
    gsize("grid.n_xi", "Chebyshev node counts (n_xi odd)", &goursat::GoursatDomain::n_xi);
    gsize("grid.n_zeta", "", &goursat::GoursatDomain::n_zeta);
    gsize("grid.n_t", "", &goursat::GoursatDomain::n_t);
    gsize("grid.quad_order", "Gauss-Legendre order per unit-square axis", &goursat::GoursatDomain::quad_order);
    b.push_back({"grid.interp", "chebyshev | local-cubic",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "chebyshev") c.grid.interp = num::InterpKind::Chebyshev;
                   else if (v == "local-cubic") c.grid.interp = num::InterpKind::LocalCubic;
                   else fail("grid.interp: expected chebyshev or local-cubic");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.grid.interp == num::InterpKind::Chebyshev ? "chebyshev" : "local-cubic");
                 }});
    b.push_back({"grid.nu", "weighted-norm exponent; auto = 4 ln(10) / T",
                 [](RunConfig& c, const std::string& v) { c.solve.nu = to_opt("grid.nu", v); },
                 [](const RunConfig& c) { return fmt_opt(c.solve.nu); }});
    b.push_back({"solve.tol", "Picard stopping tolerance (relative, nu-norm)",
                 [](RunConfig& c, const std::string& v) { c.solve.tol = to_double("solve.tol", v); },
                 [](const RunConfig& c) { return fmt(c.solve.tol); }});
    b.push_back({"solve.max_iter", "",
                 [](RunConfig& c, const std::string& v) { c.solve.max_iter = to_int("solve.max_iter", v); },
                 [](const RunConfig& c) { return std::to_string(c.solve.max_iter); }});
    b.push_back({"solve.k_eps", "eps truncation order (0: V_0 only)",
                 [](RunConfig& c, const std::string& v) { c.solve.k_eps = to_int("solve.k_eps", v); },
                 [](const RunConfig& c) { return std::to_string(c.solve.k_eps); }});
    num("oracle.tol", "ODE integrator tolerance", &RunConfig::oracle_tol);
    b.push_back({"state.psi0", "psi(0) as 're im'; -1 means 1/lambda",
                 [](RunConfig& c, const std::string& v) { c.psi0 = to_complex("state.psi0", v); },
                 [](const RunConfig& c) { return fmt(c.psi0.real()) + " " + fmt(c.psi0.imag()); }});
    b.push_back({"state.dpsi0", "psi'(0) as 're im'",
                 [](RunConfig& c, const std::string& v) { c.dpsi0 = to_complex("state.dpsi0", v); },
                 [](const RunConfig& c) { return fmt(c.dpsi0.real()) + " " + fmt(c.dpsi0.imag()); }});
    num("invariant.drift_tol", "allowed relative drift of C", &RunConfig::drift_tol);
    num("pendulum.x", "pendulum state x(0)", &RunConfig::pendulum_x);
    num("pendulum.xdot", "pendulum state dx/du(0)", &RunConfig::pendulum_xdot);
    b.push_back({"pendulum.eps", "eps values for the leading-order comparison",
                 [](RunConfig& c, const std::string& v) { c.pendulum_eps = to_list("pendulum.eps", v); },
                 [](const RunConfig& c) { return fmt_list(c.pendulum_eps); }});

    num("singularity.beta", "branch exponent, 0 <= beta < 1 (0: analytic control)", &RunConfig::beta);
    b.push_back({"singularity.v1", "one | exp | cos",
                 [](RunConfig& c, const std::string& v) { c.v1 = v; }, [](const RunConfig& c) { return c.v1; }});
    num("singularity.v0", "scale of V1 (V1(0))", &RunConfig::v1_scale);
    b.push_back({"singularity.kernel", "half: V(i(s-t)/2) | eqh: V1(i(s-t))/(s-t)^beta",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "half") c.kernel = singularity::KernelConvention::Half;
                   else if (v == "eqh") c.kernel = singularity::KernelConvention::EqH;
                   else fail("singularity.kernel: expected half or eqh");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.kernel == singularity::KernelConvention::Half ? "half" : "eqh");
                 }});
    num("singularity.s", "fixed s for the exponent fit", &RunConfig::s_fixed);
    num("singularity.t_lo", "fit window in t", &RunConfig::t_lo);
    num("singularity.t_hi", "", &RunConfig::t_hi);
    bnum("singularity.tau", "box 0 <= t <= tau, t <= s <= S", &singularity::BranchGrid::tau);
    bnum("singularity.S", "", &singularity::BranchGrid::S);
    bsize("singularity.n_v", "graded Chebyshev node counts", &singularity::BranchGrid::n_v);
    bsize("singularity.n_w", "", &singularity::BranchGrid::n_w);
    bsize("singularity.quad_order", "", &singularity::BranchGrid::quad_order);

    num("series.x", "x for the formal coefficient report", &RunConfig::series_x);
    b.push_back({"series.k_max", "",
                 [](RunConfig& c, const std::string& v) { c.series_k_max = to_int("series.k_max", v); },
                 [](const RunConfig& c) { return std::to_string(c.series_k_max); }});

    num("verify.tolerance_scale", "multiplies every acceptance tolerance", &RunConfig::tolerance_scale);
    b.push_back({"verify.criteria", "criterion numbers to run; all = 1..11",
                 [](RunConfig& c, const std::string& v) {
                   c.criteria.clear();
                   if (v == "all") return;
                   for (double d : to_list("verify.criteria", v)) c.criteria.push_back(static_cast<int>(d));
                 },
                 [](const RunConfig& c) {
                   if (c.criteria.empty()) return std::string("all");
                   std::string s;
                   for (std::size_t i = 0; i < c.criteria.size(); ++i) s += (i ? " " : "") + std::to_string(c.criteria[i]);
                   return s;
                 }});
    return b;
  }();
  return table;
}

KeyValue load_file(const std::string& path, int depth);

void read_lines(std::istream& is, const std::string& source, std::map<std::string, std::string>& kv) {
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(source + ":" + std::to_string(n) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(source + ":" + std::to_string(n) + ": empty key");
    if (kv.count(key)) fail(source + ":" + std::to_string(n) + ": duplicate key " + key);
    kv[key] = value;
  }
}

KeyValue load_file(const std::string& path, int depth) {
  if (depth > 4) fail("potential.file nesting too deep at " + path);
  std::ifstream is(path);
  if (!is) fail("cannot open configuration file: " + path);
  KeyValue out = KeyValue::parse(is, path);
  if (out.has("potential.file")) {
    auto ref = std::filesystem::path(out.raw("potential.file"));
    if (ref.is_relative()) ref = std::filesystem::path(path).parent_path() / ref;
    const KeyValue inc = load_file(ref.string(), depth + 1);
    for (const auto& [k, v] : inc.entries()) {
      if (k.rfind("potential.", 0) != 0) fail(ref.string() + ": only potential.* keys allowed, found " + k);
      if (!out.has(k)) out.set(k, v);
    }
  }
  return out;
}

}  // namespace

KeyValue KeyValue::parse(std::istream& is, const std::string& source) {
  KeyValue out;
  read_lines(is, source, out.kv_);
  return out;
}

KeyValue KeyValue::load(const std::string& path) { return load_file(path, 0); }

const std::string& KeyValue::raw(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) fail("missing key " + key);
  return it->second;
}

RunConfig from_key_values(const KeyValue& kv) {
  RunConfig c;
  std::map<std::string, const Binding*> index;
  for (const auto& b : bindings()) index[b.key] = &b;
  for (const auto& [k, v] : kv.entries()) {
    if (k == "potential.file") continue;
    auto it = index.find(k);
    if (it == index.end()) fail("unknown configuration key: " + k);
    it->second->set(c, v);
  }
  c.validate();
  return c;
}

RunConfig load(const std::string& path) { return from_key_values(KeyValue::load(path)); }

std::string defaults_text() {
  const RunConfig c;
  std::string out = "# borelsum configuration defaults\n";
  for (const auto& b : bindings()) {
    const std::string v = b.get(c);
    if (!b.help.empty()) out += "# " + b.help + "\n";
    if (v.empty()) {
      out += "# " + b.key + " =\n";
    } else {
      out += b.key + " = " + v + "\n";
    }
  }
  return out;
}

std::string canonical(const RunConfig& c) {
  std::string out;
  for (const auto& b : bindings()) out += b.key + "=" + b.get(c) + "\n";
  return out;
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Potential make_potential(const PotentialConfig& p) {
  auto build = [&]() -> Potential {
    if (p.kind == "zero") return potentials::zero();
    if (p.kind == "constant") return potentials::constant(p.c);
    if (p.kind == "rational") {
      if (p.eps_terms.empty()) return potentials::rational(p.numerator, p.denominator);
      std::vector<std::pair<std::vector<double>, std::vector<double>>> orders{{p.numerator, p.denominator}};
      for (const auto& t : p.eps_terms) orders.push_back(t);
      return potentials::rational_series(orders, p.eps_B.value_or(1.0));
    }
    if (p.kind == "pendulum_sin") return potentials::pendulum_to_standard(potentials::pendulum_sin(p.a, p.b));
    if (p.kind == "pendulum_exp") return potentials::pendulum_to_standard(potentials::pendulum_exp(p.rate));
    if (p.kind == "mathieu") {
      const auto sp = potentials::mathieu_to_standard({p.a, p.b, p.alpha}, p.sigma_lo, p.sigma_hi);
      potentials::LiouvilleInput in;
      in.q = sp.q;
      in.r = sp.r;
      in.sigma_lo = p.sigma_lo;
      in.sigma_hi = p.sigma_hi;
      return potentials::liouville_normalize(in).potential;
    }
    fail("potential.kind: unknown kind '" + p.kind + "'");
  };
  Potential pot = build();
  auto m = pot.meta();
  if (p.strip_halfwidth) m.strip_halfwidth = *p.strip_halfwidth;
  if (p.decay_K) m.decay_K = *p.decay_K;
  if (p.decay_delta) m.decay_delta = *p.decay_delta;
  if (p.eps_B && p.eps_terms.empty()) m.eps_B = *p.eps_B;
  return pot.with_metadata(m);
}

singularity::BranchSpec make_branch_spec(const RunConfig& c) {
  return singularity::branch_spec(c.beta, c.v1, c.v1_scale, c.kernel);
}

goursat::GoursatDomain RunConfig::domain_for(double lambda_min) const {
  goursat::GoursatDomain d = grid;
  if (auto_T) d.T = goursat::GoursatDomain::default_T(lambda_min);
  return d;
}

void RunConfig::validate() const {
  if (lambdas.empty()) fail("lambda: at least one value required");
  for (double l : lambdas)
    if (!(l > 0.0)) fail("lambda: values must be positive");
  if (!(x_min < x_max)) fail("x.min must be below x.max");
  if (x_points < 2) fail("x.points >= 2 required");
  if (!(solve.tol > 0.0) || solve.max_iter < 1) fail("solve.tol > 0 and solve.max_iter >= 1 required");
  if (!(oracle_tol > 0.0)) fail("oracle.tol must be positive");
  if (!(drift_tol > 0.0)) fail("invariant.drift_tol must be positive");
  if (!(tolerance_scale > 0.0)) fail("verify.tolerance_scale must be positive");
  for (int k : criteria)
    if (k < 1 || k > 11) fail("verify.criteria: criteria are numbered 1..11");
  for (double e : pendulum_eps)
    if (!(e > 0.0)) fail("pendulum.eps: values must be positive");
  if (series_k_max < 1 || series_k_max > 40) fail("series.k_max must lie in 1..40");
  if (!(t_lo > 0.0 && t_lo < t_hi && t_hi <= branch.tau && t_hi < s_fixed && s_fixed <= branch.S)) {
    fail("singularity: need 0 < t_lo < t_hi <= tau, t_hi < s <= S");
  }
  try {
    const Potential p = make_potential(potential);
    if (solve.k_eps > p.eps_order()) fail("solve.k_eps exceeds the potential's eps order");
    const auto d = domain_for(*std::min_element(lambdas.begin(), lambdas.end()));
    d.validate(p);
    if (x_min < -d.xi_max || x_max > d.xi_max) fail("x range must lie inside [-grid.xi_max, grid.xi_max]");
    if (std::abs(series_x) >= p.strip_halfwidth()) fail("series.x outside the potential strip");
    make_branch_spec(*this);
    singularity::BranchField probe(make_branch_spec(*this), branch);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace borelsum::config
