#include "borelsum/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "borelsum/error.hpp"
#include "borelsum/formal.hpp"
#include "borelsum/goursat.hpp"
#include "borelsum/invariants.hpp"
#include "borelsum/oracle.hpp"
#include "borelsum/potentials.hpp"
#include "borelsum/singularity.hpp"
#include "borelsum/summation.hpp"

namespace borelsum::acceptance {

namespace {

using goursat::GoursatDomain;
using goursat::PsiField;

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> x_grid(double half, int per_side) {
  std::vector<double> xs;
  for (int m = -per_side; m <= per_side; ++m) xs.push_back(half * m / per_side);
  return xs;
}

PsiField solve(const Potential& p, const GoursatDomain& d, int k_eps = 0) {
  goursat::SolveOptions o;
  o.k_eps = k_eps;
  return PsiField(goursat::solve_fixed_point(p, d, o));
}

double reconstruction_error(const Potential& V, const PsiField& P, double lambda, const std::vector<double>& xs) {
  const auto pair = summation::build_solution_pair(P, nullptr, lambda, xs);
  const auto amp = invariants::decompose(pair, 1.0 / lambda, kI);
  const auto rec = invariants::reconstruct(pair, amp);
  const auto tr = oracle::integrate(V, lambda, 1.0 / lambda, kI, xs);
  double e = 0.0;
  for (std::size_t m = 0; m < xs.size(); ++m) e = std::max(e, std::abs(rec.psi[m] - tr.psi[m]) / std::abs(tr.psi[m]));
  return e;
}

CriterionResult borel_exactness(const Options& o) {
  CriterionResult r;
  const Potential V = potentials::inverse_quadratic();
  const GoursatDomain d;
  const auto xs = x_grid(0.8, 16);
  const PsiField coarse = solve(V, d);
  const PsiField fine = solve(V, d.refined(2.0));
  double worst = 0.0, worst_gain = 1e300;
  for (double lam : {10.0, 15.0, 20.0}) {
    const double e0 = reconstruction_error(V, coarse, lam, xs);
    const double e1 = reconstruction_error(V, fine, lam, xs);
    worst = std::max(worst, e0);
    worst_gain = std::min(worst_gain, e0 / std::max(e1, 1e-300));
  }
  const double tol = 1e-5 * o.tolerance_scale;
  r.passed = worst <= tol && worst_gain >= 4.0;
  r.measured = fmt("max rel err %.2e, refinement gain %.1fx", worst, worst_gain);
  r.threshold = fmt("<= %.1e, >= 4x", tol);
  return r;
}

CriterionResult constant_closed_form(const Options& o) {
  CriterionResult r;
  const double c = 1.0, lam = 10.0;
  const PsiField P = solve(potentials::constant(c), GoursatDomain{});
  const auto xs = x_grid(0.5, 10);
  const auto pair = summation::build_solution_pair(P, nullptr, lam, xs);
  double worst = 0.0;
  for (std::size_t m = 0; m < xs.size(); ++m) {
    const cplx ex = oracle::constant_V_exact(c, lam, xs[m]);
    worst = std::max(worst, std::abs(pair.phi_plus[m] - ex) / std::abs(ex));
  }
  const double tol = 1e-6 * o.tolerance_scale;
  r.passed = worst <= tol;
  r.measured = fmt("max rel err %.2e", worst);
  r.threshold = fmt("<= %.1e", tol);
  return r;
}

CriterionResult exact_invariance(const Options& o) {
  CriterionResult r;
  const Potential V = potentials::inverse_quadratic();
  const PsiField P = solve(V, GoursatDomain{});
  const auto xs = x_grid(0.8, 16);
  double drift = 0.0, wdrift = 0.0;
  for (double lam : {10.0, 15.0, 20.0}) {
    const auto pair = summation::build_solution_pair(P, nullptr, lam, xs);
    const auto tr = oracle::integrate(V, lam, 1.0 / lam, kI, xs);
    const auto rep = invariants::compute_C(pair, tr.psi, tr.dpsi);
    drift = std::max(drift, rep.drift);
    wdrift = std::max(wdrift, rep.wronskian_drift);
  }
  const double t1 = 1e-6 * o.tolerance_scale, t2 = 1e-8 * o.tolerance_scale;
  r.passed = drift <= t1 && wdrift <= t2;
  r.measured = fmt("C drift %.2e, Wronskian drift %.2e", drift, wdrift);
  r.threshold = fmt("<= %.1e, <= %.1e", t1, t2);
  return r;
}

CriterionResult series_consistency(const Options& o) {
  CriterionResult r;
  const Potential V = potentials::inverse_quadratic();
  const auto s = formal::wkb_coefficients(V, 1, 8);
  double worst = 0.0;
  for (double x : {0.3, 0.5, 0.8}) {
    const auto c = goursat::borel_taylor(V, x, 8);
    double fac = 1.0;
    for (int k = 1; k <= 6; ++k) {
      if (k > 1) fac *= k - 1;
      const cplx ex = s.coefficient(k, x) / fac;
      worst = std::max(worst, std::abs(static_cast<double>(k) * c[static_cast<std::size_t>(k)] - ex) / std::abs(ex));
    }
  }
  // a_2 / a_1 against -(i/2) int_0^x V by Gauss-Legendre quadrature
  const auto gl = num::gauss_legendre(40);
  double ratio_err = 0.0;
  for (double x : {-0.8, -0.3, 0.3, 0.5, 0.8}) {
    cplx integral = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) integral += gl.weights[q] * x * V.eval(gl.nodes[q] * x);
    const cplx ex = -0.5 * kI * integral;
    const cplx got = s.coefficient(2, x) / s.coefficient(1, x);
    ratio_err = std::max(ratio_err, std::abs(got - ex) / std::abs(ex));
  }
  const double t1 = 1e-4 * o.tolerance_scale, t2 = 1e-8 * o.tolerance_scale;
  r.passed = worst <= t1 && ratio_err <= t2;
  r.measured = fmt("Taylor rel err %.2e, a2/a1 rel err %.2e", worst, ratio_err);
  r.threshold = fmt("<= %.1e, <= %.1e", t1, t2);
  return r;
}

CriterionResult asymptoticity(const Options& o) {
  CriterionResult r;
  const Potential V = potentials::inverse_quadratic();
  const std::vector<double> lams{20.0, 40.0, 80.0, 160.0};
  GoursatDomain d;
  d.T = GoursatDomain::default_T(lams.front());
  const PsiField P = solve(V, d);
  const auto s = formal::wkb_coefficients(V, 1, 8);
  const double x = 0.5;
  std::vector<double> lx, ly;
  double Kmax = 0.0;
  for (double lam : lams) {
    const cplx phi = summation::laplace_quadrature(P, x, lam).value;
    const double diff = std::abs(phi - s.partial_sum(x, lam, 4));
    lx.push_back(std::log(lam));
    ly.push_back(std::log(diff));
    Kmax = std::max(Kmax, diff * std::pow(lam, 5));
  }
  const double slope = num::fit_line(lx, ly).slope;
  const double band = 0.15 * o.tolerance_scale;
  r.passed = std::abs(slope + 5.0) <= band && std::isfinite(Kmax);
  r.measured = fmt("slope %.3f, K = %.3g", slope, Kmax);
  r.threshold = fmt("-5 +- %.2f", band);
  return r;
}

CriterionResult conjugacy(const Options& o) {
  CriterionResult r;
  const Potential V = potentials::inverse_quadratic();
  GoursatDomain dp, dm;
  dm.sign = -1;
  const PsiField plus = solve(V, dp);
  const PsiField minus = solve(V, dm);
  const auto xs = x_grid(0.8, 16);
  double conj = 0.0, det_margin = 1e300;
  for (double lam : {10.0, 15.0, 20.0}) {
    const auto pair = summation::build_solution_pair(plus, &minus, lam, xs);
    conj = std::max(conj, pair.conjugacy_residual());
    for (std::size_t m = 0; m < xs.size(); ++m) det_margin = std::min(det_margin, std::abs(pair.determinant(m)) * 2.0 * lam);
  }
  const double tol = 1e-10 * o.tolerance_scale;
  r.passed = conj <= tol && det_margin >= 1.0;
  r.measured = fmt("max|phi- - conj phi+| %.2e, min |D| 2 lambda %.3f", conj, det_margin);
  r.threshold = fmt("<= %.1e, >= 1", tol);
  return r;
}

CriterionResult convolution_field(const Options& o) {
  CriterionResult r;
  using summation::BorelFunction;
  const double T = 12.0;
  const std::size_t n = 64;
  const auto F = BorelFunction::from_function(T, n, [](double t) { return std::exp(-t) * std::cos(t); });
  const auto G = BorelFunction::from_function(T, n, [](double t) { return 1.0 / (1.0 + t); });
  const auto H = BorelFunction::from_function(T, n, [](double t) { return cplx{t * std::exp(-t / 2.0), 0.3}; });
  using summation::convolve;
  const auto FG = convolve(F, G);
  double law = FG.sup_distance(convolve(G, F));
  law = std::max(law, convolve(FG, H).sup_distance(convolve(F, convolve(G, H))));
  law = std::max(law, convolve(F, G + H).sup_distance(FG + convolve(F, H)));

  const auto inv = summation::borel_inverse(F);
  const double cert = summation::inverse_certificate(F, inv.G, {10.0, 30.0, 100.0});

  const double c = 0.7;
  const auto Fc = BorelFunction::from_function(T, n, [c](double) { return cplx{c, 0.0}; });
  const auto Gc = summation::borel_inverse(Fc).G;
  double closed = 0.0;
  for (std::size_t k = 0; k < Gc.size(); ++k) closed = std::max(closed, std::abs(Gc.values()[k] - std::exp(-c * Gc.nodes()[k])));

  const double t1 = 1e-10 * o.tolerance_scale, t2 = 1e-8 * o.tolerance_scale;
  r.passed = law <= t1 && cert <= t2 && closed <= t1;
  r.measured = fmt("laws %.2e, certificate %.2e, exp(-ct) %.2e", law, cert, closed);
  r.threshold = fmt("<= %.1e, <= %.1e, <= %.1e", t1, t2, t1);
  return r;
}

CriterionResult contraction_scaling(const Options&) {
  CriterionResult r;
  double worst = 0.0;
  for (const auto& V : {potentials::inverse_quadratic(), potentials::pendulum_to_standard(potentials::pendulum_sin(2.0, 1.0))}) {
    const GoursatDomain d;
    const goursat::JOperator J(d, V);
    const auto base = goursat::make_field(d, [](cplx, double t) { return cplx{t, 0.0}; });
    const double nu = 4.0 * std::log(10.0) / d.T;
    const double r1 = goursat::lipschitz_ratio(J, base, nu, 7);
    const double r2 = goursat::lipschitz_ratio(J, base, 2.0 * nu, 7);
    worst = std::max(worst, r2 / r1);
  }
  r.passed = worst <= 0.75;
  r.measured = fmt("ratio(2 nu)/ratio(nu) %.3f (worst of 2 potentials)", worst);
  r.threshold = "<= 0.75";
  return r;
}

CriterionResult eps_extension(const Options& o) {
  CriterionResult r;
  const Potential V = potentials::rational_series({{{1.0}, {-4.0, 0.0, 1.0}}, {{1.0}, {-4.0, 0.0, 1.0}}}, 1.0);
  const PsiField P = solve(V, GoursatDomain{}, 1);
  const double e = reconstruction_error(V, P, 20.0, x_grid(0.8, 16));
  const double tol = 1e-5 * o.tolerance_scale;
  r.passed = e <= tol;
  r.measured = fmt("max rel err %.2e", e);
  r.threshold = fmt("<= %.1e", tol);
  return r;
}

CriterionResult singularity_exponent(const Options& o) {
  CriterionResult r;
  double worst = 0.0, min_order = 1e300;
  for (double beta : {0.5, 0.25}) {
    const auto spec = singularity::branch_spec(beta, "one");
    const auto f = singularity::solve_branch_fixed_point(spec);
    const auto fit = singularity::fit_singularity_exponent(f, 1.0);
    worst = std::max(worst, std::abs(fit.exponent - (3.0 - beta)));
    min_order = std::min(min_order, singularity::remainder_order(f, 1.0).slope);
  }
  const auto control = singularity::fit_singularity_exponent(
      singularity::solve_branch_fixed_point(singularity::branch_spec(0.0, "one")), 1.0);
  const double tol = 1e-2 * o.tolerance_scale;
  r.passed = worst <= tol && min_order >= 2.9 && !control.singular;
  r.measured = fmt("max |p - (3 - beta)| %.2e, remainder order %.3f, control ", worst, min_order) +
               (control.singular ? "singular" : "analytic");
  r.threshold = fmt("<= %.1e, >= 2.9, analytic", tol);
  return r;
}

CriterionResult pendulum_leading(const Options& o) {
  CriterionResult r;
  const auto spec = potentials::pendulum_sin(2.0, 1.0);
  const Potential V = potentials::pendulum_to_standard(spec);
  const auto xs = x_grid(0.8, 16);
  std::vector<double> le, lg;
  for (double lam : {20.0, 40.0, 80.0}) {
    GoursatDomain d;
    d.T = GoursatDomain::default_T(lam);
    const PsiField P = solve(V, d);
    const auto pair = summation::build_solution_pair(P, nullptr, lam, xs);
    const auto st = invariants::pendulum_state(spec, 1.0 / lam, 1.0, 1.0);
    const auto tr = oracle::integrate(V, lam, st.psi, st.dpsi, xs);
    const auto rep = invariants::compute_C(pair, tr.psi, tr.dpsi);
    le.push_back(std::log(1.0 / lam));
    lg.push_back(std::log(std::abs(rep.C_median / (lam * lam) - st.leading)));
  }
  const double slope = num::fit_line(le, lg).slope;
  const double band = 0.2 * o.tolerance_scale;
  r.passed = std::abs(slope - 1.0) <= band;
  r.measured = fmt("slope %.3f", slope);
  r.threshold = fmt("1 +- %.2f", band);
  return r;
}

using Runner = CriterionResult (*)(const Options&);

struct Entry {
  const char* name;
  Runner run;
};

const Entry kTable[kCriteria] = {
    {"Borel sum exactness", borel_exactness},
    {"constant-potential closed form", constant_closed_form},
    {"exact invariance", exact_invariance},
    {"series/PDE consistency", series_consistency},
    {"asymptoticity", asymptoticity},
    {"conjugacy and independence", conjugacy},
    {"convolution field", convolution_field},
    {"contraction scaling", contraction_scaling},
    {"eps-dependent extension", eps_extension},
    {"singularity exponent", singularity_exponent},
    {"pendulum leading order", pendulum_leading},
};

}  // namespace

const std::string& criterion_name(int id) {
  static std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kTable) v.emplace_back(e.name);
    return v;
  }();
  if (id < 1 || id > kCriteria) throw Error(ErrorCode::InvalidArgument, "criterion id out of range");
  return names[static_cast<std::size_t>(id - 1)];
}

CriterionResult run_criterion(int id, const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = kTable[static_cast<std::size_t>(id - 1)].run(opt);
  } catch (const std::exception& e) {
    r.passed = false;
    r.measured = std::string("error: ") + e.what();
  }
  r.id = id;
  r.name = criterion_name(id);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run(const Options& opt) {
  std::vector<int> ids = opt.only;
  if (ids.empty())
    for (int k = 1; k <= kCriteria; ++k) ids.push_back(k);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, opt));
    if (opt.on_result) opt.on_result(out.back());
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s %2d  %-32s %s | %s  (%.1f s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.measured.c_str(), r.threshold.c_str(), r.seconds);
  return buf;
}

void write_json(const std::vector<CriterionResult>& results, std::ostream& os) {
  auto esc = [](const std::string& s) {
    std::string o;
    for (char ch : s) {
      if (ch == '"' || ch == '\\') o += '\\';
      o += ch;
    }
    return o;
  };
  os << "[\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    char sec[32];
    std::snprintf(sec, sizeof sec, "%.3f", r.seconds);
    os << "  {\"id\": " << r.id << ", \"name\": \"" << esc(r.name) << "\", \"passed\": " << (r.passed ? "true" : "false")
       << ", \"measured\": \"" << esc(r.measured) << "\", \"threshold\": \"" << esc(r.threshold)
       << "\", \"seconds\": " << sec << "}" << (i + 1 < results.size() ? "," : "") << "\n";
  }
  os << "]\n";
}

}  // namespace borelsum::acceptance
