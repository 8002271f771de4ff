#include "borelsum/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "borelsum/error.hpp"

namespace borelsum::singularity {

namespace {

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

void BranchSpec::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "BranchSpec: beta must lie in [0, 1)");
  }
  if (!V1) throw Error(ErrorCode::InvalidArgument, "BranchSpec: V1 is not set");
  if (std::abs(V1(0.0) - v0) > 1e-12 * (1.0 + std::abs(v0))) {
    throw Error(ErrorCode::InvalidArgument, "BranchSpec: v0 differs from V1(0)");
  }
}

cplx BranchSpec::kernel(double u) const {
  if (convention == KernelConvention::Half) {
    const cplx z = kI * (u / 2.0);
    return std::pow(z, -beta) * V1(z);
  }
  return V1(kI * u) * std::pow(u, -beta);
}

cplx BranchSpec::v0_effective() const {
  if (convention == KernelConvention::Half) return v0 * std::pow(kI / 2.0, -beta);
  return v0;
}

int BranchSpec::grading() const {
  if (near(beta, 0.5)) return 2;
  if (near(beta, 0.25) || near(beta, 0.75)) return 4;
  return 1;
}

BranchSpec branch_spec(double beta, const std::string& v1, cplx scale, KernelConvention convention) {
  BranchSpec s;
  s.beta = beta;
  s.v0 = scale;
  s.v1_label = v1;
  s.convention = convention;
  if (v1 == "one") {
    s.V1 = [scale](cplx) { return scale; };
  } else if (v1 == "exp") {
    s.V1 = [scale](cplx x) { return scale * std::exp(x); };
  } else if (v1 == "cos") {
    s.V1 = [scale](cplx x) { return scale * std::cos(x); };
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown V1 catalog id: " + v1);
  }
  s.validate();
  return s;
}

BranchField::BranchField(BranchSpec spec, BranchGrid grid)
    : spec_(std::move(spec)),
      grid_(grid),
      m_(grid.grading > 0 ? grid.grading : spec_.grading()),
      ax_v_(grid.n_v, 0.0, 1.0),
      ax_w_(grid.n_w, 0.0, 1.0),
      v_(grid.n_v * grid.n_w, cplx{}) {
  if (!(grid.tau > 0.0 && grid.S > grid.tau)) {
    throw Error(ErrorCode::InvalidArgument, "BranchGrid: need 0 < tau < S");
  }
  if (grid.S >= 1.0 / (2.0 * grid.tau)) {
    throw Error(ErrorCode::InvalidArgument, "BranchGrid: S must stay below 1/(2 tau)");
  }
  if (grid.n_v < 3 || grid.n_w < 3 || grid.quad_order < 2) {
    throw Error(ErrorCode::InvalidArgument, "BranchGrid: too few nodes");
  }
}

std::pair<double, double> BranchField::node(std::size_t i, std::size_t j) const {
  const double t = grid_.tau * std::pow(ax_w_[j], m_);
  const double s = t + (grid_.S - t) * std::pow(ax_v_[i], m_);
  return {s, t};
}

cplx BranchField::eval(double s, double t) const {
  const double tau = grid_.tau, S = grid_.S;
  if (t < -1e-14 * tau || t > tau * (1.0 + 1e-12) || s > S * (1.0 + 1e-12)) {
    throw Error(ErrorCode::DomainEscape, "BranchField::eval: outside the sampled box");
  }
  if (s < t - 1e-14 * S) throw Error(ErrorCode::BranchCut, "BranchField::eval: s < t crosses the cut");
  t = std::clamp(t, 0.0, tau);
  const double w = std::pow(t / tau, 1.0 / m_);
  const double v = std::clamp(std::pow(std::max(s - t, 0.0) / (S - t), 1.0 / m_), 0.0, 1.0);
  const auto wv = ax_v_.weights(v);
  const auto ww = ax_w_.weights(w);
  cplx acc = 0.0;
  const std::size_t nw = grid_.n_w;
  for (std::size_t i = 0; i < grid_.n_v; ++i) {
    if (wv[i] == 0.0) continue;
    cplx row = 0.0;
    for (std::size_t j = 0; j < nw; ++j) row += ww[j] * v_[i * nw + j];
    acc += wv[i] * row;
  }
  return acc;
}

BranchOperator::BranchOperator(const BranchSpec& spec, const BranchGrid& grid) : proto_(spec, grid) {
  spec.validate();
  const std::size_t nv = grid.n_v, nw = grid.n_w, N = nv * nw;
  const int m = proto_.m_;
  const double S = grid.S;
  const auto gl = num::gauss_legendre(grid.quad_order);
  const std::size_t nq = gl.nodes.size();
  M_.assign(N * N, cplx{});
  points_ = 2 * nq * nq;
  num::parallel_for(nv, [&](std::size_t i) {
    std::vector<double> wv(nv), ww(nw);
    for (std::size_t j = 0; j < nw; ++j) {
      const auto [s, t] = proto_.node(i, j);
      const double u = s - t;
      if (u <= 0.0 || t <= 0.0) continue;
      cplx* row = &M_[(i * nw + j) * N];
      const double wj = proto_.ax_w_[j];
      // Duffy split of the (p, q) square at the corner s1 = t1 = t; rho = r^m.
      // Along sigma the kernel behaves like (c + sigma)^-beta; sigma + c = c (1 + 1/c)^x.
      for (int tri = 0; tri < 2; ++tri) {
        const double c = tri == 0 ? u / (t * m) : t * m / u;
        const double L = std::log1p(1.0 / c);
        for (std::size_t a = 0; a < nq; ++a) {
          const double r = gl.nodes[a];
          const double rho = std::pow(r, m);
          const double jr = rho * m * std::pow(r, m - 1) * gl.weights[a];
          for (std::size_t b = 0; b < nq; ++b) {
            const double grow = c * std::exp(L * gl.nodes[b]);
            const double sig = std::min(grow - c, 1.0);
            const double js = grow * L;
            const double p = tri == 0 ? rho : rho * sig;
            const double q = tri == 0 ? rho * sig : rho;
            const double om = 1.0 - q;
            const double one_minus = -std::expm1(m * std::log1p(-q));
            const double t1 = t * std::pow(om, m);
            const double u1 = u * p + t * one_minus;
            const cplx wgt = 0.25 * u * t * m * std::pow(om, m - 1) * jr * js * gl.weights[b] * spec.kernel(u1);
            const double v1 = std::clamp(std::pow(u1 / (S - t1), 1.0 / m), 0.0, 1.0);
            proto_.ax_v_.weights(v1, wv);
            proto_.ax_w_.weights(wj * om, ww);
            for (std::size_t k = 0; k < nv; ++k) {
              if (wv[k] == 0.0) continue;
              const cplx cw = wgt * wv[k];
              cplx* dst = row + k * nw;
              for (std::size_t l = 0; l < nw; ++l) dst[l] += cw * ww[l];
            }
          }
        }
      }
    }
  });
}

BranchField BranchOperator::apply(const BranchField& f) const {
  BranchField out = proto_;
  const std::size_t N = out.size();
  const std::size_t nw = out.grid_.n_w;
  num::parallel_for(out.grid_.n_v, [&](std::size_t i) {
    for (std::size_t j = 0; j < nw; ++j) {
      const std::size_t n = i * nw + j;
      const cplx* row = &M_[n * N];
      cplx acc = out.node(i, j).second;
      for (std::size_t c = 0; c < N; ++c) acc += row[c] * f.v_[c];
      out.v_[n] = acc;
    }
  });
  return out;
}

namespace {

BranchField initial(const BranchSpec& spec, const BranchGrid& grid) {
  BranchField f(spec, grid);
  for (std::size_t i = 0; i < grid.n_v; ++i)
    for (std::size_t j = 0; j < grid.n_w; ++j) f.samples()[i * grid.n_w + j] = f.node(i, j).second;
  return f;
}

double sup_norm(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

BranchField solve_branch_fixed_point(const BranchSpec& spec, const BranchGrid& grid, double tol, int max_iter) {
  const BranchOperator J(spec, grid);
  BranchField phi = initial(spec, grid);
  const double scale = sup_norm(phi.samples());
  goursat::SolveDiagnostics diag;
  double prev = -1.0;
  for (int n = 1;; ++n) {
    if (n > max_iter) throw Error(ErrorCode::MaxIterExceeded, "solve_branch_fixed_point: no convergence");
    BranchField next = J.apply(phi);
    std::vector<cplx> d(next.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = next.samples()[k] - phi.samples()[k];
    const double inc = sup_norm(d);
    if (!std::isfinite(inc)) throw Error(ErrorCode::NoContraction, "solve_branch_fixed_point: iterates diverged");
    if (prev > 0.0) {
      const double ratio = inc / prev;
      diag.contraction_ratios.push_back(ratio);
      const auto& cr = diag.contraction_ratios;
      if (n > 3 && cr.size() >= 2 && cr[cr.size() - 1] >= 1.0 && cr[cr.size() - 2] >= 1.0) {
        throw Error(ErrorCode::NoContraction, "solve_branch_fixed_point: contraction ratios >= 1");
      }
    }
    prev = inc;
    phi = std::move(next);
    ++diag.iterations;
    diag.final_increment = inc / scale;
    if (inc <= tol * scale) break;
  }
  const BranchField check = J.apply(phi);
  double res = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) res = std::max(res, std::abs(check.samples()[k] - phi.samples()[k]));
  diag.fixed_point_residual = res / scale;
  diag.converged = true;
  phi.diagnostics = diag;
  return phi;
}

BranchField first_iterate(const BranchSpec& spec, const BranchGrid& grid) {
  BranchField f = BranchOperator(spec, grid).apply(initial(spec, grid));
  f.diagnostics.iterations = 1;
  return f;
}

cplx leading_analytic_part(const BranchSpec& spec, cplx s, cplx t) {
  const double b = spec.beta;
  const double D3 = (1.0 - b) * (2.0 - b) * (3.0 - b);
  const double D2 = (1.0 - b) * (3.0 - b);
  const cplx sm = std::pow(s - t, 2.0 - b);
  return t + spec.v0_effective() / 4.0 * (s * (std::pow(s, 2.0 - b) - sm) / D3 - sm * t / D2);
}

cplx leading_expansion(const BranchSpec& spec, cplx s, cplx t) {
  const double b = spec.beta;
  const double D3 = (1.0 - b) * (2.0 - b) * (3.0 - b);
  const cplx tail = t == cplx{} ? cplx{} : std::pow(t, 3.0 - b);
  return leading_analytic_part(spec, s, t) - spec.v0_effective() / 4.0 * tail / D3;
}

namespace {

std::vector<double> geometric(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 4) throw Error(ErrorCode::InvalidArgument, "fit window needs 0 < lo < hi and >= 4 samples");
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  return t;
}

struct LinearFit {
  Eigen::VectorXcd coef;
  double residual;
};

// weighted complex least squares R ~ sum_c coef_c t^{p_c}
LinearFit project(const std::vector<double>& t, const Eigen::VectorXcd& R, const std::vector<double>& powers) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXcd A(n, static_cast<Eigen::Index>(powers.size()));
  Eigen::VectorXcd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = 1.0 / std::abs(R(k));
    for (std::size_t c = 0; c < powers.size(); ++c) A(k, static_cast<Eigen::Index>(c)) = w * std::pow(t[k], powers[c]);
    y(k) = w * R(k);
  }
  LinearFit f;
  f.coef = A.colPivHouseholderQr().solve(y);
  f.residual = (A * f.coef - y).norm() / y.norm();
  return f;
}

}  // namespace

ExponentFit fit_singularity_exponent(const BranchField& f, double s_fixed, double t_lo, double t_hi,
                                     std::size_t samples) {
  if (!(t_hi < s_fixed)) throw Error(ErrorCode::InvalidArgument, "fit window must lie below s");
  ExponentFit out;
  out.t = geometric(t_lo, t_hi, samples);
  Eigen::VectorXcd R(static_cast<Eigen::Index>(samples));
  for (std::size_t k = 0; k < samples; ++k) {
    const cplx r = f.eval(s_fixed, out.t[k]) - leading_analytic_part(f.spec(), s_fixed, out.t[k]);
    R(static_cast<Eigen::Index>(k)) = r;
    out.remainder.push_back(std::abs(r));
  }
  if (R.cwiseAbs().minCoeff() <= 1e-300) {
    out.exponent = std::numeric_limits<double>::infinity();
    out.status = "no singularity detected (remainder vanishes)";
    return out;
  }
  const auto poly = project(out.t, R, {2.0, 3.0, 4.0, 5.0});
  if (poly.residual < 1e-6) {
    out.exponent = 3.0;
    out.amplitude = poly.coef(0);
    out.residual = poly.residual;
    out.status = "no singularity detected (polynomial model fits)";
    return out;
  }
  auto basis = [](double p) { return std::vector<double>{p, 2.0, 3.0, p + 1.0}; };
  auto objective = [&](double p) { return project(out.t, R, basis(p)).residual; };
  const auto [p, res] = boost::math::tools::brent_find_minima(objective, 1.5, 2.98, 40);
  const auto best = project(out.t, R, basis(p));
  out.exponent = p;
  out.amplitude = best.coef(0);
  out.residual = res;
  if (res > 1e-3) {
    throw Error(ErrorCode::FitUnstable, "fit_singularity_exponent: residual " + std::to_string(res) +
                                            " exceeds 1e-3 for both models");
  }
  out.singular = true;
  out.status = "singular";
  return out;
}

void ExponentFit::write_json(std::ostream& os) const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "\"fitted_exponent\": %.12g, \"fit_residual\": %.6g, \"amplitude\": [%.12g, %.12g], "
                "\"singular\": %s, \"status\": \"%s\"",
                exponent, residual, amplitude.real(), amplitude.imag(), singular ? "true" : "false",
                status.c_str());
  os << buf;
}

void ExponentFit::write_csv(std::ostream& os) const {
  os << "t,abs_remainder\n";
  char buf[96];
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t[k], remainder[k]);
    os << buf;
  }
}

SlopeFit remainder_order(const BranchField& f, double s_fixed, double t_lo, double t_hi, std::size_t samples) {
  const auto t = geometric(t_lo, t_hi, samples);
  std::vector<double> lx, ly;
  for (double tk : t) {
    const double r = std::abs(f.eval(s_fixed, tk) - leading_expansion(f.spec(), s_fixed, tk));
    lx.push_back(std::log(tk));
    ly.push_back(std::log(std::max(r, 1e-300)));
  }
  const auto lf = num::fit_line(lx, ly);
  return {lf.slope, lf.intercept, lf.rms_residual};
}

Witness nonanalyticity_witness(const BranchField& f, double s_fixed, double t_lo, double t_hi, std::size_t samples) {
  Witness w;
  w.t = geometric(t_lo, t_hi, samples);
  std::vector<double> lx, ly;
  auto g = [&](double t) { return f.eval(s_fixed, t) - leading_analytic_part(f.spec(), s_fixed, t); };
  for (double t : w.t) {
    const double h = t / 4.0;
    const cplx d3 = (g(t + 1.5 * h) - 3.0 * g(t + 0.5 * h) + 3.0 * g(t - 0.5 * h) - g(t - 1.5 * h)) / (h * h * h);
    w.third_derivative.push_back(std::abs(d3));
    lx.push_back(std::log(t));
    ly.push_back(std::log(std::max(std::abs(d3), 1e-300)));
  }
  w.rate = num::fit_line(lx, ly).slope;
  return w;
}

}  // namespace borelsum::singularity
