#include "borelsum/goursat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "borelsum/error.hpp"

namespace borelsum::goursat {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

}  // namespace

void GoursatDomain::validate(const Potential& p) const {
  require(xi_max > 0.0 && xi_max < 1.0, "GoursatDomain: xi_max must lie in (0, 1)");
  require(T > 0.0, "GoursatDomain: T must be positive");
  require(n_xi >= 3 && n_xi % 2 == 1, "GoursatDomain: n_xi must be odd and >= 3");
  require(n_zeta >= 2, "GoursatDomain: n_zeta >= 2 required");
  require(n_t >= 3, "GoursatDomain: n_t >= 3 required");
  require(quad_order >= 1, "GoursatDomain: quad_order >= 1 required");
  require(sign == 1 || sign == -1, "GoursatDomain: sign must be +-1");
  require(std::isfinite(ray_angle), "GoursatDomain: ray_angle must be finite");
  if (interp == num::InterpKind::LocalCubic) {
    require(n_xi >= 4 && n_zeta >= 4 && n_t >= 4, "GoursatDomain: LocalCubic needs >= 4 nodes per axis");
  }
  if (xi_max + std::abs(std::sin(ray_angle)) * T / 2.0 >= p.strip_halfwidth()) {
    throw Error(ErrorCode::StripViolation, "GoursatDomain: box exceeds the potential strip");
  }
}

GoursatDomain GoursatDomain::refined(double factor) const {
  GoursatDomain d = *this;
  auto scale = [factor](std::size_t n) {
    return static_cast<std::size_t>(std::lround(static_cast<double>(n) * factor));
  };
  d.n_xi = scale(n_xi - 1) + 1;
  if (d.n_xi % 2 == 0) ++d.n_xi;
  d.n_zeta = std::max<std::size_t>(2, scale(n_zeta));
  d.n_t = std::max<std::size_t>(3, scale(n_t));
  d.quad_order = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(quad_order) * std::sqrt(factor))));
  return d;
}

GridField::GridField(GoursatDomain d)
    : d_(d),
      ax_xi_(d.n_xi, -d.xi_max, d.xi_max, d.interp),
      ax_zeta_(d.n_zeta, 0.0, 1.0, d.interp),
      ax_t_(d.n_t, 0.0, d.T, d.interp),
      v_(d.n_xi * d.n_zeta * d.n_t, cplx{}) {}

cplx GridField::node_x(std::size_t i, std::size_t j, std::size_t k) const {
  return ax_xi_[i] + d_.shear() * (ax_zeta_[j] * (d_.T - ax_t_[k]) / 2.0);
}

std::string GridField::interpolation_label() const {
  return d_.interp == num::InterpKind::Chebyshev ? "chebyshev" : "local-cubic";
}

cplx GridField::eval(cplx x, double t) const {
  // x = xi + shear * eta with xi, eta real
  const cplx c = d_.shear();
  double eta = 0.0;
  double xi = x.real();
  if (x.imag() != 0.0) {
    if (std::abs(c.imag()) < 1e-12) throw Error(ErrorCode::DomainEscape, "GridField::eval: complex x on a real shear");
    eta = x.imag() / c.imag();
    xi = x.real() - c.real() * eta;
  }
  const double room = (d_.T - t) / 2.0;
  double zeta = 0.0;
  if (eta != 0.0) {
    if (room <= 0.0 || eta < -1e-12 * d_.T || eta > room * (1.0 + 1e-12)) {
      throw Error(ErrorCode::DomainEscape, "GridField::eval: Im x outside the sampled box");
    }
    zeta = clamp01(eta / room);
  }
  const auto wx = ax_xi_.weights(xi);
  const auto wz = ax_zeta_.weights(zeta);
  const auto wt = ax_t_.weights(t);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < d_.n_xi; ++i) {
    if (wx[i] == 0.0) continue;
    cplx ai = 0.0;
    for (std::size_t j = 0; j < d_.n_zeta; ++j) {
      if (wz[j] == 0.0) continue;
      cplx aj = 0.0;
      const cplx* row = &v_[index(i, j, 0)];
      for (std::size_t k = 0; k < d_.n_t; ++k) aj += wt[k] * row[k];
      ai += wz[j] * aj;
    }
    acc += wx[i] * ai;
  }
  return acc;
}

GridField make_field(const GoursatDomain& d, const std::function<cplx(cplx, double)>& f) {
  GridField g(d);
  for (std::size_t i = 0; i < d.n_xi; ++i)
    for (std::size_t j = 0; j < d.n_zeta; ++j)
      for (std::size_t k = 0; k < d.n_t; ++k) g.at(i, j, k) = f(g.node_x(i, j, k), g.t_axis()[k]);
  return g;
}

double weighted_norm(const GridField& f, double nu) {
  const auto& d = f.domain();
  double m = 0.0;
  for (std::size_t i = 0; i < d.n_xi; ++i)
    for (std::size_t j = 0; j < d.n_zeta; ++j)
      for (std::size_t k = 0; k < d.n_t; ++k) {
        m = std::max(m, std::abs(f.at(i, j, k)) * std::exp(-nu * f.t_axis()[k]));
      }
  return m;
}

JOperator::JOperator(const GoursatDomain& d, const Potential& p, int k_eps)
    : d_(d),
      k_eps_(k_eps),
      ax_xi_(d.n_xi, -d.xi_max, d.xi_max, d.interp),
      ax_zeta_(d.n_zeta, 0.0, 1.0, d.interp),
      ax_t_(d.n_t, 0.0, d.T, d.interp),
      gl_(num::gauss_legendre(d.quad_order)) {
  d.validate(p);
  if (k_eps < 0 || k_eps > p.eps_order()) {
    throw Error(ErrorCode::InvalidArgument, "JOperator: eps truncation order exceeds the potential's order");
  }
  const std::size_t nx = d.n_xi, nz = d.n_zeta, nt = d.n_t, nq = d.quad_order;
  const double T = d.T;
  const cplx shear = d.shear();

  w_xi_.resize(nx * nq * nx);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t a = 0; a < nq; ++a)
      ax_xi_.weights((1.0 - gl_.nodes[a]) * ax_xi_[i], std::span(&w_xi_[(i * nq + a) * nx], nx));

  w_t_.resize(nt * nq * nt);
  for (std::size_t k = 0; k < nt; ++k)
    for (std::size_t b = 0; b < nq; ++b)
      ax_t_.weights(gl_.nodes[b] * ax_t_[k], std::span(&w_t_[(k * nq + b) * nt], nt));

  w_zeta_.resize(nz * nt * nq * nq * nz);
  for (std::size_t j = 0; j < nz; ++j)
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = ax_t_[k];
      const double eta = ax_zeta_[j] * (T - t) / 2.0;
      for (std::size_t a = 0; a < nq; ++a)
        for (std::size_t b = 0; b < nq; ++b) {
          const double al = gl_.nodes[a];
          const double be = gl_.nodes[b];
          const double eta2 = (1.0 - al) * eta + (1.0 - be) * t / 2.0;
          const double z2 = clamp01(eta2 / ((T - be * t) / 2.0));
          ax_zeta_.weights(z2, std::span(&w_zeta_[(((j * nt + k) * nq + a) * nq + b) * nz], nz));
        }
    }

  const int orders = k_eps + 1;
  kernel_.assign(static_cast<std::size_t>(orders), std::vector<cplx>(nx * nz * nt * nq * nq));
  num::parallel_for(nx, [&](std::size_t i) {
    for (std::size_t j = 0; j < nz; ++j)
      for (std::size_t k = 0; k < nt; ++k) {
        const double r = ax_t_[k];
        const cplx x = ax_xi_[i] + shear * (ax_zeta_[j] * (T - r) / 2.0);
        const cplx pre = -(shear / 2.0) * x * r;
        for (std::size_t a = 0; a < nq; ++a)
          for (std::size_t b = 0; b < nq; ++b) {
            const std::size_t idx = (((i * nz + j) * nt + k) * nq + a) * nq + b;
            if (pre == cplx{}) continue;
            const cplx xp = (1.0 - gl_.nodes[a]) * x + shear * ((1.0 - gl_.nodes[b]) * r / 2.0);
            const double w = gl_.weights[a] * gl_.weights[b];
            for (int m = 0; m < orders; ++m) {
              kernel_[static_cast<std::size_t>(m)][idx] = pre * w * p.coefficient(static_cast<std::size_t>(m), xp);
            }
          }
      }
  });

  if (k_eps > 0) {
    gl_conv_ = num::gauss_legendre(std::max<std::size_t>(16, nt));
    const std::size_t ng = gl_conv_.nodes.size();
    wc_t_.resize(nt * ng * nt);
    wc_zeta_.resize(nz * nt * ng * nz);
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = ax_t_[k];
      for (std::size_t g = 0; g < ng; ++g) {
        const double tq = gl_conv_.nodes[g] * t;
        ax_t_.weights(tq, std::span(&wc_t_[(k * ng + g) * nt], nt));
        for (std::size_t j = 0; j < nz; ++j) {
          const double z2 = (T - tq) > 0.0 ? clamp01(ax_zeta_[j] * (T - t) / (T - tq)) : 0.0;
          ax_zeta_.weights(z2, std::span(&wc_zeta_[((j * nt + k) * ng + g) * nz], nz));
        }
      }
    }
  }
}

GridField JOperator::convolution_moment(const GridField& f, int order) const {
  // C(x, t) = int_0^t (t - q)^(order-1) / (order-1)! Psi(x, q) dq at fixed complex x
  const std::size_t nx = d_.n_xi, nz = d_.n_zeta, nt = d_.n_t;
  const std::size_t ng = gl_conv_.nodes.size();
  GridField out(d_);
  const double fact = std::tgamma(static_cast<double>(order));
  const cplx ray_pow = std::pow(d_.ray(), order);
  num::parallel_for(nx, [&](std::size_t i) {
    std::vector<cplx> M(nz * nt * ng);
    for (std::size_t q = 0; q < nz; ++q) {
      const cplx* row = &f.samples()[f.index(i, q, 0)];
      for (std::size_t k = 0; k < nt; ++k)
        for (std::size_t g = 0; g < ng; ++g) {
          const double* w = &wc_t_[(k * ng + g) * nt];
          cplx acc = 0.0;
          for (std::size_t r = 0; r < nt; ++r) acc += w[r] * row[r];
          M[(q * nt + k) * ng + g] = acc;
        }
    }
    for (std::size_t j = 0; j < nz; ++j)
      for (std::size_t k = 0; k < nt; ++k) {
        const double t = ax_t_[k];
        cplx acc = 0.0;
        for (std::size_t g = 0; g < ng; ++g) {
          const double* w = &wc_zeta_[((j * nt + k) * ng + g) * nz];
          cplx v = 0.0;
          for (std::size_t q = 0; q < nz; ++q) v += w[q] * M[(q * nt + k) * ng + g];
          const double lag = t * (1.0 - gl_conv_.nodes[g]);
          acc += gl_conv_.weights[g] * std::pow(lag, order - 1) / fact * v;
        }
        out.at(i, j, k) = ray_pow * t * acc;
      }
  });
  return out;
}

void JOperator::accumulate(const GridField& f, GridField& out) const {
  const std::size_t nx = d_.n_xi, nz = d_.n_zeta, nt = d_.n_t, nq = d_.quad_order;
  std::vector<const GridField*> sources{&f};
  std::vector<GridField> moments;
  moments.reserve(static_cast<std::size_t>(k_eps_));
  for (int m = 1; m <= k_eps_; ++m) moments.push_back(convolution_moment(f, m));
  for (const auto& g : moments) sources.push_back(&g);

  num::parallel_for(nx, [&](std::size_t i) {
    std::vector<cplx> G(nq * nz * nt);
    std::vector<cplx> H(nq * nt * nq * nz);
    for (std::size_t m = 0; m < sources.size(); ++m) {
      const auto& src = sources[m]->samples();
      const auto& K = kernel_[m];
      // G[a][q][r] = sum_p Wxi[i][a][p] F[p][q][r]
      std::fill(G.begin(), G.end(), cplx{});
      for (std::size_t a = 0; a < nq; ++a) {
        const double* w = &w_xi_[(i * nq + a) * nx];
        cplx* g = &G[a * nz * nt];
        for (std::size_t p = 0; p < nx; ++p) {
          if (w[p] == 0.0) continue;
          const cplx* s = &src[p * nz * nt];
          for (std::size_t qr = 0; qr < nz * nt; ++qr) g[qr] += w[p] * s[qr];
        }
      }
      // H[a][k][b][q] = sum_r Wt[k][b][r] G[a][q][r]
      for (std::size_t a = 0; a < nq; ++a)
        for (std::size_t k = 0; k < nt; ++k)
          for (std::size_t b = 0; b < nq; ++b) {
            const double* w = &w_t_[(k * nq + b) * nt];
            cplx* h = &H[((a * nt + k) * nq + b) * nz];
            for (std::size_t q = 0; q < nz; ++q) {
              const cplx* g = &G[(a * nz + q) * nt];
              cplx acc = 0.0;
              for (std::size_t r = 0; r < nt; ++r) acc += w[r] * g[r];
              h[q] = acc;
            }
          }
      for (std::size_t j = 0; j < nz; ++j)
        for (std::size_t k = 0; k < nt; ++k) {
          const cplx* kr = &K[((i * nz + j) * nt + k) * nq * nq];
          cplx acc = 0.0;
          for (std::size_t a = 0; a < nq; ++a)
            for (std::size_t b = 0; b < nq; ++b) {
              const cplx kk = kr[a * nq + b];
              if (kk == cplx{}) continue;
              const double* w = &w_zeta_[(((j * nt + k) * nq + a) * nq + b) * nz];
              const cplx* h = &H[((a * nt + k) * nq + b) * nz];
              cplx v = 0.0;
              for (std::size_t q = 0; q < nz; ++q) v += w[q] * h[q];
              acc += kk * v;
            }
          out.at(i, j, k) += acc;
        }
    }
  });
}

GridField JOperator::apply_linear(const GridField& f) const {
  GridField out(d_);
  accumulate(f, out);
  return out;
}

GridField JOperator::apply(const GridField& f) const {
  GridField out(d_);
  const cplx ray = d_.ray();
  for (std::size_t i = 0; i < d_.n_xi; ++i)
    for (std::size_t j = 0; j < d_.n_zeta; ++j)
      for (std::size_t k = 0; k < d_.n_t; ++k) out.at(i, j, k) = ray * ax_t_[k];
  accumulate(f, out);
  out.norm_nu = f.norm_nu;
  return out;
}

GridField apply_J(const GridField& f, const Potential& p) { return JOperator(f.domain(), p, 0).apply(f); }

GridField apply_J_eps(const GridField& f, const Potential& p, int k_max) {
  if (p.eps_order() < 1) throw Error(ErrorCode::InvalidArgument, "apply_J_eps: potential has no eps terms");
  return JOperator(f.domain(), p, k_max).apply(f);
}

namespace {

GridField difference(const GridField& a, const GridField& b) {
  GridField d(a.domain());
  for (std::size_t n = 0; n < d.samples().size(); ++n) d.samples()[n] = a.samples()[n] - b.samples()[n];
  return d;
}

double truncation_tail(double B, double nu, int k_max) {
  if (B <= 0.0) return 0.0;
  const double r = B / nu;
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (int k = k_max + 1; k < k_max + 400; ++k) {
    const double term = std::pow(static_cast<double>(k), 1.5) * std::pow(r, k);
    s += term;
    if (term < 1e-18 * s) break;
  }
  return s;
}

}  // namespace

GridField solve_fixed_point(const Potential& p, const GoursatDomain& d, const SolveOptions& opt,
                            const GridField* start) {
  if (opt.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "solve_fixed_point: max_iter >= 1 required");
  const JOperator J(d, p, opt.k_eps);
  const cplx ray = d.ray();
  const GridField phi0 = make_field(d, [ray](cplx, double r) { return ray * r; });
  GridField phi = phi0;
  if (start != nullptr) {
    const auto& sd = start->domain();
    if (sd.n_xi != d.n_xi || sd.n_zeta != d.n_zeta || sd.n_t != d.n_t || sd.T != d.T ||
        sd.xi_max != d.xi_max || sd.sign != d.sign || sd.ray_angle != d.ray_angle) {
      throw Error(ErrorCode::InvalidArgument, "solve_fixed_point: starting field has a different grid");
    }
    phi.samples() = start->samples();
  }
  double nu = opt.nu.value_or(4.0 * std::log(10.0) / d.T);
  SolveDiagnostics diag;
  if (start != nullptr) diag.iterations = start->diagnostics.iterations;
  double prev = -1.0;
  int above_one = 0;
  for (int n = 1;; ++n) {
    if (n > opt.max_iter) {
      throw Error(ErrorCode::MaxIterExceeded,
                  "solve_fixed_point: no convergence after " + std::to_string(opt.max_iter) + " iterations");
    }
    GridField next = J.apply(phi);
    const GridField delta = difference(next, phi);
    double inc = weighted_norm(delta, nu);
    if (!std::isfinite(inc)) throw Error(ErrorCode::NoContraction, "solve_fixed_point: iterates diverged");
    if (prev > 0.0) {
      const double ratio = inc / prev;
      diag.contraction_ratios.push_back(ratio);
      above_one = ratio >= 1.0 ? above_one + 1 : 0;
      if (n > 3 && above_one >= 2) {
        if (diag.nu_escalations >= opt.max_escalations) {
          throw Error(ErrorCode::NoContraction, "solve_fixed_point: ratios stay >= 1 after nu escalation");
        }
        nu *= 2.0;
        ++diag.nu_escalations;
        above_one = 0;
        inc = weighted_norm(delta, nu);
      }
    }
    prev = inc;
    phi = std::move(next);
    ++diag.iterations;
    const double scale = weighted_norm(phi0, nu);
    diag.final_increment = inc / scale;
    if (inc <= opt.tol * scale) break;
  }
  const GridField check = J.apply(phi);
  diag.fixed_point_residual = weighted_norm(difference(check, phi), nu) / weighted_norm(phi0, nu);
  diag.truncation_bound = opt.k_eps > 0 ? truncation_tail(p.meta().eps_B, nu, opt.k_eps) : 0.0;
  diag.converged = true;
  phi.norm_nu = nu;
  phi.diagnostics = diag;
  return phi;
}

GridField solve_fixed_point(const Potential& p, const GoursatDomain& d, double tol, int max_iter) {
  SolveOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return solve_fixed_point(p, d, opt);
}

double lipschitz_ratio(const JOperator& J, const GridField& base, double nu, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto& d = base.domain();
  const GridField jb = J.apply(base);
  double worst = 0.0;
  constexpr int deg = 3;
  for (int s = 0; s < samples; ++s) {
    // smooth perturbation: random combination of T_a(xi) T_b(zeta) T_c(t), a, b, c < deg
    std::vector<cplx> c(deg * deg * deg);
    for (auto& v : c) v = {u(rng), u(rng)};
    auto cheb = [](int n, double x) { return std::cos(n * std::acos(std::clamp(x, -1.0, 1.0))); };
    GridField delta(d);
    for (std::size_t i = 0; i < d.n_xi; ++i)
      for (std::size_t j = 0; j < d.n_zeta; ++j)
        for (std::size_t k = 0; k < d.n_t; ++k) {
          const double xh = base.xi_axis()[i] / d.xi_max;
          const double zh = 2.0 * base.zeta_axis()[j] - 1.0;
          const double th = 2.0 * base.t_axis()[k] / d.T - 1.0;
          cplx v = 0.0;
          for (int a = 0; a < deg; ++a)
            for (int b = 0; b < deg; ++b)
              for (int e = 0; e < deg; ++e) v += c[(a * deg + b) * deg + e] * cheb(a, xh) * cheb(b, zh) * cheb(e, th);
          delta.at(i, j, k) = v;
        }
    GridField pert = base;
    for (std::size_t n = 0; n < pert.samples().size(); ++n) pert.samples()[n] += delta.samples()[n];
    const double num = weighted_norm(difference(J.apply(pert), jb), nu);
    worst = std::max(worst, num / weighted_norm(delta, nu));
  }
  return worst;
}

PsiField::PsiField(GridField f)
    : field_(std::move(f)),
      ax_xi_(field_.xi_axis()),
      ax_t_(field_.t_axis()),
      nu_(field_.norm_nu),
      sign_(field_.domain().sign) {
  const std::size_t nx = ax_xi_.size(), nt = ax_t_.size();
  p_.resize(nx * nt);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t k = 0; k < nt; ++k) p_[i * nt + k] = field_.at(i, 0, k);
  const auto& Dx = ax_xi_.diff_matrix();
  const auto& Dt = ax_t_.diff_matrix();
  auto dx = [&](const std::vector<cplx>& s) {
    std::vector<cplx> r(nx * nt, cplx{});
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t m = 0; m < nx; ++m) {
        const double w = Dx[i * nx + m];
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < nt; ++k) r[i * nt + k] += w * s[m * nt + k];
      }
    return r;
  };
  auto dt = [&](const std::vector<cplx>& s) {
    std::vector<cplx> r(nx * nt, cplx{});
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t k = 0; k < nt; ++k) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < nt; ++m) acc += Dt[k * nt + m] * s[i * nt + m];
        r[i * nt + k] = acc;
      }
    return r;
  };
  px_ = dx(p_);
  pt_ = dt(p_);
  pxx_ = dx(px_);
  pxt_ = dt(px_);
  const cplx back = std::conj(field_.domain().ray());
  if (back != cplx{1.0, 0.0}) {
    for (auto& v : pt_) v *= back;
    for (auto& v : pxt_) v *= back;
  }
}

cplx PsiField::eval(const std::vector<cplx>& s, double x, double t) const {
  const std::size_t nx = ax_xi_.size(), nt = ax_t_.size();
  const auto wx = ax_xi_.weights(x);
  const auto wt = ax_t_.weights(t);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    if (wx[i] == 0.0) continue;
    cplx row = 0.0;
    for (std::size_t k = 0; k < nt; ++k) row += wt[k] * s[i * nt + k];
    acc += wx[i] * row;
  }
  return acc;
}

std::vector<cplx> PsiField::line(double x, Part part) const {
  const std::vector<cplx>& s = part == Part::Psi ? p_ : (part == Part::PsiX ? px_ : pt_);
  const std::size_t nx = ax_xi_.size(), nt = ax_t_.size();
  const auto wx = ax_xi_.weights(x);
  std::vector<cplx> out(nt, cplx{});
  for (std::size_t i = 0; i < nx; ++i) {
    if (wx[i] == 0.0) continue;
    for (std::size_t k = 0; k < nt; ++k) out[k] += wx[i] * s[i * nt + k];
  }
  return out;
}

double PsiField::pde_residual(const Potential& p) const {
  const std::size_t nx = ax_xi_.size(), nt = ax_t_.size();
  double rmax = 0.0;
  double smax = 0.0;
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t k = 1; k + 1 < nt; ++k) {
      const std::size_t n = i * nt + k;
      const cplx vp = p.eval(ax_xi_[i]) * p_[n];
      const cplx r = pxx_[n] + 2.0 * kI * static_cast<double>(sign_) * pxt_[n] - vp;
      rmax = std::max(rmax, std::abs(r));
      smax = std::max({smax, std::abs(vp), std::abs(pxx_[n])});
    }
  return smax > 0.0 ? rmax / smax : rmax;
}

PhiDerivatives phi_derivatives(const PsiField& psi, double x, double t) {
  const cplx phi_s = static_cast<double>(psi.sign()) * kI * psi.psi_x(x, t) / 2.0;
  return {phi_s, psi.psi_t(x, t) - phi_s};
}

std::vector<cplx> borel_taylor(const Potential& p, double x, std::size_t count, const TaylorOptions& opt) {
  require(opt.radius > 0.0 && opt.rays >= count && count >= 1, "borel_taylor: need radius > 0 and rays >= count >= 1");
  GoursatDomain d;
  d.xi_max = std::max(std::abs(x), 0.05);
  d.T = opt.radius;
  d.n_xi = opt.n_xi;
  d.n_zeta = opt.n_zeta;
  d.n_t = opt.n_t;
  d.quad_order = opt.quad_order;
  SolveOptions so;
  so.tol = opt.tol;
  const std::size_t M = opt.rays;
  std::vector<cplx> samples(M);
  for (std::size_t m = 0; m < M; ++m) {
    d.ray_angle = 2.0 * M_PI * static_cast<double>(m) / static_cast<double>(M);
    const GridField f = solve_fixed_point(p, d, so);
    samples[m] = f.eval(x, opt.radius);
  }
  std::vector<cplx> c(count);
  for (std::size_t k = 0; k < count; ++k) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      acc += samples[m] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(k * m) / static_cast<double>(M));
    }
    c[k] = acc / (static_cast<double>(M) * std::pow(opt.radius, static_cast<double>(k)));
  }
  return c;
}

std::string potential_hash(const Potential& p) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  mix(p.description());
  mix(std::to_string(p.eps_order()));
  char buf[64];
  for (int m = 0; m <= p.eps_order(); ++m)
    for (int n = -3; n <= 3; ++n) {
      const cplx x{0.2 * n, 0.15 * (n + 3)};
      try {
        const cplx v = p.coefficient(static_cast<std::size_t>(m), x);
        std::snprintf(buf, sizeof buf, "%.12g,%.12g;", v.real(), v.imag());
        mix(buf);
      } catch (const Error&) {
        mix("x;");
      }
    }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_checkpoint(const GridField& f, const std::string& hash, std::ostream& os) {
  const auto& d = f.domain();
  char buf[128];
  os << "borelsum-gridfield 1\n";
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.17g\n", key, v);
    os << buf;
  };
  kv("xi_max", d.xi_max);
  kv("T", d.T);
  kv("ray_angle", d.ray_angle);
  os << "n_xi=" << d.n_xi << "\nn_zeta=" << d.n_zeta << "\nn_t=" << d.n_t << "\nquad_order=" << d.quad_order
     << "\nsign=" << d.sign << "\ninterp=" << f.interpolation_label() << "\n";
  kv("nu", f.norm_nu);
  os << "iterations=" << f.diagnostics.iterations << "\npotential_hash=" << hash << "\ndata\n";
  for (std::size_t i = 0; i < d.n_xi; ++i)
    for (std::size_t j = 0; j < d.n_zeta; ++j)
      for (std::size_t k = 0; k < d.n_t; ++k) {
        const cplx v = f.at(i, j, k);
        std::snprintf(buf, sizeof buf, "%zu %zu %zu %.17g %.17g\n", i, j, k, v.real(), v.imag());
        os << buf;
      }
}

void write_checkpoint(const GridField& f, const std::string& hash, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot open checkpoint for writing: " + path);
  write_checkpoint(f, hash, os);
  if (!os) throw Error(ErrorCode::IoError, "failed writing checkpoint: " + path);
}

Checkpoint read_checkpoint(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("borelsum-gridfield", 0) != 0) {
    throw Error(ErrorCode::IoError, "not a gridfield checkpoint");
  }
  std::map<std::string, std::string> kv;
  while (std::getline(is, line) && line != "data") {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::IoError, "malformed checkpoint header: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw Error(ErrorCode::IoError, "checkpoint header lacks " + k);
    return it->second;
  };
  GoursatDomain d;
  try {
    d.xi_max = std::stod(get("xi_max"));
    d.T = std::stod(get("T"));
    d.n_xi = std::stoul(get("n_xi"));
    d.n_zeta = std::stoul(get("n_zeta"));
    d.n_t = std::stoul(get("n_t"));
    d.quad_order = std::stoul(get("quad_order"));
    d.sign = std::stoi(get("sign"));
    if (kv.count("ray_angle")) d.ray_angle = std::stod(kv["ray_angle"]);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::IoError, "checkpoint header has a malformed number");
  }
  d.interp = get("interp") == "local-cubic" ? num::InterpKind::LocalCubic : num::InterpKind::Chebyshev;
  Checkpoint c{GridField(d), get("potential_hash"), std::stoi(get("iterations"))};
  c.field.norm_nu = std::stod(get("nu"));
  c.field.diagnostics.iterations = c.iterations;
  std::size_t count = 0;
  std::size_t i, j, k;
  double re, im;
  while (is >> i >> j >> k >> re >> im) {
    if (i >= d.n_xi || j >= d.n_zeta || k >= d.n_t) throw Error(ErrorCode::IoError, "checkpoint index out of range");
    c.field.at(i, j, k) = {re, im};
    ++count;
  }
  if (count != c.field.samples().size()) throw Error(ErrorCode::IoError, "checkpoint is truncated");
  return c;
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot open checkpoint: " + path);
  return read_checkpoint(is);
}

}  // namespace borelsum::goursat
