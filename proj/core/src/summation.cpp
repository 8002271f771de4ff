#include "borelsum/summation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "borelsum/error.hpp"

namespace borelsum::summation {

using goursat::PsiField;

LaplaceResult laplace_quadrature(const PsiField& psi, double x, double lambda, PsiField::Part part) {
  const double nu = psi.nu();
  if (!(lambda > nu)) {
    throw Error(ErrorCode::AbscissaViolation,
                "laplace_quadrature: lambda = " + std::to_string(lambda) + " is not above nu = " + std::to_string(nu));
  }
  const auto vals = psi.line(x, part);
  const auto& ax = psi.t_axis();
  const double T = psi.T();
  std::function<cplx(double)> f;
  num::ChebSeries cs;
  if (ax.kind() == num::InterpKind::Chebyshev) {
    cs = num::ChebSeries::from_lobatto_values(0.0, T, vals);
    f = [&cs](double t) { return cs(t); };
  } else {
    f = [&](double t) {
      const auto w = ax.weights(t);
      cplx acc = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * vals[k];
      return acc;
    };
  }
  const auto q = num::laplace(f, lambda, T);
  double M = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) M = std::max(M, std::abs(vals[k]) * std::exp(-nu * ax[k]));
  LaplaceResult r;
  r.value = q.value;
  r.quad_error = q.err_estimate;
  r.tail_bound = lambda * M * std::exp((nu - lambda) * T) / (lambda - nu);
  return r;
}

double SolutionPair::wronskian_drift() const {
  if (x.empty()) return 0.0;
  std::size_t ref = 0;
  for (std::size_t n = 1; n < x.size(); ++n)
    if (std::abs(x[n]) < std::abs(x[ref])) ref = n;
  const cplx d0 = determinant(ref);
  double m = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) m = std::max(m, std::abs(determinant(n) - d0));
  return m / std::abs(d0);
}

double SolutionPair::conjugacy_residual() const {
  double m = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) m = std::max(m, std::abs(phi_minus[n] - std::conj(phi_plus[n])));
  return m;
}

void SolutionPair::write_csv(std::ostream& os) const {
  os << "x,re_phi_plus,im_phi_plus,re_phi_minus,im_phi_minus,re_A,im_A,re_B,im_B\n";
  char buf[512];
  for (std::size_t n = 0; n < x.size(); ++n) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x[n],
                  phi_plus[n].real(), phi_plus[n].imag(), phi_minus[n].real(), phi_minus[n].imag(), A[n].real(),
                  A[n].imag(), B[n].real(), B[n].imag());
    os << buf;
  }
}

SolutionPair build_solution_pair(const PsiField& plus, const PsiField* minus, double lambda,
                                 const std::vector<double>& x) {
  if (plus.sign() != 1) throw Error(ErrorCode::InvalidArgument, "build_solution_pair: plus field has sign -1");
  if (minus != nullptr && minus->sign() != -1) {
    throw Error(ErrorCode::InvalidArgument, "build_solution_pair: minus field has sign +1");
  }
  SolutionPair sp;
  sp.lambda = lambda;
  sp.x = x;
  const std::size_t n = x.size();
  sp.phi_plus.resize(n);
  sp.phi_minus.resize(n);
  sp.A.resize(n);
  sp.B.resize(n);
  sp.conjugated = minus == nullptr;
  for (std::size_t m = 0; m < n; ++m) {
    const auto p = laplace_quadrature(plus, x[m], lambda);
    const auto dp = laplace_quadrature(plus, x[m], lambda, PsiField::Part::PsiX);
    sp.phi_plus[m] = p.value;
    sp.A[m] = dp.value + kI * lambda * sp.phi_plus[m];
    sp.tail_bound = std::max({sp.tail_bound, p.tail_bound, dp.tail_bound});
    sp.quad_error = std::max({sp.quad_error, p.quad_error, dp.quad_error});
    if (minus == nullptr) {
      sp.phi_minus[m] = std::conj(sp.phi_plus[m]);
      sp.B[m] = std::conj(sp.A[m]);
    } else {
      const auto q = laplace_quadrature(*minus, x[m], lambda);
      const auto dq = laplace_quadrature(*minus, x[m], lambda, PsiField::Part::PsiX);
      sp.phi_minus[m] = q.value;
      sp.B[m] = dq.value - kI * lambda * sp.phi_minus[m];
      sp.tail_bound = std::max({sp.tail_bound, q.tail_bound, dq.tail_bound});
      sp.quad_error = std::max({sp.quad_error, q.quad_error, dq.quad_error});
    }
  }
  return sp;
}

BorelFunction::BorelFunction(double T, std::vector<cplx> values, double nu_bound)
    : T_(T), nodes_(num::chebyshev_lobatto(values.size(), 0.0, T)), values_(std::move(values)), nu_bound_(nu_bound) {
  if (!(T > 0.0) || values_.size() < 2) throw Error(ErrorCode::InvalidArgument, "BorelFunction: need T > 0, n >= 2");
  series_ = num::ChebSeries::from_lobatto_values(0.0, T, values_);
}

BorelFunction BorelFunction::from_function(double T, std::size_t n, const std::function<cplx(double)>& f,
                                           double nu_bound) {
  const auto t = num::chebyshev_lobatto(n, 0.0, T);
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = f(t[k]);
  return BorelFunction(T, std::move(v), nu_bound);
}

cplx BorelFunction::laplace(double lambda) const {
  return num::laplace([this](double t) { return series_(t); }, lambda, T_).value / lambda;
}

double BorelFunction::weighted_norm(double A_weight, double nu) const {
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double t = nodes_[k];
    m = std::max(m, (A_weight + t) * (A_weight + t) * std::abs(values_[k]) * std::exp(-nu * t));
  }
  return m;
}

namespace {
void check_same_grid(const BorelFunction& a, const BorelFunction& b) {
  if (a.size() != b.size() || a.T() != b.T()) throw Error(ErrorCode::InvalidArgument, "BorelFunction: grid mismatch");
}
}  // namespace

BorelFunction BorelFunction::operator+(const BorelFunction& o) const {
  check_same_grid(*this, o);
  std::vector<cplx> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] + o.values_[k];
  return BorelFunction(T_, std::move(v), std::max(nu_bound_, o.nu_bound_));
}

BorelFunction BorelFunction::operator-(const BorelFunction& o) const {
  check_same_grid(*this, o);
  std::vector<cplx> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k] - o.values_[k];
  return BorelFunction(T_, std::move(v), std::max(nu_bound_, o.nu_bound_));
}

double BorelFunction::sup_distance(const BorelFunction& o) const {
  check_same_grid(*this, o);
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) m = std::max(m, std::abs(values_[k] - o.values_[k]));
  return m;
}

BorelFunction convolve(const BorelFunction& F, const BorelFunction& G) {
  check_same_grid(F, G);
  const std::size_t n = F.size();
  const auto gl = num::gauss_legendre(n + 8);
  std::vector<cplx> v(n);
  num::parallel_for(n, [&](std::size_t k) {
    const double t = F.nodes()[k];
    cplx acc = 0.0;
    for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
      const double a = gl.nodes[g];
      acc += gl.weights[g] * F(a * t) * G((1.0 - a) * t);
    }
    v[k] = t * acc;
  });
  return BorelFunction(F.T(), std::move(v), std::max(F.nu_bound(), G.nu_bound()));
}

BorelInverse borel_inverse(const BorelFunction& F, double A_weight, double nu, double tol, int max_iter) {
  const BorelFunction one = BorelFunction::from_function(F.T(), F.size(), [](double) { return cplx{1.0}; });
  if (A_weight <= 0.0) {
    // measured constant of ||F*G|| <= (C/A) ||F|| ||G|| with G = 1 at A = 1
    const double c = convolve(F, one).weighted_norm(1.0, nu) /
                     std::max(F.weighted_norm(1.0, nu) * one.weighted_norm(1.0, nu), 1e-300);
    A_weight = std::max(10.0, 2.0 * c);
  }
  BorelInverse r;
  for (int attempt = 0; attempt < 4; ++attempt) {
    BorelFunction G = one;
    double prev = -1.0;
    int growing = 0;
    bool failed = false;
    for (int it = 1; it <= max_iter; ++it) {
      BorelFunction next = one - convolve(F, G);
      const double inc = (next - G).weighted_norm(A_weight, nu);
      G = std::move(next);
      r.iterations = it;
      r.increment = inc / one.weighted_norm(A_weight, nu);
      if (!std::isfinite(inc)) {
        failed = true;
        break;
      }
      if (r.increment <= tol) {
        r.G = G;
        r.A_weight = A_weight;
        r.nu = nu;
        return r;
      }
      growing = (prev > 0.0 && inc >= prev) ? growing + 1 : 0;
      if (growing >= 3) {
        failed = true;
        break;
      }
      prev = inc;
    }
    if (!failed) throw Error(ErrorCode::MaxIterExceeded, "borel_inverse: no convergence");
    A_weight *= 2.0;
    nu *= 2.0;
  }
  throw Error(ErrorCode::NoContraction, "borel_inverse: convolution map is not contracting");
}

double inverse_certificate(const BorelFunction& F, const BorelFunction& G, const std::vector<double>& lambdas) {
  double m = 0.0;
  for (double lam : lambdas) {
    m = std::max(m, std::abs(G.laplace(lam) * (1.0 + F.laplace(lam)) - 1.0 / lam));
  }
  return m;
}

}  // namespace borelsum::summation
