#include "borelsum/formal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "borelsum/error.hpp"

namespace borelsum::formal {

FormalSeries::FormalSeries(int sign, SeriesGrid grid, std::vector<num::ChebSeries> coeffs, double residual)
    : sign_(sign), grid_(grid), coeffs_(std::move(coeffs)), residual_(residual) {}

std::vector<double> FormalSeries::nodes() const {
  return num::chebyshev_lobatto(grid_.points, grid_.lo, grid_.hi);
}

const num::ChebSeries& FormalSeries::coefficient_series(int k) const {
  if (k < 1 || k > k_max()) throw Error(ErrorCode::InvalidArgument, "FormalSeries: index out of range");
  return coeffs_[static_cast<std::size_t>(k - 1)];
}

cplx FormalSeries::coefficient(int k, double x) const {
  if (x < grid_.lo - 1e-12 || x > grid_.hi + 1e-12) {
    throw Error(ErrorCode::DomainEscape, "FormalSeries: x outside series grid");
  }
  return coefficient_series(k)(x);
}

cplx FormalSeries::derivative(int k, double x) const { return coefficient_series(k).derivative()(x); }

cplx FormalSeries::partial_sum(double x, double lambda, int m) const {
  cplx acc = 0.0;
  for (int k = std::min(m, k_max()); k >= 1; --k) acc = (acc + coefficient(k, x)) / lambda;
  return acc;
}

void FormalSeries::write_csv(std::ostream& os) const {
  const auto x = nodes();
  os << "k,x,re,im\n";
  os.precision(17);
  for (int k = 1; k <= k_max(); ++k) {
    for (double xv : x) {
      const cplx a = coefficient(k, xv);
      os << k << ',' << xv << ',' << a.real() << ',' << a.imag() << '\n';
    }
  }
}

FormalSeries wkb_coefficients(const Potential& p, int sign, int k_max, const SeriesGrid& grid, double tol) {
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "wkb_coefficients: sign must be +-1");
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "wkb_coefficients: k_max >= 1 required");
  if (p.eps_order() != 0) {
    throw Error(ErrorCode::InvalidArgument, "wkb_coefficients: potential must be eps-independent");
  }
  if (!(grid.lo < 0.0 && grid.hi > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "wkb_coefficients: grid must contain x = 0 in its interior");
  }
  const std::size_t n = grid.points;
  const auto x = num::chebyshev_lobatto(n, grid.lo, grid.hi);
  std::vector<cplx> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = p.eval(x[j]);

  const cplx factor = static_cast<double>(sign) / (2.0 * kI);
  std::vector<num::ChebSeries> coeffs;
  coeffs.emplace_back(grid.lo, grid.hi, std::vector<cplx>{1.0});
  for (int k = 1; k < k_max; ++k) {
    const auto& ak = coeffs.back();
    const auto d2 = ak.derivative().derivative();
    std::vector<cplx> src(n);
    for (std::size_t j = 0; j < n; ++j) src[j] = factor * (v[j] * ak(x[j]) - d2(x[j]));
    coeffs.push_back(num::ChebSeries::from_lobatto_values(grid.lo, grid.hi, src).integral(0.0));
  }

  // residual a_k'' + 2 i sign a_{k+1}' - V a_k at off-node points, relative to the largest term
  double residual = 0.0;
  const std::size_t nc = 2 * n + 1;
  for (int k = 1; k < k_max; ++k) {
    const auto& ak = coeffs[static_cast<std::size_t>(k - 1)];
    const auto d2s = ak.derivative().derivative();
    const auto d1s = coeffs[static_cast<std::size_t>(k)].derivative();
    double rmax = 0.0;
    double smax = 0.0;
    for (std::size_t j = 0; j < nc; ++j) {
      const double xc =
          grid.lo + (grid.hi - grid.lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(nc);
      const cplx va = p.eval(xc) * ak(xc);
      const cplx d2 = d2s(xc);
      const cplx r = d2 + 2.0 * kI * static_cast<double>(sign) * d1s(xc) - va;
      rmax = std::max(rmax, std::abs(r));
      smax = std::max({smax, std::abs(d2), std::abs(va)});
    }
    if (smax > 0.0) residual = std::max(residual, rmax / smax);
  }
  if (residual > tol) {
    throw Error(ErrorCode::GridTooCoarse,
                "wkb_coefficients: recursion residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return FormalSeries(sign, grid, std::move(coeffs), residual);
}

cplx BorelPolynomial::operator()(double t) const {
  // Horner in t with running factorials
  cplx acc = 0.0;
  for (std::size_t k = y_.size(); k-- > 0;) {
    acc = y_[k] + (k + 1 < y_.size() ? acc * t / static_cast<double>(k + 1) : cplx{});
  }
  return acc;
}

BorelPolynomial borel_transform(const FormalSeries& s, double x) {
  std::vector<cplx> y(s.count());
  for (int k = 1; k <= s.k_max(); ++k) y[static_cast<std::size_t>(k - 1)] = s.coefficient(k, x);
  return BorelPolynomial(std::move(y));
}

cplx resum_series(const FormalSeries& s, double x, double lambda, double T) {
  const auto Y = borel_transform(s, x);
  // L Y = int exp(-lambda t) Y dt, our quadrature returns lambda times that
  return num::laplace([&](double t) { return Y(t); }, lambda, T).value / lambda;
}

namespace {

using Trunc = std::vector<cplx>;

Trunc mul(const Trunc& a, const Trunc& b) {
  Trunc c(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Trunc sub(const Trunc& a, const Trunc& b) {
  Trunc c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Trunc scale(const Trunc& a, cplx s) {
  Trunc c(a);
  for (auto& v : c) v *= s;
  return c;
}

Trunc div(const Trunc& a, const Trunc& b) {
  if (std::abs(b[0]) == 0.0) throw Error(ErrorCode::DegenerateWronskian, "series division by zero leading term");
  Trunc q(a.size(), 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    cplx acc = a[n];
    for (std::size_t j = 1; j <= n; ++j) acc -= b[j] * q[n - j];
    q[n] = acc / b[0];
  }
  return q;
}

// lambda * phi and the derivative combination phi' + sign i lambda phi as series in 1/lambda
std::pair<Trunc, Trunc> scaled_pair(const FormalSeries& s, double x, std::size_t len) {
  Trunc P(len, 0.0);
  Trunc A(len, 0.0);
  const cplx si = static_cast<double>(s.sign()) * kI;
  for (std::size_t m = 0; m < len; ++m) {
    const int k = static_cast<int>(m) + 1;
    if (k <= s.k_max()) {
      P[m] = s.coefficient(k, x);
      A[m] += si * s.coefficient(k, x);
    }
    if (m >= 1 && k - 1 <= s.k_max()) A[m] += s.derivative(k - 1, x);
  }
  return {P, A};
}

}  // namespace

ScalarSeries invariant_series_leading(double x, cplx lambda_psi, cplx dpsi, const FormalSeries& plus,
                                      const FormalSeries& minus, int orders) {
  if (orders < 1 || orders > 2) {
    throw Error(ErrorCode::InvalidArgument, "invariant_series_leading: orders must be 1 or 2");
  }
  if (lambda_psi == cplx{} && dpsi == cplx{}) {
    throw Error(ErrorCode::DegenerateState, "invariant_series_leading: psi = psi' = 0");
  }
  if (plus.sign() != 1 || minus.sign() != -1) {
    throw Error(ErrorCode::InvalidArgument, "invariant_series_leading: need the + and - series");
  }
  const std::size_t len = static_cast<std::size_t>(orders);
  const auto [P, A] = scaled_pair(plus, x, len);
  const auto [M, B] = scaled_pair(minus, x, len);
  const Trunc det1 = sub(scale(B, lambda_psi), scale(M, dpsi));
  const Trunc det2 = sub(scale(P, dpsi), scale(A, lambda_psi));
  const Trunc den = sub(mul(P, B), mul(M, A));
  const Trunc c = div(mul(det1, det2), mul(den, den));
  return ScalarSeries{0, c};
}

ScalarSeries invariant_series_leading(double x, cplx lambda_psi, cplx dpsi, const Potential& p, int orders) {
  SeriesGrid g;
  g.lo = std::min(-0.9, x - 0.05);
  g.hi = std::max(0.9, x + 0.05);
  const auto plus = wkb_coefficients(p, 1, orders + 1, g);
  const auto minus = wkb_coefficients(p, -1, orders + 1, g);
  return invariant_series_leading(x, lambda_psi, dpsi, plus, minus, orders);
}

GevreyFit gevrey_fit(const FormalSeries& s, double x) {
  std::vector<double> ks;
  std::vector<double> ys;
  for (int k = 2; k <= s.k_max(); ++k) {
    const double a = std::abs(s.coefficient(k, x));
    if (a == 0.0) continue;
    ks.push_back(k);
    ys.push_back(std::log(a) - std::lgamma(k + 1.0));
  }
  if (ks.size() < 2) return {};
  const auto f = num::fit_line(ks, ys);
  return GevreyFit{std::exp(f.intercept), std::exp(f.slope), f.rms_residual};
}

}  // namespace borelsum::formal
