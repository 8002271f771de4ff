#include "borelsum/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "borelsum/error.hpp"

namespace borelsum::num {

GaussRule gauss_legendre(std::size_t order) {
  if (order == 0) throw Error(ErrorCode::InvalidArgument, "gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t n = order;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0;
    double p1 = z;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) {
      p1 = z;
      p0 = 1.0;
    }
    dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // map to [0,1]; index ascending
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n == 1) {
    rule.nodes[0] = 0.5;
    rule.weights[0] = 1.0;
  }
  return rule;
}

std::vector<double> chebyshev_lobatto(std::size_t n, double a, double b) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "chebyshev_lobatto: need n >= 2");
  std::vector<double> x(n);
  const double m = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = m - r * std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n - 1));
  }
  x.front() = a;
  x.back() = b;
  // symmetric grids: make the midpoint exact
  if (n % 2 == 1) x[n / 2] = m;
  return x;
}

Axis::Axis(std::size_t n, double a, double b, InterpKind kind)
    : nodes_(chebyshev_lobatto(n, a, b)), a_(a), b_(b), kind_(kind) {
  if (kind == InterpKind::LocalCubic && n < 4) {
    throw Error(ErrorCode::InvalidArgument, "Axis: local cubic interpolation needs >= 4 nodes");
  }
  bary_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    bary_[j] = (j % 2 == 0) ? 1.0 : -1.0;
  }
  bary_.front() *= 0.5;
  bary_.back() *= 0.5;
  diff_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (bary_[j] / bary_[i]) / (nodes_[i] - nodes_[j]);
      diff_[i * n + j] = d;
      diag -= d;
    }
    diff_[i * n + i] = diag;
  }
}

void Axis::weights(double x, std::span<double> out) const {
  const std::size_t n = nodes_.size();
  const double span = b_ - a_;
  const double slack = 1e-12 * std::max(1.0, std::abs(span));
  if (x < a_ - slack || x > b_ + slack) {
    throw Error(ErrorCode::DomainEscape, "interpolation point " + std::to_string(x) +
                                             " outside [" + std::to_string(a_) + ", " +
                                             std::to_string(b_) + "]");
  }
  x = std::clamp(x, a_, b_);
  std::fill(out.begin(), out.end(), 0.0);
  if (kind_ == InterpKind::Chebyshev) {
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = x - nodes_[j];
      if (d == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        out[j] = 1.0;
        return;
      }
      const double w = bary_[j] / d;
      out[j] = w;
      denom += w;
    }
    for (std::size_t j = 0; j < n; ++j) out[j] /= denom;
    return;
  }
  // local cubic Lagrange on the four nodes around x
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::ptrdiff_t k = std::distance(nodes_.begin(), it) - 1;
  std::ptrdiff_t first = std::clamp<std::ptrdiff_t>(k - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
  for (std::ptrdiff_t a = first; a < first + 4; ++a) {
    double l = 1.0;
    for (std::ptrdiff_t b = first; b < first + 4; ++b) {
      if (a == b) continue;
      l *= (x - nodes_[b]) / (nodes_[a] - nodes_[b]);
    }
    out[a] = l;
  }
}

std::vector<double> Axis::weights(double x) const {
  std::vector<double> w(nodes_.size());
  weights(x, w);
  return w;
}

ChebSeries ChebSeries::from_lobatto_values(double a, double b, std::span<const cplx> values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "ChebSeries: need >= 2 samples");
  const std::size_t N = n - 1;
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      // ascending node j is the standard node N - j
      const std::size_t js = N - j;
      double w = std::cos(std::numbers::pi * static_cast<double>((k * js) % (2 * N)) /
                          static_cast<double>(N));
      if (js == 0 || js == N) w *= 0.5;
      acc += w * values[j];
    }
    c[k] = acc * (2.0 / static_cast<double>(N));
  }
  c[0] *= 0.5;
  c[N] *= 0.5;
  return ChebSeries(a, b, std::move(c));
}

ChebSeries ChebSeries::from_function(double a, double b, std::size_t n,
                                     const std::function<cplx(double)>& f) {
  const auto x = chebyshev_lobatto(n, a, b);
  std::vector<cplx> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = f(x[j]);
  return from_lobatto_values(a, b, v);
}

cplx ChebSeries::operator()(double x) const {
  const double u = (2.0 * x - a_ - b_) / (b_ - a_);
  cplx b1 = 0.0;
  cplx b2 = 0.0;
  for (std::size_t k = c_.size(); k-- > 1;) {
    const cplx b0 = c_[k] + 2.0 * u * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c_.empty() ? cplx{} : c_[0] + u * b1 - b2;
}

ChebSeries ChebSeries::derivative() const {
  const std::size_t n = c_.size();
  std::vector<cplx> d(std::max<std::size_t>(n, 1), 0.0);
  if (n >= 2) {
    d[n - 1] = 0.0;
    d[n - 2] = 2.0 * static_cast<double>(n - 1) * c_[n - 1];
    for (std::size_t k = n - 2; k-- > 0;) {
      d[k] = (k + 2 < n ? d[k + 2] : cplx{}) + 2.0 * static_cast<double>(k + 1) * c_[k + 1];
    }
    d[0] *= 0.5;
  }
  const double scale = 2.0 / (b_ - a_);
  for (auto& v : d) v *= scale;
  return ChebSeries(a_, b_, std::move(d));
}

ChebSeries ChebSeries::integral(double x0) const {
  const std::size_t n = c_.size();
  std::vector<cplx> r(n + 1, 0.0);
  auto c = [&](std::size_t k) { return k < n ? c_[k] : cplx{}; };
  if (n >= 1) r[1] = c(0) - 0.5 * c(2);
  for (std::size_t k = 2; k <= n; ++k) {
    r[k] = (c(k - 1) - c(k + 1)) / (2.0 * static_cast<double>(k));
  }
  const double scale = 0.5 * (b_ - a_);
  for (auto& v : r) v *= scale;
  ChebSeries out(a_, b_, std::move(r));
  out.c_[0] -= out(x0);
  return out;
}

std::vector<cplx> ChebSeries::values_at_lobatto(std::size_t n) const {
  const auto x = chebyshev_lobatto(n, a_, b_);
  std::vector<cplx> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = (*this)(x[j]);
  return v;
}

std::vector<cplx> ChebSeries::taylor_at_lower(std::size_t count) const {
  // u = -1 + 2 y / L with y = x - a.
  const double L = b_ - a_;
  std::vector<double> tprev(count, 0.0);
  std::vector<double> tcur(count, 0.0);
  std::vector<cplx> out(count, 0.0);
  if (count == 0) return out;
  tprev[0] = 1.0;  // T_0
  if (!c_.empty()) out[0] += c_[0];
  if (c_.size() < 2) return out;
  tcur[0] = -1.0;
  if (count > 1) tcur[1] = 2.0 / L;  // T_1
  for (std::size_t m = 0; m < count; ++m) out[m] += c_[1] * tcur[m];
  for (std::size_t k = 2; k < c_.size(); ++k) {
    std::vector<double> tnext(count, 0.0);
    for (std::size_t m = 0; m < count; ++m) {
      tnext[m] = -2.0 * tcur[m] - tprev[m];
      if (m > 0) tnext[m] += 4.0 / L * tcur[m - 1];
    }
    for (std::size_t m = 0; m < count; ++m) out[m] += c_[k] * tnext[m];
    tprev = std::move(tcur);
    tcur = std::move(tnext);
  }
  return out;
}

LaplaceValue laplace(const std::function<cplx(double)>& f, double lambda, double T, std::size_t order) {
  if (!(lambda > 0.0) || !(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "laplace: need lambda, T > 0");
  const GaussRule hi = gauss_legendre(order);
  const GaussRule lo = gauss_legendre(order * 3 / 4);
  cplx acc_hi = 0.0;
  cplx acc_lo = 0.0;
  double a = 0.0;
  double w = std::min(T, 0.5 / lambda);
  while (a < T) {
    const double b = std::min(T, a + w);
    const double bb = (T - b < 0.25 * w) ? T : b;
    for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
      const double t = a + (bb - a) * hi.nodes[i];
      acc_hi += (bb - a) * hi.weights[i] * std::exp(-lambda * t) * f(t);
    }
    for (std::size_t i = 0; i < lo.nodes.size(); ++i) {
      const double t = a + (bb - a) * lo.nodes[i];
      acc_lo += (bb - a) * lo.weights[i] * std::exp(-lambda * t) * f(t);
    }
    a = bb;
    w *= 2.0;
  }
  return {lambda * acc_hi, lambda * std::abs(acc_hi - acc_lo)};
}

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_threads(unsigned n) { g_threads = std::max(1u, n); }
unsigned threads() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned nt = std::min<std::size_t>(g_threads.load(), std::max<std::size_t>(n, 1));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += nt) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "fit_line: need >= 2 points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return f;
}

}  // namespace borelsum::num
