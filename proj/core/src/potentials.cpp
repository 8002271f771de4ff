#include "borelsum/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "borelsum/error.hpp"

namespace borelsum {

Potential::Potential(std::vector<AnalyticFn> orders, Metadata meta)
    : orders_(std::move(orders)), meta_(std::move(meta)) {
  if (orders_.empty()) throw Error(ErrorCode::InvalidArgument, "Potential: no coefficients");
  if (meta_.decay_delta <= 0.0) throw Error(ErrorCode::InvalidArgument, "Potential: decay_delta <= 0");
  if (meta_.eps_B < 0.0) throw Error(ErrorCode::InvalidArgument, "Potential: eps_B < 0");
}

void Potential::check_point(cplx x) const {
  if (std::abs(x.real()) > meta_.strip_halfwidth * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "Re x = " << x.real() << " outside strip of half-width " << meta_.strip_halfwidth;
    throw Error(ErrorCode::StripViolation, os.str());
  }
}

cplx Potential::coefficient(std::size_t k, cplx x) const {
  check_point(x);
  if (k >= orders_.size()) return 0.0;
  const cplx v = orders_[k](x);
  if (!(std::abs(v) <= meta_.magnitude_cap)) {
    std::ostringstream os;
    os << "|V_" << k << "(" << x << ")| = " << std::abs(v) << " exceeds cap " << meta_.magnitude_cap;
    throw Error(ErrorCode::PoleProximity, os.str());
  }
  return v;
}

cplx Potential::eval(cplx x, double eps) const {
  if (eps < 0.0) throw Error(ErrorCode::InvalidArgument, "Potential::eval: eps < 0");
  cplx acc = 0.0;
  double pw = 1.0;
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    if (k > 0 && eps == 0.0) break;
    acc += pw * coefficient(k, x);
    pw *= eps;
  }
  return acc;
}

Potential Potential::leading_order() const {
  Metadata m = meta_;
  m.description += "|order0";
  return Potential({orders_.front()}, m);
}

namespace potentials {

namespace {

cplx poly(const std::vector<double>& c, cplx x) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

std::string list_str(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

// decay exponent and sup constant for a rational function: deg(den) - deg(num) - 1 > 0 required
double rational_delta(const std::vector<double>& num, const std::vector<double>& den) {
  auto degree = [](const std::vector<double>& c) {
    std::size_t d = c.size();
    while (d > 0 && c[d - 1] == 0.0) --d;
    return d == 0 ? -1 : static_cast<int>(d) - 1;
  };
  const int dn = degree(num);
  const int dd = degree(den);
  if (dn < 0) return 1.0;
  return std::max(0.0, static_cast<double>(dd - dn) - 1.0);
}

// sup of |V|(1+|x|)^(1+delta) on a coarse strip sample, with 25% headroom
double estimate_K(const AnalyticFn& f, double halfwidth, double delta, double eta_max = 1000.0) {
  double worst = 0.0;
  for (int i = -8; i <= 8; ++i) {
    const double xi = 0.999 * halfwidth * i / 8.0;
    for (int j = -40; j <= 40; ++j) {
      const double eta = (j == 0) ? 0.0 : std::copysign(std::pow(10.0, std::abs(j) / 8.0 - 2.0), j);
      if (std::abs(eta) > eta_max) continue;
      const cplx x(xi, eta);
      worst = std::max(worst, std::abs(f(x)) * std::pow(1.0 + std::abs(x), 1.0 + delta));
    }
  }
  return 1.25 * worst + 1e-300;
}

}  // namespace

Potential zero() {
  Potential::Metadata m;
  m.description = "zero";
  m.decay_K = 1e-300;
  return Potential({[](cplx) { return cplx{}; }}, m);
}

Potential constant(double c) {
  Potential::Metadata m;
  std::ostringstream os;
  os.precision(17);
  os << "constant(" << c << ")";
  m.description = os.str();
  // constant potentials do not decay; the bound only holds on the finite grids used
  m.decay_K = std::abs(c) + 1e-300;
  m.decay_delta = 1.0;
  return Potential({[c](cplx) { return cplx(c, 0.0); }}, m);
}

Potential rational(std::vector<double> numerator, std::vector<double> denominator) {
  return rational_series({{std::move(numerator), std::move(denominator)}}, 0.0);
}

Potential rational_series(std::vector<std::pair<std::vector<double>, std::vector<double>>> orders,
                          double eps_B) {
  if (orders.empty()) throw Error(ErrorCode::InvalidArgument, "rational_series: no orders");
  std::vector<AnalyticFn> fns;
  std::ostringstream os;
  os << "rational";
  double delta = 1e9;
  for (auto& [num, den] : orders) {
    if (den.empty()) throw Error(ErrorCode::InvalidArgument, "rational: empty denominator");
    fns.emplace_back([num, den](cplx x) { return poly(num, x) / poly(den, x); });
    os << "[" << list_str(num) << "/" << list_str(den) << "]";
    delta = std::min(delta, rational_delta(num, den));
  }
  Potential::Metadata m;
  m.description = os.str();
  m.decay_delta = delta > 0.0 ? delta : 1.0;
  m.eps_B = orders.size() > 1 ? std::max(eps_B, 1e-300) : eps_B;
  double K = 0.0;
  const double B = orders.size() > 1 ? std::max(m.eps_B, 1e-300) : 1.0;
  for (std::size_t k = 0; k < fns.size(); ++k) {
    K = std::max(K, estimate_K(fns[k], m.strip_halfwidth, m.decay_delta) / std::pow(B, k));
  }
  m.decay_K = K;
  return Potential(std::move(fns), m);
}

Potential inverse_quadratic() { return rational({1.0}, {-4.0, 0.0, 1.0}); }

DecayAudit decay_audit(const Potential& p, double eta_max, std::size_t points_per_decade) {
  DecayAudit audit;
  const auto& m = p.meta();
  const double h = m.strip_halfwidth;
  const std::size_t decades = static_cast<std::size_t>(std::ceil(std::log10(std::max(eta_max, 1.0)) + 2.0));
  for (int i = -4; i <= 4; ++i) {
    const double xi = 0.99 * h * i / 4.0;
    std::vector<double> etas{0.0};
    for (std::size_t j = 0; j <= decades * points_per_decade; ++j) {
      const double eta = std::pow(10.0, -2.0 + static_cast<double>(j) / points_per_decade);
      if (eta > eta_max) break;
      etas.push_back(eta);
      etas.push_back(-eta);
    }
    for (double eta : etas) {
      const cplx x(xi, eta);
      for (int k = 0; k <= p.eps_order(); ++k) {
        const double Bk = k == 0 ? 1.0 : std::pow(m.eps_B, k);
        const double r = std::abs(p.coefficient(k, x)) * std::pow(1.0 + std::abs(x), 1.0 + m.decay_delta) /
                         (Bk * m.decay_K);
        if (r > audit.worst_ratio) {
          audit.worst_ratio = r;
          audit.worst_point = x;
        }
      }
    }
  }
  audit.passes = audit.worst_ratio <= 1.0;
  return audit;
}

double reality_defect(const Potential& p, std::size_t samples) {
  double worst = 0.0;
  const double h = 0.999 * p.strip_halfwidth();
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -h + 2.0 * h * static_cast<double>(i) / static_cast<double>(samples - 1);
    for (int k = 0; k <= p.eps_order(); ++k) {
      worst = std::max(worst, std::abs(p.coefficient(k, x).imag()));
    }
  }
  return worst;
}

PhaseMap::PhaseMap(AnalyticFn rate) : rate_(std::move(rate)), rule_(num::gauss_legendre(24)) {}

cplx PhaseMap::phase(cplx u) const {
  const std::size_t panels = static_cast<std::size_t>(std::ceil(std::abs(u))) + 1;
  cplx acc = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels;
    const double b = static_cast<double>(p + 1) / panels;
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
      const double s = a + (b - a) * rule_.nodes[i];
      acc += (b - a) * rule_.weights[i] * rate_(s * u);
    }
  }
  return acc * u;
}

cplx PhaseMap::inverse(cplx tau) const {
  if (tau == cplx{}) return 0.0;
  // RK4 along the segment for a starting value
  const std::size_t steps = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(4.0 * std::abs(tau))));
  const cplx h = tau / static_cast<double>(steps);
  cplx u = 0.0;
  auto f = [&](cplx v) { return 1.0 / rate_(v); };
  for (std::size_t i = 0; i < steps; ++i) {
    const cplx k1 = f(u);
    const cplx k2 = f(u + 0.5 * h * k1);
    const cplx k3 = f(u + 0.5 * h * k2);
    const cplx k4 = f(u + h * k3);
    u += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  }
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    const cplx du = (phase(u) - tau) / rate_(u);
    u -= du;
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) break;
    last = std::abs(du);
    if (last <= 4e-16 * (1.0 + std::abs(u))) return u;
  }
  // rounding floor of the quadrature-defined phase
  if (last <= 1e-12 * (1.0 + std::abs(u))) return u;
  std::ostringstream os;
  os << "phase inversion did not converge at tau = " << tau;
  throw Error(ErrorCode::InversionFailure, os.str());
}

void PhaseMap::check_monotone(double u_lo, double u_hi, std::size_t samples) const {
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const cplx w = rate_(u);
    if (!(w.real() > 0.0) || std::abs(w.imag()) > 1e-12 * std::abs(w)) {
      std::ostringstream os;
      os << "phase map not monotone: rate(" << u << ") = " << w;
      throw Error(ErrorCode::InversionFailure, os.str());
    }
  }
}

PendulumSpec pendulum_sin(double a, double b) {
  PendulumSpec s;
  s.omega = [a, b](cplx u) { return a + b * std::sin(u); };
  s.domega = [b](cplx u) { return b * std::cos(u); };
  s.d2omega = [b](cplx u) { return -b * std::sin(u); };
  std::ostringstream os;
  os.precision(17);
  os << "pendulum_sin(" << a << "," << b << ")";
  s.description = os.str();
  return s;
}

PendulumSpec pendulum_exp(double c) {
  PendulumSpec s;
  s.omega = [c](cplx u) { return std::exp(c * u); };
  s.domega = [c](cplx u) { return c * std::exp(c * u); };
  s.d2omega = [c](cplx u) { return c * c * std::exp(c * u); };
  std::ostringstream os;
  os.precision(17);
  os << "pendulum_exp(" << c << ")";
  s.description = os.str();
  return s;
}

Potential pendulum_to_standard(const PendulumSpec& spec) {
  if (!spec.omega || !spec.domega || !spec.d2omega) {
    throw Error(ErrorCode::InvalidArgument, "pendulum: omega and its two derivatives are required");
  }
  PhaseMap map(spec.omega);
  map.check_monotone(spec.u_lo, spec.u_hi);
  for (int i = 0; i <= 200; ++i) {
    const double u = spec.u_lo + (spec.u_hi - spec.u_lo) * i / 200.0;
    if (std::abs(spec.omega(u)) < 1e-6) {
      throw Error(ErrorCode::InversionFailure, "pendulum: omega vanishes on the working interval");
    }
  }
  auto fn = [map, spec](cplx tau) {
    const cplx u = map.inverse(tau);
    const cplx w = spec.omega(u);
    const cplx w1 = spec.domega(u);
    const cplx w2 = spec.d2omega(u);
    return w2 / (2.0 * w * w * w) - 0.75 * w1 * w1 / (w * w * w * w);
  };
  Potential::Metadata m;
  m.description = spec.description;
  m.decay_K = 1.0;
  m.decay_delta = 1.0;
  m.decay_K = estimate_K(fn, 0.8, 1.0, 5.0);
  return Potential({fn}, m);
}

StandardPair mathieu_to_standard(const MathieuSpec& spec, double sigma_lo, double sigma_hi) {
  const double al = spec.alpha;
  if (al <= 0.0) throw Error(ErrorCode::InvalidArgument, "mathieu: alpha must be positive");
  if (!(sigma_lo < sigma_hi) || sigma_lo <= -al * (1.0 - 1e-12) || sigma_hi >= al * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "sigma interval [" << sigma_lo << ", " << sigma_hi << "] must lie inside (-" << al << ", " << al
       << ")";
    throw Error(ErrorCode::SingularInterval, os.str());
  }
  const double a = spec.a;
  const double b = spec.b;
  StandardPair out;
  out.q = [a, b, al](cplx s) { return (2.0 * a * s + b * al) / (4.0 * al * (al * al - s * s)); };
  out.r = [al](cplx s) {
    const cplx d = al * al - s * s;
    return (2.0 * al * al + s * s) / (4.0 * d * d);
  };
  return out;
}

std::pair<cplx, cplx> cauchy_derivatives(const AnalyticFn& f, cplx z, double radius, std::size_t points) {
  cplx d1 = 0.0;
  cplx d2 = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(points);
    const cplx e = std::polar(1.0, th);
    const cplx v = f(z + radius * e);
    d1 += v / e;
    d2 += v / (e * e);
  }
  const double n = static_cast<double>(points);
  return {d1 / (n * radius), 2.0 * d2 / (n * radius * radius)};
}

LiouvilleResult liouville_normalize(const LiouvilleInput& in) {
  if (!in.q || !in.r) throw Error(ErrorCode::InvalidArgument, "liouville: q and r required");
  for (int i = 0; i <= 200; ++i) {
    const double s = in.sigma_lo + (in.sigma_hi - in.sigma_lo) * i / 200.0;
    const cplx qv = in.q(s);
    if (!(qv.real() > 0.0)) {
      std::ostringstream os;
      os << "q(" << s << ") = " << qv << " is not positive";
      throw Error(ErrorCode::NonPositiveQ, os.str());
    }
  }
  const double s0 = in.sigma0;
  auto q = in.q;
  // shift so that the phase map starts at sigma0
  PhaseMap map([q, s0](cplx v) { return std::sqrt(q(v + s0)); });
  auto derivs = [in](cplx s) -> std::pair<cplx, cplx> {
    if (in.dq && in.d2q) return {in.dq(s), in.d2q(s)};
    return cauchy_derivatives(in.q, s, in.derivative_radius);
  };
  auto fn = [map, in, derivs, s0](cplx z) {
    const cplx s = map.inverse(z) + s0;
    const cplx qv = in.q(s);
    const auto [q1, q2] = derivs(s);
    return q2 / (4.0 * qv * qv) - (5.0 / 16.0) * q1 * q1 / (qv * qv * qv) - in.r(s) / qv;
  };
  Potential::Metadata m;
  m.description = "liouville";
  const double z_lo = map.phase(in.sigma_lo - s0).real();
  const double z_hi = map.phase(in.sigma_hi - s0).real();
  m.strip_halfwidth = std::max({1.0, std::abs(z_lo), std::abs(z_hi)});
  m.decay_K = 1.0;
  LiouvilleResult res{Potential({fn}, m), map, z_lo, z_hi};
  return res;
}

}  // namespace potentials
}  // namespace borelsum
