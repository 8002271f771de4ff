#include "borelsum/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "borelsum/error.hpp"

namespace borelsum::invariants {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

cplx checked_det(const summation::SolutionPair& p, std::size_t n) {
  const cplx D = p.determinant(n);
  const double scale = std::max(std::abs(p.phi_plus[n] * p.A[n]), std::abs(p.phi_minus[n] * p.B[n]));
  if (!(std::abs(D) >= 1e-8 * scale) || D == cplx{}) {
    throw Error(ErrorCode::DegenerateWronskian, "determinant phi_+ B - phi_- A is numerically zero");
  }
  return D;
}

}  // namespace

InvariantReport compute_C(const summation::SolutionPair& pair, const std::vector<cplx>& psi,
                          const std::vector<cplx>& dpsi) {
  const std::size_t n = pair.x.size();
  if (psi.size() != n || dpsi.size() != n) throw Error(ErrorCode::InvalidArgument, "compute_C: sample mismatch");
  InvariantReport r;
  r.lambda = pair.lambda;
  r.x = pair.x;
  r.C1.resize(n);
  r.C2.resize(n);
  r.C.resize(n);
  const double lam = pair.lambda;
  for (std::size_t m = 0; m < n; ++m) {
    const cplx D = checked_det(pair, m);
    const cplx det1 = psi[m] * pair.B[m] - pair.phi_minus[m] * dpsi[m];
    const cplx det2 = pair.phi_plus[m] * dpsi[m] - pair.A[m] * psi[m];
    r.C1[m] = std::exp(-kI * lam * pair.x[m]) * det1 / D;
    r.C2[m] = std::exp(kI * lam * pair.x[m]) * det2 / D;
    r.C[m] = r.C1[m] * r.C2[m];
  }
  std::vector<double> re(n), im(n);
  for (std::size_t m = 0; m < n; ++m) {
    re[m] = r.C[m].real();
    im[m] = r.C[m].imag();
  }
  r.C_median = {median(re), median(im)};
  double dev = 0.0;
  for (const cplx& c : r.C) dev = std::max(dev, std::abs(c - r.C_median));
  r.drift = std::abs(r.C_median) > 0.0 ? dev / std::abs(r.C_median) : dev;
  r.wronskian_drift = pair.wronskian_drift();
  return r;
}

Amplitudes decompose(const summation::SolutionPair& pair, cplx psi0, cplx dpsi0) {
  std::size_t k = pair.x.size();
  for (std::size_t m = 0; m < pair.x.size(); ++m)
    if (std::abs(pair.x[m]) < 1e-14) k = m;
  if (k == pair.x.size()) throw Error(ErrorCode::InvalidArgument, "decompose: the pair has no sample at x = 0");
  const cplx D = checked_det(pair, k);
  return {(psi0 * pair.B[k] - pair.phi_minus[k] * dpsi0) / D, (pair.phi_plus[k] * dpsi0 - pair.A[k] * psi0) / D};
}

Reconstruction reconstruct(const summation::SolutionPair& pair, const Amplitudes& c) {
  Reconstruction r;
  const std::size_t n = pair.x.size();
  r.psi.resize(n);
  r.dpsi.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const cplx ep = std::exp(kI * pair.lambda * pair.x[m]);
    const cplx em = 1.0 / ep;
    r.psi[m] = c.C1 * ep * pair.phi_plus[m] + c.C2 * em * pair.phi_minus[m];
    r.dpsi[m] = c.C1 * ep * pair.A[m] + c.C2 * em * pair.B[m];
  }
  return r;
}

double pendulum_leading(double x_dot, double x_val, double omega) {
  const double E = 0.5 * (x_dot * x_dot + omega * omega * x_val * x_val);
  return E / (2.0 * omega * omega);
}

PendulumState pendulum_state(const potentials::PendulumSpec& spec, double eps, double x_val, double x_dot,
                             double u0) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "pendulum_state: eps must be positive");
  if (x_val == 0.0 && x_dot == 0.0) throw Error(ErrorCode::DegenerateState, "pendulum_state: zero state");
  const double w = spec.omega(u0).real();
  const double dw = spec.domega(u0).real();
  if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "pendulum_state: omega must be positive");
  PendulumState s;
  s.psi = std::sqrt(w) * x_val;
  s.dpsi = x_dot / (eps * std::sqrt(w)) + 0.5 * dw * std::pow(w, -1.5) * x_val;
  s.leading = pendulum_leading(std::sqrt(w) * x_dot, std::sqrt(w) * x_val, w);
  return s;
}

void InvariantReport::write_json(std::ostream& os) const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "{\n  \"lambda\": %.17g,\n  \"drift\": %.6e,\n  \"wronskian_drift\": %.6e,\n",
                lambda, drift, wronskian_drift);
  os << buf;
  std::snprintf(buf, sizeof buf, "  \"C_median\": [%.17g, %.17g],\n", C_median.real(), C_median.imag());
  os << buf;
  if (leading_comparison) {
    std::snprintf(buf, sizeof buf, "  \"leading_comparison\": {\"c_leading\": %.17g, \"abs_diff\": %.6e},\n",
                  leading_comparison->c_leading, leading_comparison->abs_diff);
    os << buf;
  }
  os << "  \"per_x\": [\n";
  for (std::size_t m = 0; m < x.size(); ++m) {
    std::snprintf(buf, sizeof buf,
                  "    {\"x\": %.17g, \"C1\": [%.17g, %.17g], \"C2\": [%.17g, %.17g], \"C\": [%.17g, %.17g]}%s\n", x[m],
                  C1[m].real(), C1[m].imag(), C2[m].real(), C2[m].imag(), C[m].real(), C[m].imag(),
                  m + 1 < x.size() ? "," : "");
    os << buf;
  }
  os << "  ]\n}\n";
}

}  // namespace borelsum::invariants
