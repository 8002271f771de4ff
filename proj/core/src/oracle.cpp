#include "borelsum/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/numeric/odeint.hpp>

#include "borelsum/error.hpp"

namespace borelsum::oracle {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 4>;

void Trajectory::write_csv(std::ostream& os) const {
  os << "x,re_psi,im_psi,re_dpsi,im_dpsi\n";
  os.precision(17);
  for (std::size_t n = 0; n < x.size(); ++n) {
    os << x[n] << ',' << psi[n].real() << ',' << psi[n].imag() << ',' << dpsi[n].real() << ','
       << dpsi[n].imag() << '\n';
  }
}

namespace {

struct Rhs {
  const Potential* p;
  double lambda;
  double eps;
  void operator()(const State& y, State& dy, double x) const {
    const cplx psi{y[0], y[1]};
    const cplx q = lambda * lambda - p->eval(x, eps);
    const cplx d2 = -q * psi;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = d2.real();
    dy[3] = d2.imag();
  }
};

}  // namespace

Trajectory integrate(const Potential& p, double lambda, cplx psi0, cplx dpsi0, const std::vector<double>& xs,
                     const IntegrateOptions& opt) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "oracle: lambda must be positive");
  if (opt.tol < 1e-13 * (1.0 - 1e-9)) throw Error(ErrorCode::InvalidArgument, "oracle: tol must be >= 1e-13");
  Trajectory tr;
  tr.x = xs;
  tr.psi.resize(xs.size());
  tr.dpsi.resize(xs.size());
  tr.tol_used = opt.tol;

  const Rhs rhs{&p, lambda, opt.use_eps ? 1.0 / lambda : 0.0};
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(opt.tol, opt.tol);
  const double cap = 2.0 * std::numbers::pi / lambda / 20.0;

  std::vector<std::size_t> order(xs.size());
  for (std::size_t n = 0; n < xs.size(); ++n) order[n] = n;
  // two sweeps out of x0, each visiting its samples in order of distance
  for (int dir : {1, -1}) {
    std::vector<std::size_t> side;
    for (std::size_t n : order)
      if ((dir > 0 && xs[n] >= opt.x0) || (dir < 0 && xs[n] < opt.x0)) side.push_back(n);
    std::sort(side.begin(), side.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(xs[a] - opt.x0) < std::abs(xs[b] - opt.x0); });
    State y{psi0.real(), psi0.imag(), dpsi0.real(), dpsi0.imag()};
    double x = opt.x0;
    double dt = dir * cap;
    for (std::size_t n : side) {
      const double target = xs[n];
      while (dir * (target - x) > 0.0) {
        double h = dir * std::min({std::abs(dt), cap, std::abs(target - x)});
        const double hmin = 1e-14 * std::max(1.0, std::abs(x));
        for (;;) {
          if (std::abs(h) < hmin) throw Error(ErrorCode::StepUnderflow, "oracle: step size underflow");
          const double hprev = h;
          const auto res = stepper.try_step(rhs, y, x, h);
          if (res == odeint::success) {
            ++tr.steps;
            dt = h;
            break;
          }
          ++tr.rejected;
          if (!(std::abs(h) < std::abs(hprev))) h = 0.5 * hprev;
        }
      }
      tr.psi[n] = {y[0], y[1]};
      tr.dpsi[n] = {y[2], y[3]};
    }
  }
  return tr;
}

Trajectory integrate(const Potential& p, double lambda, cplx psi0, cplx dpsi0, double x_lo, double x_hi,
                     std::size_t samples, const IntegrateOptions& opt) {
  if (samples < 2 || !(x_hi > x_lo)) throw Error(ErrorCode::InvalidArgument, "oracle: bad sample range");
  std::vector<double> xs(samples);
  for (std::size_t n = 0; n < samples; ++n) xs[n] = x_lo + (x_hi - x_lo) * static_cast<double>(n) / (samples - 1);
  return integrate(p, lambda, psi0, dpsi0, xs, opt);
}

cplx constant_V_exact(double c, double lambda, double x) {
  if (!(lambda * lambda > c)) throw Error(ErrorCode::InvalidArgument, "constant_V_exact: need lambda^2 > c");
  return std::exp(kI * (std::sqrt(lambda * lambda - c) - lambda) * x) / lambda;
}

ConstantSolution constant_V_solution(double c, double lambda, cplx psi0, cplx dpsi0, double x) {
  if (!(lambda * lambda > c)) throw Error(ErrorCode::InvalidArgument, "constant_V_solution: need lambda^2 > c");
  const double k = std::sqrt(lambda * lambda - c);
  return {psi0 * std::cos(k * x) + dpsi0 * std::sin(k * x) / k, -psi0 * k * std::sin(k * x) + dpsi0 * std::cos(k * x)};
}

std::vector<cplx> wronskian(const Trajectory& a, const Trajectory& b) {
  if (a.x.size() != b.x.size()) throw Error(ErrorCode::InvalidArgument, "wronskian: sample mismatch");
  std::vector<cplx> w(a.x.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = a.psi[n] * b.dpsi[n] - a.dpsi[n] * b.psi[n];
  return w;
}

}  // namespace borelsum::oracle
