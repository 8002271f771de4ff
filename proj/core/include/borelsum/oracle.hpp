#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "borelsum/numerics.hpp"
#include "borelsum/potentials.hpp"

namespace borelsum::oracle {

/// psi, psi' of psi'' + (lambda^2 - V(x, 1/lambda)) psi = 0 at requested x.
struct Trajectory {
  std::vector<double> x;
  std::vector<cplx> psi;
  std::vector<cplx> dpsi;
  double tol_used = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::string method = "rkf78";

  /// Rows "x,re_psi,im_psi,re_dpsi,im_dpsi".
  void write_csv(std::ostream& os) const;
};

struct IntegrateOptions {
  double tol = 1e-13;
  double x0 = 0.0;        // where psi0, dpsi0 are imposed
  bool use_eps = true;    // evaluate V(x, 1/lambda) rather than V_0
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration, steps capped at (2 pi / lambda) / 20.
/// The sample points may lie on either side of x0.
Trajectory integrate(const Potential& p, double lambda, cplx psi0, cplx dpsi0, const std::vector<double>& x,
                     const IntegrateOptions& opt = {});
Trajectory integrate(const Potential& p, double lambda, cplx psi0, cplx dpsi0, double x_lo, double x_hi,
                     std::size_t samples, const IntegrateOptions& opt = {});

/// lambda^-1 exp(i (sqrt(lambda^2 - c) - lambda) x).
cplx constant_V_exact(double c, double lambda, double x);

/// Solution of the constant-potential equation with psi(0) = psi0, psi'(0) = dpsi0.
struct ConstantSolution {
  cplx psi;
  cplx dpsi;
};
ConstantSolution constant_V_solution(double c, double lambda, cplx psi0, cplx dpsi0, double x);

/// psi1 dpsi2 - dpsi1 psi2 sample by sample.
std::vector<cplx> wronskian(const Trajectory& a, const Trajectory& b);

}  // namespace borelsum::oracle
