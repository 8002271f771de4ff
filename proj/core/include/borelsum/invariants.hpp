#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "borelsum/potentials.hpp"
#include "borelsum/summation.hpp"

namespace borelsum::invariants {

struct LeadingComparison {
  double c_leading = 0.0;
  double abs_diff = 0.0;
};

struct InvariantReport {
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<cplx> C1, C2, C;
  cplx C_median;
  double drift = 0.0;  // max |C - median| / |median|, absolute when the median vanishes
  double wronskian_drift = 0.0;
  std::optional<LeadingComparison> leading_comparison;

  void write_json(std::ostream& os) const;
};

/// C1 = e^{-i lambda x} |psi phi_-; psi' B| / D, C2 = e^{i lambda x} |phi_+ psi; A psi'| / D,
/// D = phi_+ B - phi_- A. Throws DegenerateWronskian when |D| < 1e-8 max(|phi_+ A|, |phi_- B|).
InvariantReport compute_C(const summation::SolutionPair& pair, const std::vector<cplx>& psi,
                          const std::vector<cplx>& dpsi);

struct Amplitudes {
  cplx C1;
  cplx C2;
};

/// (C1, C2) from psi(0), psi'(0); the pair must contain x = 0.
Amplitudes decompose(const summation::SolutionPair& pair, cplx psi0, cplx dpsi0);

/// psi = C1 e^{i lambda x} phi_+ + C2 e^{-i lambda x} phi_- and its derivative on the pair's grid.
struct Reconstruction {
  std::vector<cplx> psi;
  std::vector<cplx> dpsi;
};
Reconstruction reconstruct(const summation::SolutionPair& pair, const Amplitudes& c);

/// (x_dot^2 + omega^2 x^2) / 2 / (2 omega^2).
double pendulum_leading(double x_dot, double x_val, double omega);

/// Initial data of the normalized equation for the oscillator x'' + omega(eps t)^2 x = 0 with
/// state (x, x_dot) at u = u0: f = omega^(1/2) x, df/dtau = x_dot / (eps omega^(1/2)) + omega' x / (2 omega^(3/2)).
struct PendulumState {
  cplx psi;
  cplx dpsi;
  /// E / (2 omega) for the rescaled coordinate omega^(1/2) x, the leading value of eps^2 C.
  double leading = 0.0;
};
PendulumState pendulum_state(const potentials::PendulumSpec& spec, double eps, double x_val, double x_dot,
                             double u0 = 0.0);

}  // namespace borelsum::invariants
