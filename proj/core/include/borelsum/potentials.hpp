#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "borelsum/numerics.hpp"

namespace borelsum {

/// Analytic coefficient function of one complex variable.
using AnalyticFn = std::function<cplx(cplx)>;

/// V(x, eps) = sum_k V_k(x) eps^k, analytic in the strip |Re x| < strip_halfwidth,
/// with |V_k(x)| <= decay_K eps_B^k (1 + |x|)^(-1-decay_delta).
class Potential {
 public:
  struct Metadata {
    std::string description;  // stable identifier, used in checkpoint hashes
    double strip_halfwidth = 1.0;
    double decay_K = 1.0;
    double decay_delta = 1.0;
    double eps_B = 0.0;
    bool real_on_axis = true;
    double magnitude_cap = 1e8;
  };

  Potential(std::vector<AnalyticFn> orders, Metadata meta);

  /// V(x, eps); throws StripViolation / PoleProximity.
  cplx eval(cplx x, double eps = 0.0) const;
  /// Individual coefficient V_k(x), k <= eps_order().
  cplx coefficient(std::size_t k, cplx x) const;

  int eps_order() const { return static_cast<int>(orders_.size()) - 1; }
  const Metadata& meta() const { return meta_; }
  double strip_halfwidth() const { return meta_.strip_halfwidth; }
  bool real_on_axis() const { return meta_.real_on_axis; }
  const std::string& description() const { return meta_.description; }
  /// Potential made of the eps^0 coefficient only.
  Potential leading_order() const;
  /// Same coefficients with replaced metadata.
  Potential with_metadata(Metadata meta) const { return Potential(orders_, std::move(meta)); }

 private:
  void check_point(cplx x) const;
  std::vector<AnalyticFn> orders_;
  Metadata meta_;
};

namespace potentials {

Potential zero();
Potential constant(double c);
/// Ratio of polynomials with ascending coefficient lists.
Potential rational(std::vector<double> numerator, std::vector<double> denominator);
/// eps-dependent rational potential: one (numerator, denominator) pair per eps order.
Potential rational_series(std::vector<std::pair<std::vector<double>, std::vector<double>>> orders,
                          double eps_B);
/// Catalog potential 1/(x^2 - 4): poles at +-2, decay exponent 1.
Potential inverse_quadratic();

struct DecayAudit {
  double worst_ratio = 0.0;  // max |V_k| (1+|x|)^(1+delta) B^-k / K
  cplx worst_point{};
  bool passes = false;
};

/// Sweeps |Im x| logarithmically up to eta_max at several Re x inside the strip.
DecayAudit decay_audit(const Potential& p, double eta_max = 1000.0, std::size_t points_per_decade = 8);

/// max |Im V(x)| over real samples in the strip.
double reality_defect(const Potential& p, std::size_t samples = 101);

/// Inverse of tau(u) = int_0^u rate(v) dv for complex tau, obtained by
/// integrating du/dtau = 1/rate(u) along the segment [0, tau] and polishing
/// the endpoint with Newton steps on the quadrature-defined tau(u).
class PhaseMap {
 public:
  explicit PhaseMap(AnalyticFn rate);
  cplx phase(cplx u) const;
  cplx inverse(cplx tau) const;
  /// Requires rate > 0 on sampled real points of [u_lo, u_hi]; InversionFailure otherwise.
  void check_monotone(double u_lo, double u_hi, std::size_t samples = 201) const;

 private:
  AnalyticFn rate_;
  num::GaussRule rule_;
};

struct PendulumSpec {
  AnalyticFn omega;
  AnalyticFn domega;
  AnalyticFn d2omega;
  double u_lo = -1.0;  // working real interval of the slow variable
  double u_hi = 1.0;
  std::string description = "pendulum";
};

/// omega(u) = a + b sin(u).
PendulumSpec pendulum_sin(double a, double b);
/// omega(u) = exp(c u).
PendulumSpec pendulum_exp(double c);

/// V(tau) = omega''/(2 omega^3) - (3/4) omega'^2 / omega^4 at u(tau), tau = int_0^u omega,
/// so f'' + (eps^-2 - V) f = 0.
Potential pendulum_to_standard(const PendulumSpec& spec);

struct MathieuSpec {
  double a = 0.0;
  double b = 1.0;
  double alpha = 1.0;
};

/// Coefficients of eps^2 f'' + (q(sigma) + eps^2 r(sigma)) f = 0.
struct StandardPair {
  AnalyticFn q;
  AnalyticFn r;
};

StandardPair mathieu_to_standard(const MathieuSpec& spec, double sigma_lo, double sigma_hi);

/// q and r, with optional derivatives of q (Cauchy-integral derivatives are used otherwise).
struct LiouvilleInput {
  AnalyticFn q;
  AnalyticFn r;
  AnalyticFn dq;
  AnalyticFn d2q;
  double sigma_lo = -0.5;
  double sigma_hi = 0.5;
  double sigma0 = 0.0;  // z = 0 here
  double derivative_radius = 0.05;
};

struct LiouvilleResult {
  Potential potential;
  PhaseMap map;  // acts on sigma - sigma0: z = map.phase(sigma - sigma0)
  double z_lo = 0.0;
  double z_hi = 0.0;
};

/// z = int sqrt(q), f = q^(-1/4) g gives g'' + (eps^-2 - V) g = 0 with
/// V = q''/(4 q^2) - (5/16) q'^2/q^3 - r/q evaluated at sigma(z).
LiouvilleResult liouville_normalize(const LiouvilleInput& in);

/// First and second derivatives of an analytic function by the trapezoidal
/// Cauchy integral on a circle of the given radius.
std::pair<cplx, cplx> cauchy_derivatives(const AnalyticFn& f, cplx z, double radius,
                                         std::size_t points = 48);

}  // namespace potentials
}  // namespace borelsum
