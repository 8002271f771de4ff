#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "borelsum/numerics.hpp"
#include "borelsum/potentials.hpp"

namespace borelsum::goursat {

/// Computational box for Psi(x, t), x = xi + i*eta.
///
/// Nodes sit on a sheared box (xi, zeta, t) in [-xi_max, xi_max] x [0, 1] x [0, T] with
/// eta = sign * zeta * (T - t) / 2. Every characteristic point reached from a node by
/// x' = (1 - a) x + sign i (1 - b) t / 2, t' = b t lands back inside the box.
///
/// With ray_angle != 0 the Borel variable runs along t = r exp(i ray_angle), r in [0, T],
/// and the shear direction rotates with it: x = xi + sign i exp(i ray_angle) w,
/// w = zeta (T - r) / 2. The t axis then stores r.
struct GoursatDomain {
  double xi_max = 0.8;
  double T = 7.0;
  std::size_t n_xi = 19;  // odd, so x = 0 is a node
  std::size_t n_zeta = 12;
  std::size_t n_t = 22;
  std::size_t quad_order = 12;
  int sign = 1;
  double ray_angle = 0.0;
  num::InterpKind interp = num::InterpKind::Chebyshev;

  double eta_max() const { return T / 2.0; }
  /// exp(i ray_angle)
  cplx ray() const { return std::polar(1.0, ray_angle); }
  /// sign i exp(i ray_angle)
  cplx shear() const { return static_cast<double>(sign) * kI * ray(); }
  /// Throws InvalidArgument / StripViolation for an unusable box.
  void validate(const Potential& p) const;
  /// Same box with every node count scaled by `factor` (n_xi kept odd) and the
  /// quadrature order by sqrt(factor).
  GoursatDomain refined(double factor) const;
  /// Default truncation 3 + 40 / lambda_min.
  static double default_T(double lambda_min) { return 3.0 + 40.0 / lambda_min; }
};

struct SolveDiagnostics {
  int iterations = 0;
  std::vector<double> contraction_ratios;
  double final_increment = 0.0;  // ||Phi_n - Phi_{n-1}||_nu / ||Phi_0||_nu
  double fixed_point_residual = 0.0;  // ||Phi - J(Phi)||_nu / ||Phi_0||_nu
  int nu_escalations = 0;
  double truncation_bound = 0.0;  // eps-tail estimate, 0 for eps-free runs
  bool converged = false;
};

/// Samples of Psi on the domain nodes, row-major in (xi, zeta, t).
class GridField {
 public:
  GridField() = default;
  explicit GridField(GoursatDomain d);

  const GoursatDomain& domain() const { return d_; }
  const num::Axis& xi_axis() const { return ax_xi_; }
  const num::Axis& zeta_axis() const { return ax_zeta_; }
  const num::Axis& t_axis() const { return ax_t_; }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * d_.n_zeta + j) * d_.n_t + k;
  }
  cplx& at(std::size_t i, std::size_t j, std::size_t k) { return v_[index(i, j, k)]; }
  cplx at(std::size_t i, std::size_t j, std::size_t k) const { return v_[index(i, j, k)]; }
  std::vector<cplx>& samples() { return v_; }
  const std::vector<cplx>& samples() const { return v_; }
  /// Complex x of node (i, j, k).
  cplx node_x(std::size_t i, std::size_t j, std::size_t k) const;

  /// Interpolated value at a point of the box (x complex, t the ray parameter r).
  cplx eval(cplx x, double t) const;

  double norm_nu = 0.0;
  SolveDiagnostics diagnostics;
  std::string interpolation_label() const;

 private:
  GoursatDomain d_;
  num::Axis ax_xi_, ax_zeta_, ax_t_;
  std::vector<cplx> v_;
};

/// Field equal to f(x, r) at every node.
GridField make_field(const GoursatDomain& d, const std::function<cplx(cplx, double)>& f);

/// sup over nodes of |F| exp(-nu t).
double weighted_norm(const GridField& f, double nu);

/// The fixed-point map with its quadrature weights and potential samples cached.
class JOperator {
 public:
  /// k_eps = 0 uses V_0 only; k_eps >= 1 adds the eps^k convolution terms up to k_eps.
  JOperator(const GoursatDomain& d, const Potential& p, int k_eps = 0);

  GridField apply(const GridField& f) const;
  /// Only the integral part (apply(f) - t); linear in f.
  GridField apply_linear(const GridField& f) const;
  const GoursatDomain& domain() const { return d_; }
  int k_eps() const { return k_eps_; }

 private:
  void accumulate(const GridField& f, GridField& out) const;
  GridField convolution_moment(const GridField& f, int k) const;

  GoursatDomain d_;
  int k_eps_ = 0;
  num::Axis ax_xi_, ax_zeta_, ax_t_;
  num::GaussRule gl_;
  num::GaussRule gl_conv_;
  std::vector<double> w_xi_;    // [i][a][p]
  std::vector<double> w_t_;     // [k][b][r]
  std::vector<double> w_zeta_;  // [j][k][a][b][q]
  std::vector<std::vector<cplx>> kernel_;  // per eps order: [i][j][k][a][b]
  std::vector<double> wc_t_;    // convolution: [k][g][r]
  std::vector<double> wc_zeta_; // convolution: [j][k][g][q]
};

GridField apply_J(const GridField& f, const Potential& p);
GridField apply_J_eps(const GridField& f, const Potential& p, int k_max);

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 200;
  int k_eps = 0;  // > 0 solves the eps-dependent equation truncated at this order
  std::optional<double> nu;  // default 4 ln(10) / T
  int max_escalations = 3;
};

/// Picard iteration Phi_{n+1} = J(Phi_n) from Phi_0 = t (or from `start`).
GridField solve_fixed_point(const Potential& p, const GoursatDomain& d, const SolveOptions& opt = {},
                            const GridField* start = nullptr);
GridField solve_fixed_point(const Potential& p, const GoursatDomain& d, double tol, int max_iter);

/// ||J(F) - J(G)||_nu / ||F - G||_nu over seeded smooth pseudo-random
/// perturbations (the largest ratio is returned).
double lipschitz_ratio(const JOperator& J, const GridField& base, double nu, std::uint64_t seed,
                       int samples = 2);

/// Psi on real x with its x and t derivatives, from the zeta = 0 slice.
/// Arguments t are ray parameters; derivatives are with respect to the complex t.
class PsiField {
 public:
  explicit PsiField(GridField f);

  double xi_max() const { return ax_xi_.hi(); }
  double T() const { return ax_t_.hi(); }
  double nu() const { return nu_; }
  int sign() const { return sign_; }
  const num::Axis& t_axis() const { return ax_t_; }

  cplx psi(double x, double t) const { return eval(p_, x, t); }
  cplx psi_x(double x, double t) const { return eval(px_, x, t); }
  cplx psi_t(double x, double t) const { return eval(pt_, x, t); }
  cplx psi_xx(double x, double t) const { return eval(pxx_, x, t); }
  cplx psi_xt(double x, double t) const { return eval(pxt_, x, t); }
  /// Complex x through the full field.
  cplx psi(cplx x, double t) const { return field_.eval(x, t); }
  const GridField& field() const { return field_; }

  /// Values of Psi (or one of its derivatives) at the t nodes for a given x.
  enum class Part { Psi, PsiX, PsiT };
  std::vector<cplx> line(double x, Part part) const;

  /// max over interior real nodes of |Psi_xx + 2 i sign Psi_xt - V Psi|, scaled by max |V Psi|.
  double pde_residual(const Potential& p) const;

 private:
  cplx eval(const std::vector<cplx>& s, double x, double t) const;
  GridField field_;
  num::Axis ax_xi_, ax_t_;
  std::vector<cplx> p_, px_, pt_, pxx_, pxt_;  // [i][k]
  double nu_;
  int sign_;
};

/// Phi_s and Phi_t in bicharacteristic coordinates from the real-x derivatives.
struct PhiDerivatives {
  cplx phi_s;
  cplx phi_t;
};
PhiDerivatives phi_derivatives(const PsiField& psi, double x, double t);

/// Taylor coefficients c_k of Psi(x, t) = sum_k c_k t^k at real x, k < count, from
/// `rays` solves on equally spaced rays and the discrete Cauchy sum on |t| = radius.
struct TaylorOptions {
  double radius = 0.3;
  std::size_t rays = 12;
  std::size_t n_xi = 13;
  std::size_t n_zeta = 8;
  std::size_t n_t = 12;
  std::size_t quad_order = 12;
  double tol = 1e-14;
};
std::vector<cplx> borel_taylor(const Potential& p, double x, std::size_t count, const TaylorOptions& opt = {});

/// Stable fingerprint of a potential, stored in checkpoints.
std::string potential_hash(const Potential& p);

/// Text checkpoint: "key=value" header, a line "data", then "i j k re im" rows.
void write_checkpoint(const GridField& f, const std::string& potential_hash, std::ostream& os);
void write_checkpoint(const GridField& f, const std::string& potential_hash, const std::string& path);
struct Checkpoint {
  GridField field;
  std::string potential_hash;
  int iterations = 0;
};
Checkpoint read_checkpoint(std::istream& is);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace borelsum::goursat
