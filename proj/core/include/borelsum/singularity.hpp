#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "borelsum/goursat.hpp"
#include "borelsum/numerics.hpp"

namespace borelsum::singularity {

/// How the kernel argument is scaled: Half uses V(i(s - t)/2) = (i(s - t)/2)^-beta V1(i(s - t)/2),
/// EqH uses V1(i(s - t)) / (s - t)^beta.
enum class KernelConvention { Half, EqH };

/// Branch-point potential V(x) = x^-beta V1(x) with V1 analytic.
/// beta = 0 is accepted as the analytic control case.
struct BranchSpec {
  double beta = 0.5;
  std::function<cplx(cplx)> V1 = [](cplx) { return cplx{1.0, 0.0}; };
  cplx v0 = 1.0;  // V1(0)
  std::string v1_label = "one";
  KernelConvention convention = KernelConvention::Half;

  void validate() const;
  /// Kernel on the real sheet, u = s - t > 0 (principal branch).
  cplx kernel(double u) const;
  /// Coefficient of u^-beta in kernel(u) as u -> 0.
  cplx v0_effective() const;
  /// Grading exponent m with m * beta integral for beta in {1/4, 1/2}, else 1.
  int grading() const;
};

/// Catalog: "one" (V1 = 1), "exp" (V1 = exp(x)), "cos" (V1 = cos(x)), each times `scale`.
BranchSpec branch_spec(double beta, const std::string& v1, cplx scale = 1.0,
                       KernelConvention convention = KernelConvention::Half);

/// Graded box 0 <= t <= tau, t <= s <= S with t = tau w^m, s - t = (S - t) v^m.
struct BranchGrid {
  double tau = 0.1;
  double S = 1.5;
  std::size_t n_v = 24;
  std::size_t n_w = 24;
  std::size_t quad_order = 16;
  int grading = 0;  // 0: from the spec
};

class BranchField {
 public:
  BranchField(BranchSpec spec, BranchGrid grid);

  const BranchSpec& spec() const { return spec_; }
  const BranchGrid& grid() const { return grid_; }
  int grading() const { return m_; }
  std::size_t size() const { return v_.size(); }
  std::vector<cplx>& samples() { return v_; }
  const std::vector<cplx>& samples() const { return v_; }
  /// (s, t) of node (i, j), i along v, j along w.
  std::pair<double, double> node(std::size_t i, std::size_t j) const;

  /// Phi(s, t) on the real sheet; throws DomainEscape outside the box and BranchCut for s < t.
  cplx eval(double s, double t) const;

  goursat::SolveDiagnostics diagnostics;

 private:
  friend class BranchOperator;
  BranchSpec spec_;
  BranchGrid grid_;
  int m_;
  num::Axis ax_v_, ax_w_;
  std::vector<cplx> v_;  // [i][j]
};

/// J(Phi)(s, t) = t + (1/4) int_0^t int_t^s K(s1 - t1) Phi(s1, t1) ds1 dt1, assembled as a dense
/// matrix on the nodes. The corner s1 = t1 = t is handled by a graded Duffy split.
class BranchOperator {
 public:
  BranchOperator(const BranchSpec& spec, const BranchGrid& grid);
  BranchField apply(const BranchField& f) const;
  std::size_t quadrature_points() const { return points_; }

 private:
  BranchField proto_;
  std::vector<cplx> M_;  // N x N
  std::size_t points_ = 0;
};

/// Picard iteration from Phi_0 = t.
BranchField solve_branch_fixed_point(const BranchSpec& spec, const BranchGrid& grid = {}, double tol = 1e-14,
                                     int max_iter = 200);
/// t + J t.
BranchField first_iterate(const BranchSpec& spec, const BranchGrid& grid = {});

/// t + (v0/4){ s(s^{2-b} - (s-t)^{2-b})/D3 - (s-t)^{2-b} t/D2 - t^{3-b}/D3 },
/// D3 = (1-b)(2-b)(3-b), D2 = (1-b)(3-b), v0 the effective kernel constant.
cplx leading_expansion(const BranchSpec& spec, cplx s, cplx t);
/// leading_expansion without the t^{3-b} term.
cplx leading_analytic_part(const BranchSpec& spec, cplx s, cplx t);

struct ExponentFit {
  double exponent = 0.0;
  cplx amplitude = 0.0;
  double residual = 0.0;  // relative least-squares residual
  bool singular = false;
  std::string status;
  std::vector<double> t;
  std::vector<double> remainder;  // |Phi - analytic part|
  void write_json(std::ostream& os) const;
  void write_csv(std::ostream& os) const;
};

/// Fit of R(t) = Phi(s, t) - leading_analytic_part on [t_lo, t_hi]. A polynomial c3 t^3 + c4 t^4 + c5 t^5
/// fitting to 1e-6 means no singularity; otherwise A t^p + B t^3 + C t^{p+1} is fitted by variable projection.
/// Throws FitUnstable when neither model fits.
ExponentFit fit_singularity_exponent(const BranchField& f, double s_fixed, double t_lo = 0.01, double t_hi = 0.05,
                                     std::size_t samples = 24);

/// Least-squares slope of log|Phi - leading_expansion| against log t.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
SlopeFit remainder_order(const BranchField& f, double s_fixed, double t_lo = 0.01, double t_hi = 0.05,
                         std::size_t samples = 12);

/// Third divided differences of Phi in t at fixed s on a geometric sequence t -> 0+; the fitted rate is
/// the log-log slope (expected -beta).
struct Witness {
  double rate = 0.0;
  std::vector<double> t;
  std::vector<double> third_derivative;
};
Witness nonanalyticity_witness(const BranchField& f, double s_fixed, double t_lo = 2e-4, double t_hi = 4e-3,
                               std::size_t samples = 8);

}  // namespace borelsum::singularity
