#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "borelsum/goursat.hpp"
#include "borelsum/numerics.hpp"

namespace borelsum::summation {

struct LaplaceResult {
  cplx value;
  double quad_error = 0.0;
  double tail_bound = 0.0;  // lambda M exp((nu - lambda) T) / (lambda - nu)
  double error_budget() const { return quad_error + tail_bound; }
};

/// lambda * int_0^T exp(-lambda t) Psi(x, t) dt (or the same for Psi_x / Psi_t).
/// Throws AbscissaViolation unless lambda > nu of the field.
LaplaceResult laplace_quadrature(const goursat::PsiField& psi, double x, double lambda,
                                 goursat::PsiField::Part part = goursat::PsiField::Part::Psi);

/// phi_+, phi_- and A = phi_+' + i lambda phi_+, B = phi_-' - i lambda phi_- on real x.
struct SolutionPair {
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<cplx> phi_plus, phi_minus, A, B;
  double tail_bound = 0.0;
  double quad_error = 0.0;
  bool conjugated = false;  // minus branch produced by conjugation

  /// phi_+ B - phi_- A at sample n.
  cplx determinant(std::size_t n) const { return phi_plus[n] * B[n] - phi_minus[n] * A[n]; }
  /// max |D(x) - D(x_ref)| / |D(x_ref)|, x_ref the sample closest to 0.
  double wronskian_drift() const;
  /// max |phi_- - conj(phi_+)|.
  double conjugacy_residual() const;
  /// Rows "x,re_phi_plus,im_phi_plus,re_phi_minus,im_phi_minus,re_A,im_A,re_B,im_B".
  void write_csv(std::ostream& os) const;
};

/// `minus` may be null, in which case phi_- = conj(phi_+) and B = conj(A) (real V only).
SolutionPair build_solution_pair(const goursat::PsiField& plus, const goursat::PsiField* minus, double lambda,
                                 const std::vector<double>& x);

/// Borel-plane function sampled on Chebyshev-Lobatto points of [0, T].
class BorelFunction {
 public:
  BorelFunction() = default;
  BorelFunction(double T, std::vector<cplx> values, double nu_bound = 0.0);
  static BorelFunction from_function(double T, std::size_t n, const std::function<cplx(double)>& f,
                                     double nu_bound = 0.0);

  double T() const { return T_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double nu_bound() const { return nu_bound_; }
  cplx operator()(double t) const { return series_(t); }
  /// int_0^T exp(-lambda t) F(t) dt (no lambda prefactor).
  cplx laplace(double lambda) const;
  /// sup (A + t)^2 |F| exp(-nu t) over the nodes.
  double weighted_norm(double A_weight, double nu) const;

  BorelFunction operator+(const BorelFunction& o) const;
  BorelFunction operator-(const BorelFunction& o) const;
  double sup_distance(const BorelFunction& o) const;

 private:
  double T_ = 1.0;
  std::vector<double> nodes_;
  std::vector<cplx> values_;
  num::ChebSeries series_;
  double nu_bound_ = 0.0;
};

/// (F*G)(t) = int_0^t F(q) G(t - q) dq at every node.
BorelFunction convolve(const BorelFunction& F, const BorelFunction& G);

struct BorelInverse {
  BorelFunction G;
  int iterations = 0;
  double A_weight = 0.0;
  double nu = 0.0;
  double increment = 0.0;
};

/// Solves G = 1 - F*G by Picard iteration in the (A + t)^2 exp(-nu t) weighted norm.
/// A_weight <= 0 picks max(10, 2 C) with C measured from one convolution.
BorelInverse borel_inverse(const BorelFunction& F, double A_weight = 0.0, double nu = 1.0, double tol = 1e-14,
                           int max_iter = 200);

/// max over lambdas of |L G (1 + L F) - 1/lambda|.
double inverse_certificate(const BorelFunction& F, const BorelFunction& G, const std::vector<double>& lambdas);

}  // namespace borelsum::summation
