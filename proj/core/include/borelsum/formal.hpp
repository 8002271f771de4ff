#pragma once

#include <iosfwd>
#include <vector>

#include "borelsum/numerics.hpp"
#include "borelsum/potentials.hpp"

namespace borelsum::formal {

/// Real x-grid for the coefficient functions: Chebyshev-Lobatto points on [lo, hi], 0 inside.
struct SeriesGrid {
  double lo = -0.9;
  double hi = 0.9;
  std::size_t points = 65;
};

/// a_K(x), ..., a_{K+count-1}(x) of phi = sum a_k(x) lambda^-k dressing exp(sign i lambda x).
class FormalSeries {
 public:
  FormalSeries(int sign, SeriesGrid grid, std::vector<num::ChebSeries> coeffs, double residual);

  int sign() const { return sign_; }
  int start_index() const { return 1; }
  std::size_t count() const { return coeffs_.size(); }
  int k_max() const { return static_cast<int>(coeffs_.size()); }
  const SeriesGrid& grid() const { return grid_; }
  std::vector<double> nodes() const;

  /// a_k(x) for 1 <= k <= k_max.
  cplx coefficient(int k, double x) const;
  cplx derivative(int k, double x) const;
  const num::ChebSeries& coefficient_series(int k) const;
  /// sum_{k <= m} a_k(x) lambda^-k.
  cplx partial_sum(double x, double lambda, int m) const;
  /// Max recursion residual relative to the size of its terms.
  double recursion_residual() const { return residual_; }

  /// CSV rows "k,x,re,im" on the grid nodes.
  void write_csv(std::ostream& os) const;

 private:
  int sign_;
  SeriesGrid grid_;
  std::vector<num::ChebSeries> coeffs_;
  double residual_;
};

/// Recursion a_{k+1}' = sign (V a_k - a_k'') / (2i), a_1 = 1, a_k(0) = 0 for k >= 2.
/// Throws GridTooCoarse when the residual on a refined check grid exceeds tol.
FormalSeries wkb_coefficients(const Potential& p, int sign, int k_max, const SeriesGrid& grid = {},
                              double tol = 1e-9);

/// Truncated Borel transform Y(t) = sum_k y_k t^(k-1)/(k-1)!.
class BorelPolynomial {
 public:
  explicit BorelPolynomial(std::vector<cplx> y) : y_(std::move(y)) {}
  cplx operator()(double t) const;
  int degree() const { return static_cast<int>(y_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return y_; }

 private:
  std::vector<cplx> y_;
};

BorelPolynomial borel_transform(const FormalSeries& s, double x);

/// Laplace quadrature of the truncated Borel transform (K = 1 so no polynomial part).
cplx resum_series(const FormalSeries& s, double x, double lambda, double T);

/// Scalar series sum_{k >= start} c_k lambda^-k.
struct ScalarSeries {
  int start_index = 0;
  std::vector<cplx> coeffs;
};

/// Expansion of the invariant C for a state with psi = lambda_psi / lambda and psi' = dpsi
/// held fixed: returns c_0 (and c_1 when orders == 2).
ScalarSeries invariant_series_leading(double x, cplx lambda_psi, cplx dpsi, const FormalSeries& plus,
                                      const FormalSeries& minus, int orders);
ScalarSeries invariant_series_leading(double x, cplx lambda_psi, cplx dpsi, const Potential& p, int orders);

/// Fit of log(|a_k(x)| / k!) ~ log A + k log rho over 2 <= k <= k_max.
struct GevreyFit {
  double A = 0.0;
  double rho = 0.0;
  double rms_residual = 0.0;
};
GevreyFit gevrey_fit(const FormalSeries& s, double x);

}  // namespace borelsum::formal
