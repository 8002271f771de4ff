#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace borelsum {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

namespace num {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t order);

/// Chebyshev-Lobatto points x_j = (a+b)/2 - (b-a)/2 cos(pi j / (n-1)), ascending.
std::vector<double> chebyshev_lobatto(std::size_t n, double a, double b);

enum class InterpKind { Chebyshev, LocalCubic };

/// One interpolation axis: node set plus the rule for off-node weights.
class Axis {
 public:
  Axis() = default;
  Axis(std::size_t n, double a, double b, InterpKind kind = InterpKind::Chebyshev);

  std::size_t size() const { return nodes_.size(); }
  double lo() const { return a_; }
  double hi() const { return b_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  InterpKind kind() const { return kind_; }

  /// Dense row w with f(x) ~ sum_j w[j] f(x_j). Throws DomainEscape if x is
  /// outside [lo, hi] by more than a relative 1e-12.
  void weights(double x, std::span<double> out) const;
  std::vector<double> weights(double x) const;

  /// Spectral differentiation matrix (row-major, n x n) for the Chebyshev nodes.
  const std::vector<double>& diff_matrix() const { return diff_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> bary_;
  std::vector<double> diff_;
  double a_ = 0.0;
  double b_ = 1.0;
  InterpKind kind_ = InterpKind::Chebyshev;
};

/// Chebyshev series on [a, b], coefficients of T_k((2x - a - b)/(b - a)).
class ChebSeries {
 public:
  ChebSeries() = default;
  ChebSeries(double a, double b, std::vector<cplx> coeffs)
      : a_(a), b_(b), c_(std::move(coeffs)) {}

  /// Interpolant through samples at chebyshev_lobatto(n, a, b).
  static ChebSeries from_lobatto_values(double a, double b, std::span<const cplx> values);
  static ChebSeries from_function(double a, double b, std::size_t n,
                                  const std::function<cplx(double)>& f);

  cplx operator()(double x) const;
  ChebSeries derivative() const;
  /// Antiderivative vanishing at x0.
  ChebSeries integral(double x0) const;
  std::vector<cplx> values_at_lobatto(std::size_t n) const;
  /// Monomial coefficients of the polynomial expanded about x = a.
  std::vector<cplx> taylor_at_lower(std::size_t count) const;

  double lo() const { return a_; }
  double hi() const { return b_; }
  const std::vector<cplx>& coeffs() const { return c_; }

 private:
  double a_ = -1.0;
  double b_ = 1.0;
  std::vector<cplx> c_;
};

/// lambda * int_0^T exp(-lambda t) f(t) dt on geometrically growing Gauss-Legendre
/// panels starting at width 1/lambda; err_estimate compares two rule orders.
struct LaplaceValue {
  cplx value;
  double err_estimate = 0.0;
};
LaplaceValue laplace(const std::function<cplx(double)>& f, double lambda, double T,
                     std::size_t order = 20);

/// Number of worker threads used by parallel_for (>= 1).
void set_threads(unsigned n);
unsigned threads();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker
/// and results must be written to disjoint locations.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Slope and intercept of y ~ m x + c with the RMS residual.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace num
}  // namespace borelsum
