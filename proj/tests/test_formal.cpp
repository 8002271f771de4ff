#include <doctest.h>
#include <algorithm>
#include <sstream>

#include <cmath>

#include "borelsum/error.hpp"
#include "borelsum/formal.hpp"
#include "borelsum/oracle.hpp"

using namespace borelsum;

// a_k(x) of 1/(x^2 - 4), sign +1, from an independent 40-digit power-series recursion
static const cplx kA05[] = {{1.0, 0.0},
                            {0.0, 0.06385320297074884},
                            {-0.00620528243147849, 0.0},
                            {0.0, -0.013277080542839543},
                            {0.005369040612992965, 0.0}};
static const cplx kA03[] = {{1.0, 0.0},
                            {0.0, 0.0377851089841167},
                            {-0.0021524761563019904, 0.0},
                            {0.0, -0.007348759579434132},
                            {0.0017578192506343497, 0.0}};

TEST_CASE("catalog coefficients match the high-precision recursion") {
  const auto s = formal::wkb_coefficients(potentials::inverse_quadratic(), 1, 8);
  CHECK(s.recursion_residual() < 1e-9);
  for (int k = 1; k <= 5; ++k) {
    CHECK(std::abs(s.coefficient(k, 0.5) - kA05[k - 1]) <= 1e-10 * std::abs(kA05[k - 1]));
    CHECK(std::abs(s.coefficient(k, 0.3) - kA03[k - 1]) <= 1e-10 * std::abs(kA03[k - 1]));
  }
}

TEST_CASE("a_2 / a_1 is -(i/2) times the integral of V") {
  const auto plus = formal::wkb_coefficients(potentials::inverse_quadratic(), 1, 4);
  const auto minus = formal::wkb_coefficients(potentials::inverse_quadratic(), -1, 4);
  for (double x : {-0.7, 0.2, 0.5}) {
    const double iv = 0.25 * std::log((2.0 - x) / (2.0 + x));
    CHECK(std::abs(plus.coefficient(2, x) / plus.coefficient(1, x) - cplx(0.0, -0.5 * iv)) < 1e-12);
    CHECK(std::abs(minus.coefficient(2, x) / minus.coefficient(1, x) - cplx(0.0, 0.5 * iv)) < 1e-12);
    for (int k = 1; k <= 4; ++k) CHECK(std::abs(minus.coefficient(k, x) - std::conj(plus.coefficient(k, x))) < 1e-13);
  }
}

TEST_CASE("constant potential") {
  const double c = 1.0;
  const auto s = formal::wkb_coefficients(potentials::constant(c), 1, 8);
  for (double x : {-0.4, 0.3}) CHECK(std::abs(s.coefficient(2, x) - cplx(0.0, -c * x / 2.0)) < 1e-13);
  const auto Y = formal::borel_transform(s, 0.3);
  CHECK(std::abs(Y(0.0) - s.coefficient(1, 0.3)) < 1e-15);
  CHECK(std::abs(Y.coefficients()[1] - cplx(0.0, -0.15)) < 1e-13);
  const cplx r = formal::resum_series(s, 0.3, 10.0, 10.0);
  CHECK(std::abs(r - oracle::constant_V_exact(c, 10.0, 0.3)) <= std::pow(10.0, -9.0));
  CHECK(std::abs(s.partial_sum(0.3, 10.0, 8) - oracle::constant_V_exact(c, 10.0, 0.3)) <= std::pow(10.0, -9.0));
}

TEST_CASE("gevrey fit is finite and the CSV has one row per node and order") {
  const auto s = formal::wkb_coefficients(potentials::inverse_quadratic(), 1, 8);
  const auto g = formal::gevrey_fit(s, 0.5);
  CHECK(g.A > 0.0);
  CHECK(g.rho > 0.0);
  CHECK(std::isfinite(g.rms_residual));
  std::ostringstream os;
  s.write_csv(os);
  const std::string text = os.str();
  const auto rows = std::count(text.begin(), text.end(), '\n');
  CHECK(rows == static_cast<long>(1 + 8 * s.nodes().size()));
}

TEST_CASE("leading invariant term") {
  const auto V = potentials::zero();
  // psi = e^{i lambda x} / lambda has no minus component
  CHECK(std::abs(formal::invariant_series_leading(0.2, 1.0, kI, V, 1).coeffs.at(0)) < 1e-14);
  // (e^{i lambda x} + e^{-i lambda x}) / lambda
  CHECK(std::abs(formal::invariant_series_leading(0.0, 2.0, 0.0, V, 1).coeffs.at(0) - 1.0) < 1e-14);
  bool thrown = false;
  try {
    formal::invariant_series_leading(0.0, 0.0, 0.0, V, 1);
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::DegenerateState;
  }
  CHECK(thrown);
}
