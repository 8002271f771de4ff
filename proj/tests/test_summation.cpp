#include <doctest.h>

#include <cmath>

#include "borelsum/error.hpp"
#include "borelsum/goursat.hpp"
#include "borelsum/oracle.hpp"
#include "borelsum/summation.hpp"

using namespace borelsum;
using summation::BorelFunction;

TEST_CASE("Laplace transform of monomials") {
  const double lambda = 10.0;
  double fact = 1.0;
  for (int k = 1; k <= 8; ++k) {
    if (k > 1) fact *= k - 1;
    const auto F = BorelFunction::from_function(10.0, 48, [&](double t) { return cplx(std::pow(t, k - 1) / fact); });
    CHECK(std::abs(F.laplace(lambda) - std::pow(lambda, -k)) <= 1e-14);
  }
}

TEST_CASE("convolution algebra") {
  const double T = 4.0;
  const auto F = BorelFunction::from_function(T, 32, [](double t) { return cplx(1.0 + t, 0.5 * t * t); });
  const auto G = BorelFunction::from_function(T, 32, [](double t) { return cplx(2.0 - t, 0.0); });
  const auto H = BorelFunction::from_function(T, 32, [](double t) { return cplx(0.0, t * t * t); });
  CHECK(summation::convolve(summation::convolve(F, G), H).sup_distance(summation::convolve(F, summation::convolve(G, H))) <
        1e-10);
  CHECK(summation::convolve(F, G + H).sup_distance(summation::convolve(F, G) + summation::convolve(F, H)) < 1e-10);
  // 1 * 1 = t
  const auto one = BorelFunction::from_function(T, 32, [](double) { return cplx(1.0); });
  const auto t = BorelFunction::from_function(T, 32, [](double s) { return cplx(s); });
  CHECK(summation::convolve(one, one).sup_distance(t) < 1e-13);
}

TEST_CASE("reciprocal of a constant Borel function") {
  const double c = 0.7;
  const auto F = BorelFunction::from_function(8.0, 48, [&](double) { return cplx(c); });
  const auto inv = summation::borel_inverse(F);
  const auto expected = BorelFunction::from_function(8.0, 48, [&](double t) { return cplx(std::exp(-c * t)); });
  CHECK(inv.G.sup_distance(expected) < 1e-10);
  CHECK(summation::inverse_certificate(F, inv.G, {10.0, 30.0, 100.0}) < 1e-8);
}

TEST_CASE("constant potential solution pair") {
  goursat::GoursatDomain d;
  const auto f = goursat::solve_fixed_point(potentials::constant(1.0), d);
  const goursat::PsiField P(f);
  const double lambda = 10.0;
  const auto r = summation::laplace_quadrature(P, 0.3, lambda);
  const cplx exact = oracle::constant_V_exact(1.0, lambda, 0.3);
  CHECK(std::abs(r.value - exact) <= 1e-6 * std::abs(exact));
  CHECK(r.error_budget() < 1e-8);
  const auto pair = summation::build_solution_pair(P, nullptr, lambda, {-0.5, 0.0, 0.3});
  CHECK(std::abs(pair.phi_plus[1] - 1.0 / lambda) < 1e-14);
  CHECK(pair.conjugated);
  CHECK(pair.conjugacy_residual() == 0.0);
  CHECK(pair.wronskian_drift() < 1e-8);
  bool thrown = false;
  try {
    summation::laplace_quadrature(P, 0.3, 0.5 * P.nu());
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::AbscissaViolation;
  }
  CHECK(thrown);
}

TEST_CASE("independent minus branch agrees with conjugation") {
  const auto V = potentials::inverse_quadratic();
  goursat::GoursatDomain d;
  const goursat::PsiField plus(goursat::solve_fixed_point(V, d));
  d.sign = -1;
  const goursat::PsiField minus(goursat::solve_fixed_point(V, d));
  const std::vector<double> xs{-0.6, 0.0, 0.4};
  const auto pair = summation::build_solution_pair(plus, &minus, 20.0, xs);
  CHECK_FALSE(pair.conjugated);
  CHECK(pair.conjugacy_residual() < 1e-10 * std::abs(pair.phi_plus[1]));
  // inverse certificate on a Borel function taken from the solve
  const auto F = BorelFunction::from_function(d.T, 40, [&](double t) { return plus.psi_t(0.4, t) - 1.0; });
  const auto inv = summation::borel_inverse(F);
  CHECK(summation::inverse_certificate(F, inv.G, {10.0, 30.0, 100.0}) < 1e-8);
}
