#include <doctest.h>

#include <cmath>

#include "borelsum/goursat.hpp"
#include "borelsum/invariants.hpp"
#include "borelsum/oracle.hpp"
#include "borelsum/summation.hpp"

using namespace borelsum;

namespace {

summation::SolutionPair pair_for(const Potential& V, double lam, const std::vector<double>& xs) {
  const goursat::PsiField P(goursat::solve_fixed_point(V, goursat::GoursatDomain{}));
  return summation::build_solution_pair(P, nullptr, lam, xs);
}

std::vector<double> line(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int m = 0; m < n; ++m) xs.push_back(lo + (hi - lo) * m / (n - 1));
  return xs;
}

}  // namespace

TEST_CASE("plane waves") {
  const double lam = 10.0;
  const auto xs = line(-0.8, 0.8, 17);
  const auto pair = pair_for(potentials::zero(), lam, xs);
  const auto a = invariants::decompose(pair, 1.0 / lam, kI);
  CHECK(std::abs(a.C1 - 1.0) < 1e-12);
  CHECK(std::abs(a.C2) < 1e-12);
  const auto b = invariants::decompose(pair, 2.0 / lam, 0.0);
  CHECK(std::abs(b.C1 - 1.0) < 1e-12);
  CHECK(std::abs(b.C2 - 1.0) < 1e-12);

  std::vector<cplx> psi, dpsi;
  for (double x : xs) {
    psi.push_back(2.0 * std::cos(lam * x) / lam);
    dpsi.push_back(-2.0 * std::sin(lam * x));
  }
  const auto rep = invariants::compute_C(pair, psi, dpsi);
  for (const auto& C : rep.C) CHECK(std::abs(C - 1.0) < 1e-12);

  std::vector<cplx> single, dsingle;
  for (double x : xs) {
    single.push_back(std::exp(kI * lam * x) / lam);
    dsingle.push_back(kI * std::exp(kI * lam * x));
  }
  for (const auto& C : invariants::compute_C(pair, single, dsingle).C) CHECK(std::abs(C) < 1e-12);
}

TEST_CASE("invariance along an oracle trajectory") {
  const auto V = potentials::inverse_quadratic();
  const double lam = 15.0;
  const auto xs = line(-0.8, 0.8, 33);
  const auto pair = pair_for(V, lam, xs);
  const auto tr = oracle::integrate(V, lam, 1.0 / lam, kI, xs);
  const auto rep = invariants::compute_C(pair, tr.psi, tr.dpsi);
  CHECK(rep.drift <= 1e-6);
  CHECK(rep.wronskian_drift <= 1e-8);

  // bilinear in psi
  std::vector<cplx> p3, d3;
  for (std::size_t m = 0; m < xs.size(); ++m) {
    p3.push_back(3.0 * tr.psi[m]);
    d3.push_back(3.0 * tr.dpsi[m]);
  }
  const auto rep3 = invariants::compute_C(pair, p3, d3);
  CHECK(std::abs(rep3.C_median / 9.0 - rep.C_median) <= 1e-12 * std::abs(rep.C_median));

  const auto amp = invariants::decompose(pair, 1.0 / lam, kI);
  const auto rec = invariants::reconstruct(pair, amp);
  for (std::size_t m = 0; m < xs.size(); ++m) CHECK(std::abs(rec.psi[m] - tr.psi[m]) <= 1e-6 * std::abs(tr.psi[m]));
}

TEST_CASE("pendulum leading term") {
  CHECK(invariants::pendulum_leading(0.0, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(invariants::pendulum_leading(1.0, 0.0, 2.0) == doctest::Approx(0.0625).epsilon(1e-15));
  const auto spec = potentials::pendulum_sin(2.0, 1.0);
  const auto st = invariants::pendulum_state(spec, 0.05, 1.0, 1.0);
  // omega(0) = 2: psi = sqrt(2) x
  CHECK(std::abs(st.psi - std::sqrt(2.0)) < 1e-14);
  CHECK(st.leading == doctest::Approx(invariants::pendulum_leading(1.0, 1.0, 2.0) * 2.0).epsilon(1e-12));
}
