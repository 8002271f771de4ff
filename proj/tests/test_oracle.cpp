#include <doctest.h>

#include <cmath>
#include <sstream>

#include "borelsum/oracle.hpp"

using namespace borelsum;

TEST_CASE("closed form for a constant potential") {
  const double lam = 10.0, x = 0.3;
  CHECK(std::abs(oracle::constant_V_exact(1.0, lam, x) - std::exp(kI * (std::sqrt(99.0) - 10.0) * 0.3) / lam) < 1e-16);
  const auto s = oracle::constant_V_solution(1.0, lam, 0.2, kI, 0.0);
  CHECK(std::abs(s.psi - 0.2) < 1e-15);
  CHECK(std::abs(s.dpsi - kI) < 1e-15);
}

TEST_CASE("integrator against the constant-potential solution") {
  const double c = 1.0, lam = 15.0;
  const cplx psi0 = 1.0 / lam, dpsi0 = 0.3 * kI + 0.2;
  const auto tr = oracle::integrate(potentials::constant(c), lam, psi0, dpsi0, -0.8, 0.8, 17);
  REQUIRE(tr.x.size() == 17);
  for (std::size_t m = 0; m < tr.x.size(); ++m) {
    const auto ex = oracle::constant_V_solution(c, lam, psi0, dpsi0, tr.x[m]);
    CHECK(std::abs(tr.psi[m] - ex.psi) <= 1e-10 * std::abs(ex.psi));
    CHECK(std::abs(tr.dpsi[m] - ex.dpsi) <= 1e-10 * std::abs(ex.dpsi));
  }
}

TEST_CASE("wronskian is conserved") {
  const auto V = potentials::inverse_quadratic();
  const std::vector<double> xs{-0.8, -0.2, 0.0, 0.5, 0.8};
  const auto a = oracle::integrate(V, 20.0, 1.0, 0.0, xs);
  const auto b = oracle::integrate(V, 20.0, 0.0, 1.0, xs);
  const auto w = oracle::wronskian(a, b);
  for (const auto& v : w) CHECK(std::abs(v - 1.0) < 1e-10);
  std::ostringstream os;
  a.write_csv(os);
  CHECK(os.str().rfind("x,re_psi,im_psi,re_dpsi,im_dpsi", 0) == 0);
}
