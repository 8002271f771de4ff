#include <doctest.h>

#include <cmath>

#include "borelsum/error.hpp"
#include "borelsum/potentials.hpp"

using namespace borelsum;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("inverse quadratic: values, decay and reality") {
  const auto V = potentials::inverse_quadratic();
  CHECK(std::abs(V.eval(0.0) + 0.25) < 1e-15);
  CHECK(std::abs(V.eval(cplx(0.5, 0.0)) - 1.0 / (0.25 - 4.0)) < 1e-15);
  const auto& m = V.meta();
  CHECK(std::abs(V.eval(cplx(0.0, 1000.0))) <= m.decay_K * std::pow(1001.0, -1.0 - m.decay_delta));
  const auto audit = potentials::decay_audit(V);
  CHECK(audit.passes);
  CHECK(audit.worst_ratio <= 1.0);
  CHECK(potentials::reality_defect(V) <= 1e-14);
  CHECK(V.eps_order() == 0);
}

TEST_CASE("evaluation outside the strip is rejected") {
  const auto V = potentials::inverse_quadratic();
  CHECK(code_of([&] { V.eval(cplx(V.strip_halfwidth() + 0.1, 0.0)); }) == ErrorCode::StripViolation);
}

TEST_CASE("constant and zero potentials") {
  CHECK(potentials::zero().eval(cplx(0.3, 2.0)) == cplx{});
  CHECK(potentials::constant(1.5).eval(cplx(-0.2, 7.0)) == cplx(1.5, 0.0));
  // no decay at infinity
  CHECK_FALSE(potentials::decay_audit(potentials::constant(1.0)).passes);
}

TEST_CASE("eps-dependent rational series") {
  const auto V = potentials::rational_series({{{1.0}, {-4.0, 0.0, 1.0}}, {{2.0}, {1.0}}}, 2.0);
  CHECK(V.eps_order() == 1);
  CHECK(std::abs(V.coefficient(1, 0.3) - 2.0) < 1e-15);
  CHECK(std::abs(V.eval(0.0, 0.1) - (-0.25 + 0.2)) < 1e-15);
  CHECK(V.leading_order().eps_order() == 0);
}

TEST_CASE("pendulum potentials") {
  // omega = e^u at u = 0: omega = omega' = omega'' = 1, V = 1/2 - 3/4
  const auto Ve = potentials::pendulum_to_standard(potentials::pendulum_exp(1.0));
  CHECK(std::abs(Ve.eval(0.0) + 0.25) < 1e-12);
  const auto Vs = potentials::pendulum_to_standard(potentials::pendulum_sin(2.0, 1.0));
  // omega = 2, omega' = 1, omega'' = 0 at u = 0
  CHECK(std::abs(Vs.eval(0.0) + 0.75 / 16.0) < 1e-12);
  for (double x : {-0.8, -0.3, 0.0, 0.4, 0.8}) CHECK(std::isfinite(std::abs(Vs.eval(x))));
  CHECK(potentials::reality_defect(Vs) <= 1e-12);
}

TEST_CASE("phase map inverts") {
  potentials::PhaseMap map([](cplx u) { return 2.0 + std::sin(u); });
  for (double u : {-0.7, 0.0, 0.3, 0.9}) {
    CHECK(std::abs(map.inverse(map.phase(u)) - u) < 1e-12);
  }
  CHECK(std::abs(map.phase(1.0) - (2.0 + 1.0 - std::cos(1.0))) < 1e-13);
  potentials::PhaseMap bad([](cplx u) { return u; });
  CHECK(code_of([&] { bad.check_monotone(-1.0, 1.0); }) == ErrorCode::InversionFailure);
}

TEST_CASE("mathieu coefficients") {
  const auto c1 = potentials::mathieu_to_standard({0.0, 4.0, 1.0}, -0.5, 0.5);
  CHECK(std::abs(c1.q(0.0) - 1.0) < 1e-15);
  const auto c2 = potentials::mathieu_to_standard({1.0, 0.0, 1.0}, -0.5, 0.5);
  CHECK(std::abs(c2.q(0.5) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(c2.r(0.5) - 1.0) < 1e-15);
  CHECK(code_of([] { potentials::mathieu_to_standard({1.0, 0.0, 1.0}, -0.5, 1.0); }) ==
        ErrorCode::SingularInterval);
}

TEST_CASE("liouville normalization") {
  potentials::LiouvilleInput id;
  id.q = [](cplx) { return cplx(1.0); };
  id.r = [](cplx) { return cplx(0.0); };
  const auto r0 = potentials::liouville_normalize(id);
  CHECK(std::abs(r0.potential.eval(0.2)) < 1e-12);
  CHECK(std::abs(r0.map.phase(0.3) - 0.3) < 1e-13);

  potentials::LiouvilleInput shift = id;
  shift.r = [](cplx) { return cplx(0.7); };
  const auto r1 = potentials::liouville_normalize(shift);
  // eps^2 r / eps^2 lands in the eps-free part of V
  CHECK(r1.potential.eps_order() == 0);
  CHECK(std::abs(r1.potential.eval(0.1) + 0.7) < 1e-12);

  // q = (1 + s)^2: z = s + s^2/2, V = -(3/4) / (1 + 2z)^2
  potentials::LiouvilleInput sq = id;
  sq.q = [](cplx s) { return (1.0 + s) * (1.0 + s); };
  const auto r2 = potentials::liouville_normalize(sq);
  for (double z : {-0.3, 0.0, 0.2}) {
    CHECK(std::abs(r2.potential.eval(z) + 0.75 / ((1.0 + 2.0 * z) * (1.0 + 2.0 * z))) < 1e-9);
  }

  potentials::LiouvilleInput neg = id;
  neg.q = [](cplx s) { return s; };
  CHECK(code_of([&] { potentials::liouville_normalize(neg); }) == ErrorCode::NonPositiveQ);
}

TEST_CASE("cauchy derivatives") {
  const auto [d1, d2] = potentials::cauchy_derivatives([](cplx z) { return std::exp(2.0 * z); }, 0.1, 0.2);
  CHECK(std::abs(d1 - 2.0 * std::exp(0.2)) < 1e-12);
  CHECK(std::abs(d2 - 4.0 * std::exp(0.2)) < 1e-11);
}
