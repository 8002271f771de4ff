#include <doctest.h>

#include <cmath>
#include <sstream>

#include "borelsum/error.hpp"
#include "borelsum/formal.hpp"
#include "borelsum/goursat.hpp"

using namespace borelsum;
using goursat::GoursatDomain;

namespace {

GoursatDomain small_box() {
  GoursatDomain d;
  d.xi_max = 0.5;
  d.T = 4.0;
  d.n_xi = 11;
  d.n_zeta = 8;
  d.n_t = 12;
  return d;
}

double max_node_error(const goursat::GridField& g, const std::function<cplx(cplx, double)>& exact) {
  const auto& d = g.domain();
  double e = 0.0;
  for (std::size_t i = 0; i < d.n_xi; ++i)
    for (std::size_t j = 0; j < d.n_zeta; ++j)
      for (std::size_t k = 0; k < d.n_t; ++k)
        e = std::max(e, std::abs(g.at(i, j, k) - exact(g.node_x(i, j, k), g.t_axis()[k])));
  return e;
}

}  // namespace

TEST_CASE("J of the monomial t for a constant potential") {
  const double c = 1.3;
  for (int sign : {1, -1}) {
    GoursatDomain d = small_box();
    d.sign = sign;
    const auto f = goursat::make_field(d, [](cplx, double t) { return cplx(t); });
    const auto g = goursat::apply_J(f, potentials::constant(c));
    const double e = max_node_error(g, [&](cplx x, double t) {
      return t - static_cast<double>(sign) * kI * c * x * t * t / 4.0;
    });
    CHECK(e < 1e-13);
  }
}

TEST_CASE("first-order eps term on the monomial t") {
  // V_0 = 0, V_1 = 1: the convolution 1 * Phi = t^2 / 2 enters the characteristic integral
  const auto V = potentials::rational_series({{{0.0}, {1.0}}, {{1.0}, {1.0}}}, 1.0);
  const auto f = goursat::make_field(small_box(), [](cplx, double t) { return cplx(t); });
  const auto g = goursat::apply_J_eps(f, V, 1);
  CHECK(max_node_error(g, [](cplx x, double t) { return t - kI * x * t * t * t / 12.0; }) < 1e-13);
}

TEST_CASE("weighted norm") {
  GoursatDomain d;
  d.T = 10.0;
  const auto f = goursat::make_field(d, [](cplx, double t) { return cplx(t); });
  CHECK(goursat::weighted_norm(f, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
  CHECK(goursat::weighted_norm(f, 1.0) <= std::exp(-1.0));
  CHECK(goursat::weighted_norm(goursat::make_field(d, [](cplx, double) { return cplx(); }), 1.0) == 0.0);
}

TEST_CASE("fixed point of the catalog potential") {
  const auto V = potentials::inverse_quadratic();
  const GoursatDomain d;
  const auto f = goursat::solve_fixed_point(V, d);
  CHECK(f.diagnostics.converged);
  CHECK(f.diagnostics.fixed_point_residual < 1e-12);
  for (double r : f.diagnostics.contraction_ratios) CHECK(r < 1.0);
  for (std::size_t i = 0; i < d.n_xi; ++i)
    for (std::size_t j = 0; j < d.n_zeta; ++j) CHECK(std::abs(f.at(i, j, 0)) < 1e-15);
  const goursat::PsiField P(f);
  CHECK(P.pde_residual(V) < 1e-6);
  // interpolation reproduces node values
  CHECK(std::abs(f.eval(f.node_x(4, 3, 5), f.t_axis()[5]) - f.at(4, 3, 5)) < 1e-12);
}

TEST_CASE("contraction improves with the weight") {
  const auto V = potentials::inverse_quadratic();
  const GoursatDomain d;
  const goursat::JOperator J(d, V);
  const auto base = goursat::make_field(d, [](cplx, double t) { return cplx(t); });
  const double nu = 4.0 * std::log(10.0) / d.T;
  const double r1 = goursat::lipschitz_ratio(J, base, nu, 7);
  const double r2 = goursat::lipschitz_ratio(J, base, 2.0 * nu, 7);
  CHECK(r2 <= 0.75 * r1);
}

TEST_CASE("box validation") {
  GoursatDomain d;
  d.ray_angle = 0.5;
  bool thrown = false;
  try {
    d.validate(potentials::inverse_quadratic());
  } catch (const Error& e) {
    thrown = e.code() == ErrorCode::StripViolation;
  }
  CHECK(thrown);
  GoursatDomain e;
  e.n_t = 1;
  CHECK_THROWS_AS(e.validate(potentials::inverse_quadratic()), Error);
  GoursatDomain w;
  w.xi_max = 1.2;
  CHECK_THROWS_AS(w.validate(potentials::inverse_quadratic()), Error);
}

TEST_CASE("Taylor coefficients of Psi in t match the formal series") {
  const auto V = potentials::inverse_quadratic();
  const auto s = formal::wkb_coefficients(V, 1, 6);
  const auto c = goursat::borel_taylor(V, 0.5, 7);
  double fact = 1.0;
  for (int k = 1; k <= 6; ++k) {
    fact *= k;
    const cplx expected = s.coefficient(k, 0.5) / fact;
    CHECK(std::abs(c[static_cast<std::size_t>(k)] - expected) <= 1e-4 * std::abs(expected));
  }
}

TEST_CASE("checkpoint round trip") {
  const auto V = potentials::inverse_quadratic();
  const auto f = goursat::solve_fixed_point(V, small_box());
  const std::string hash = goursat::potential_hash(V);
  CHECK(hash.size() == 16);
  CHECK(hash != goursat::potential_hash(potentials::constant(1.0)));
  std::stringstream ss;
  goursat::write_checkpoint(f, hash, ss);
  const auto ck = goursat::read_checkpoint(ss);
  CHECK(ck.potential_hash == hash);
  CHECK(ck.iterations == f.diagnostics.iterations);
  CHECK(ck.field.domain().n_t == f.domain().n_t);
  CHECK(ck.field.domain().T == f.domain().T);
  CHECK(ck.field.samples() == f.samples());
  // resuming from a converged field finishes in one step
  const auto again = goursat::solve_fixed_point(V, small_box(), goursat::SolveOptions{}, &ck.field);
  CHECK(again.diagnostics.iterations == f.diagnostics.iterations + 1);

  std::stringstream broken("not a checkpoint\n");
  CHECK_THROWS_AS(goursat::read_checkpoint(broken), Error);
}
