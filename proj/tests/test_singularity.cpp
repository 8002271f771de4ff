#include <doctest.h>

#include <cmath>

#include "borelsum/error.hpp"
#include "borelsum/singularity.hpp"

using namespace borelsum;
using singularity::KernelConvention;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("leading expansion for beta = 1/2") {
  const auto spec = singularity::branch_spec(0.5, "one", 1.0, KernelConvention::EqH);
  CHECK(spec.v0_effective() == cplx(1.0));
  // D3 = 15/8, D2 = 5/4
  const double s = 1.0, t = 0.1, u = s - t;
  const double hand =
      t + 0.25 * (s * (std::pow(s, 1.5) - std::pow(u, 1.5)) / 1.875 - std::pow(u, 1.5) * t / 1.25 - std::pow(t, 2.5) / 1.875);
  CHECK(std::abs(singularity::leading_expansion(spec, s, t) - hand) < 1e-15);
  CHECK(std::abs(singularity::leading_expansion(spec, s, t) - 0.101993401181) < 1e-12);
  CHECK(std::abs(singularity::leading_analytic_part(spec, s, t) - (hand + 0.25 * std::pow(t, 2.5) / 1.875)) < 1e-15);
}

TEST_CASE("first iterate matches the closed form for V1 = 1") {
  const auto eqh = singularity::first_iterate(singularity::branch_spec(0.5, "one", 1.0, KernelConvention::EqH));
  CHECK(std::abs(eqh.eval(1.0, 0.1) - (0.1 + 0.001993401181)) < 1e-11);
  const auto half = singularity::first_iterate(singularity::branch_spec(0.5, "one"));
  CHECK(std::abs(half.eval(1.0, 0.1) - (0.1 + cplx(0.001993401181, -0.001993401181))) < 1e-11);
}

TEST_CASE("vanishing V1 leaves Phi = t") {
  const auto f = singularity::solve_branch_fixed_point(singularity::branch_spec(0.5, "one", 0.0));
  for (double t : {0.0, 0.02, 0.07}) CHECK(std::abs(f.eval(1.2, t) - t) < 1e-15);
}

TEST_CASE("exponent fit recovers 3 - beta") {
  for (const char* v1 : {"one", "exp", "cos"}) {
    for (double beta : {0.5, 0.25}) {
      const auto f = singularity::solve_branch_fixed_point(singularity::branch_spec(beta, v1));
      CHECK(f.diagnostics.converged);
      const auto fit = singularity::fit_singularity_exponent(f, 1.0);
      CHECK(fit.singular);
      CHECK(std::abs(fit.exponent - (3.0 - beta)) <= 0.01);
    }
  }
}

TEST_CASE("analytic control is not reported as singular") {
  const auto f = singularity::solve_branch_fixed_point(singularity::branch_spec(0.0, "one"));
  const auto fit = singularity::fit_singularity_exponent(f, 1.0);
  CHECK_FALSE(fit.singular);
  CHECK(fit.status.find("no singularity") != std::string::npos);
}

TEST_CASE("remainder and nonanalyticity witness") {
  const auto f = singularity::solve_branch_fixed_point(singularity::branch_spec(0.5, "one"));
  CHECK(singularity::remainder_order(f, 1.0).slope >= 2.8);
  const auto w = singularity::nonanalyticity_witness(f, 1.0);
  CHECK(std::abs(w.rate + 0.5) <= 0.15 * 0.5);
}

TEST_CASE("domain errors") {
  const auto f = singularity::first_iterate(singularity::branch_spec(0.5, "one"));
  CHECK(code_of([&] { f.eval(0.05, 0.08); }) == ErrorCode::BranchCut);
  CHECK(code_of([&] { f.eval(2.0, 0.05); }) == ErrorCode::DomainEscape);
  CHECK(code_of([] { singularity::branch_spec(1.2, "one").validate(); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { singularity::branch_spec(0.5, "sinh"); }) == ErrorCode::InvalidArgument);
}
