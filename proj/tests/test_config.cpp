#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "borelsum/config.hpp"
#include "borelsum/error.hpp"

using namespace borelsum;
namespace fs = std::filesystem;

namespace {

config::RunConfig from_text(const std::string& text) {
  std::istringstream is(text);
  return config::from_key_values(config::KeyValue::parse(is));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "borelsum_config_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("defaults text is itself a valid configuration") {
  const auto c = from_text(config::defaults_text());
  CHECK(config::canonical(c) == config::canonical(config::RunConfig{}));
  CHECK(config::config_hash(c) == config::config_hash(config::RunConfig{}));
  CHECK(config::config_hash(c).size() == 16);
}

TEST_CASE("values are parsed") {
  const auto c = from_text(
      "# comment\n"
      "potential.kind = constant\n"
      "potential.c = 2.5   # trailing\n"
      "lambda = 12 24\n"
      "grid.T = 5\n"
      "grid.interp = local-cubic\n"
      "singularity.kernel = eqh\n"
      "verify.criteria = 1 4\n");
  CHECK(c.potential.kind == "constant");
  CHECK(c.potential.c == 2.5);
  CHECK(c.lambdas == std::vector<double>{12.0, 24.0});
  CHECK_FALSE(c.auto_T);
  CHECK(c.domain_for(12.0).T == 5.0);
  CHECK(c.grid.interp == num::InterpKind::LocalCubic);
  CHECK(c.kernel == singularity::KernelConvention::EqH);
  CHECK(c.criteria == std::vector<int>{1, 4});
  CHECK(config::config_hash(c) != config::config_hash(config::RunConfig{}));
}

TEST_CASE("derived defaults") {
  const config::RunConfig c;
  CHECK(c.psi0_for(20.0) == cplx(0.05, 0.0));
  CHECK(c.domain_for(10.0).T == 7.0);
  CHECK(c.domain_for(20.0).T == 5.0);
}

TEST_CASE("malformed configurations are rejected") {
  CHECK(code_of([] { from_text("lambda = 10\nlambda = 20\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { from_text("no.such.key = 1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { from_text("just words\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { from_text("grid.n_xi = many\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { from_text("potential.kind = spline\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { from_text("singularity.beta = 1.5\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { from_text("grid.xi_max = 1.5\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { config::load("/nonexistent/borelsum.cfg"); }) == ErrorCode::ConfigError);
}

TEST_CASE("potential include file") {
  const fs::path dir = scratch_dir();
  std::ofstream(dir / "pot.cfg") << "potential.kind = constant\npotential.c = 0.75\n";
  std::ofstream(dir / "run.cfg") << "potential.file = pot.cfg\nlambda = 30\n";
  const auto c = config::load((dir / "run.cfg").string());
  CHECK(c.potential.kind == "constant");
  CHECK(c.potential.c == 0.75);
  CHECK(std::abs(config::make_potential(c.potential).eval(0.1) - 0.75) < 1e-15);
  std::ofstream(dir / "missing.cfg") << "potential.file = absent.cfg\n";
  CHECK(code_of([&] { config::load((dir / "missing.cfg").string()); }) == ErrorCode::ConfigError);
}

TEST_CASE("potential construction") {
  config::PotentialConfig p;
  CHECK(std::abs(config::make_potential(p).eval(0.0) + 0.25) < 1e-15);
  p.kind = "pendulum_exp";
  p.rate = 1.0;
  CHECK(std::abs(config::make_potential(p).eval(0.0) + 0.25) < 1e-12);
  p.kind = "mathieu";
  p.a = 0.0;
  p.b = 4.0;
  p.alpha = 1.0;
  const auto V = config::make_potential(p);
  CHECK(V.eps_order() == 0);
  // q = 1/(1 - s^2): q''(0) / 4 and r(0) cancel
  CHECK(std::abs(V.eval(0.0)) < 1e-6);
}
