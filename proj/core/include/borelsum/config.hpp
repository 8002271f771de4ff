#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "borelsum/goursat.hpp"
#include "borelsum/potentials.hpp"
#include "borelsum/singularity.hpp"

namespace borelsum::config {

/// Flat "key = value" text. '#' starts a comment; keys may repeat only through `include`.
class KeyValue {
 public:
  static KeyValue parse(std::istream& is, const std::string& source = "<input>");
  static KeyValue load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

struct PotentialConfig {
  std::string kind = "rational";  // zero, constant, rational, pendulum_sin, pendulum_exp, mathieu
  std::vector<double> numerator{1.0};
  std::vector<double> denominator{-4.0, 0.0, 1.0};
  /// eps^k terms (k = 1, 2, ...) of a rational potential
  std::vector<std::pair<std::vector<double>, std::vector<double>>> eps_terms;
  double c = 1.0;
  double a = 2.0;
  double b = 1.0;
  double rate = 0.5;
  double alpha = 1.0;
  double sigma_lo = -0.5;
  double sigma_hi = 0.5;
  std::optional<double> strip_halfwidth, decay_K, decay_delta, eps_B;
};

struct RunConfig {
  PotentialConfig potential;
  std::vector<double> lambdas{10.0, 15.0, 20.0};
  double x_min = -0.8;
  double x_max = 0.8;
  std::size_t x_points = 33;
  goursat::GoursatDomain grid;
  bool auto_T = true;  // T = 3 + 40 / min(lambda) unless grid.T is given
  goursat::SolveOptions solve;
  double oracle_tol = 1e-13;
  cplx psi0{-1.0, 0.0};  // negative real part: 1 / lambda per lambda
  cplx dpsi0{0.0, 1.0};
  double drift_tol = 1e-6;
  // pendulum
  double pendulum_x = 1.0;
  double pendulum_xdot = 1.0;
  std::vector<double> pendulum_eps{1.0 / 20, 1.0 / 40, 1.0 / 80};
  // singularity
  double beta = 0.5;
  std::string v1 = "one";
  double v1_scale = 1.0;
  singularity::KernelConvention kernel = singularity::KernelConvention::Half;
  singularity::BranchGrid branch;
  double s_fixed = 1.0;
  double t_lo = 0.01;
  double t_hi = 0.05;
  // series
  double series_x = 0.5;
  int series_k_max = 8;
  // verify
  double tolerance_scale = 1.0;
  std::vector<int> criteria;  // empty: all

  /// Throws ConfigError on values that violate module preconditions.
  void validate() const;
  /// psi(0) actually used for a given lambda.
  cplx psi0_for(double lambda) const { return psi0.real() < 0.0 && psi0.imag() == 0.0 ? cplx{1.0 / lambda, 0.0} : psi0; }
  /// Box for one lambda (auto T where requested).
  goursat::GoursatDomain domain_for(double lambda_min) const;
};

RunConfig from_key_values(const KeyValue& kv);
RunConfig load(const std::string& path);
/// Text listing every key with its default value, itself a valid configuration.
std::string defaults_text();
/// Canonical serialization of the effective configuration (sorted keys).
std::string canonical(const RunConfig& c);
/// 16-hex-digit FNV-1a of canonical(c).
std::string config_hash(const RunConfig& c);

Potential make_potential(const PotentialConfig& p);
singularity::BranchSpec make_branch_spec(const RunConfig& c);

}  // namespace borelsum::config
