#pragma once

#include "corrnet/panel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace corrnet {

/// Fully specified coupled system used to simulate panels with known truth.
struct GeneratorSpec {
  Eigen::Index n = 1;
  int p = 1;
  Eigen::VectorXd b;  // GDP-line intercepts
  Eigen::VectorXd c;  // CPI-line intercepts
  std::vector<Eigen::MatrixXd> phi;    // GDP <- GDP
  std::vector<Eigen::MatrixXd> pi;     // GDP <- CPI
  std::vector<Eigen::MatrixXd> psi;    // CPI <- CPI
  std::vector<Eigen::MatrixXd> gamma;  // CPI <- GDP
  Eigen::MatrixXd omega;  // GDP-line noise covariance
  Eigen::MatrixXd sigma;  // CPI-line noise covariance
  int burn_in = 200;
  std::uint64_t seed = 0;
  /// Skip noise (and the positive-definiteness check) entirely.
  bool noise_free = false;
  /// Optional country codes; defaults to C1..Cn.
  std::vector<std::string> labels;
  Quarter start{2000, 1};

  /// Zero coefficients, zero intercepts, covariances 0.01 I.
  static GeneratorSpec zeros(Eigen::Index n, int p);
  /// Throws DefinitenessError / StationarityError / DimensionError.
  void validate() const;
};

/// Lag matrices of the stacked 2n-dimensional VAR, blocks [phi pi; gamma psi].
std::vector<Eigen::MatrixXd> joint_lag_matrices(const GeneratorSpec& spec);

/// Spectral radius of the joint companion matrix.
double joint_spectral_radius(const GeneratorSpec& spec);

/// Iterates both lines jointly from zero initial conditions, drops burn_in
/// steps and returns T periods. Same spec and seed give identical output.
Panel simulate(const GeneratorSpec& spec, Eigen::Index T);

/// Random coefficient stacks rescaled so the joint companion spectral radius
/// equals target_radius; intercepts standard normal; covariances 0.01 I.
GeneratorSpec random_stable_spec(Eigen::Index n, int p, std::uint64_t seed, double target_radius);

}  // namespace corrnet
