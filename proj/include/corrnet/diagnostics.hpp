#pragma once

#include "corrnet/varx.hpp"

#include <Eigen/Dense>

#include <vector>

namespace corrnet {

/// Dynamic stability of the endogenous lag polynomial of one fitted line.
struct StabilityReport {
  EquationRole role = EquationRole::Gdp;
  std::vector<double> eigen_moduli;  // n*p values, descending
  double max_modulus = 0.0;
  bool stable = false;
};

struct CusumEquation {
  Eigen::VectorXd path;  // scaled cumulative residual sums, length T-p
  double sup_stat = 0.0;
  bool rejected = false;
};

/// OLS-CUSUM parameter-stability test, one entry per equation (country).
struct CusumReport {
  EquationRole role = EquationRole::Gdp;
  double alpha = 0.05;
  double critical_value = 0.0;
  std::vector<CusumEquation> equations;

  [[nodiscard]] bool any_rejected() const;
};

/// (n p) x (n p) companion matrix of a stack of n x n lag matrices.
Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& lags);

/// Eigenvalue moduli of the companion matrix, sorted descending. Throws
/// NumericalError if the eigen iteration fails.
std::vector<double> companion_moduli(const std::vector<Eigen::MatrixXd>& lags);

StabilityReport companion_stability(const VarxFit& fit);

/// Sup-norm Brownian-bridge critical value; alpha must be 0.10, 0.05 or 0.01.
double cusum_critical_value(double alpha);

/// CUSUM path of one residual series: cumsum(u) / (sigma * sqrt(N)), with
/// sigma^2 = sum(u^2) / dof.
Eigen::VectorXd cusum_path(const Eigen::VectorXd& residuals, Eigen::Index dof);

CusumReport ols_cusum(const VarxFit& fit, double alpha);

}  // namespace corrnet
