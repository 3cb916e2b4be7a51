#pragma once

#include "corrnet/least_squares.hpp"
#include "corrnet/panel.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace corrnet {

/// Which line of the coupled system a fit belongs to. The GDP line regresses
/// x on lags of x (endogenous) and y (exogenous); the CPI line the reverse.
enum class EquationRole { Gdp, Cpi };

std::string_view to_string(EquationRole role);

struct FitOptions {
  RankPolicy rank_policy = RankPolicy::Strict;
  /// Country codes, used only to name design columns in error messages.
  std::vector<std::string> labels;
};

/// One estimated VARX(p) line.
///
/// Design column layout per equation (k = 1 + 2np regressors):
///   0                      intercept
///   1 + (s-1)n + j         endogenous series j at lag s
///   1 + np + (s-1)n + j    exogenous series j at lag s
/// endog_coefs[s-1](i, j) is the lag-s coefficient of endogenous j in equation i.
struct VarxFit {
  EquationRole role = EquationRole::Gdp;
  int p = 1;
  Eigen::VectorXd intercept;
  std::vector<Eigen::MatrixXd> endog_coefs;
  std::vector<Eigen::MatrixXd> exog_coefs;
  Eigen::MatrixXd residuals;  // (T-p) x n
  Eigen::MatrixXd resid_cov;  // E'E / (T-p)
  Eigen::VectorXd rss_per_equation;
  int regressor_count = 0;
  int rank = 0;
  RankPolicy rank_policy = RankPolicy::Strict;
  /// diag((X'X)^-1) in original (unscaled) units, length k.
  Eigen::VectorXd inverse_gram_diag;

  [[nodiscard]] Eigen::Index countries() const { return intercept.size(); }
  [[nodiscard]] Eigen::Index observations() const { return residuals.rows(); }
  /// (T-p) - rank; equals (T-p) - k for a full-rank design.
  [[nodiscard]] Eigen::Index residual_dof() const { return observations() - rank; }
  /// Stacked k x n coefficient matrix in design-column order.
  [[nodiscard]] Eigen::MatrixXd coefficient_matrix() const;
  /// k x n OLS standard errors, sigma_i^2 = rss_i / residual_dof.
  [[nodiscard]] Eigen::MatrixXd standard_errors() const;
};

/// The full parameter set of the coupled system, both lines sharing p.
struct CoupledFit {
  VarxFit gdp;
  VarxFit cpi;
  std::vector<std::string> labels;
  Eigen::Index periods = 0;  // T of the panel the fit was computed on

  [[nodiscard]] int p() const { return gdp.p; }
  [[nodiscard]] const VarxFit& line(EquationRole role) const {
    return role == EquationRole::Gdp ? gdp : cpi;
  }
};

enum class InformationCriterion { Aic, Bic };

std::string_view to_string(InformationCriterion c);

struct LagSelection {
  InformationCriterion criterion = InformationCriterion::Bic;
  /// lag -> (GDP-line score, CPI-line score)
  std::map<int, std::pair<double, double>> scores;
  int chosen_p = 1;
};

/// Design matrix rows t = first_row..T-1 for lag order p (first_row >= p).
Eigen::MatrixXd build_design(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                             Eigen::Index first_row);

std::vector<std::string> design_column_names(EquationRole role, int p,
                                             const std::vector<std::string>& labels,
                                             Eigen::Index n);

/// Smallest T for which a lag-p fit with n countries is identified.
Eigen::Index minimum_periods(Eigen::Index n, int p);

/// Per-equation least squares of endog_i[t] on the intercept and p lags of
/// every endogenous and exogenous column.
VarxFit fit_varx(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                 EquationRole role, const FitOptions& options = {});

/// As fit_varx, but the effective sample starts at row `first_row` (>= p).
VarxFit fit_varx_from(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                      Eigen::Index first_row, EquationRole role, const FitOptions& options = {});

/// Builds a VarxFit from given coefficients (k x n), computing residuals
/// and covariances against the data instead of estimating.
VarxFit evaluate_varx(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                      EquationRole role, const Eigen::MatrixXd& coefficients,
                      RankPolicy policy = RankPolicy::Strict);

CoupledFit fit_coupled(const Panel& panel, int p, RankPolicy policy = RankPolicy::Strict);

/// Gaussian conditional log-likelihood at the ML covariance.
double log_likelihood(const VarxFit& fit);

/// Lag order by summed per-line information criteria over 1..p_max, all
/// candidates evaluated on the sample trimmed at p_max.
LagSelection select_lag(const Panel& panel, int p_max, InformationCriterion criterion,
                        RankPolicy policy = RankPolicy::Strict);

/// Endogenous/exogenous matrices that a line of the system uses.
inline const Eigen::MatrixXd& endog_of(const Panel& panel, EquationRole role) {
  return role == EquationRole::Gdp ? panel.x : panel.y;
}
inline const Eigen::MatrixXd& exog_of(const Panel& panel, EquationRole role) {
  return role == EquationRole::Gdp ? panel.y : panel.x;
}

}  // namespace corrnet
