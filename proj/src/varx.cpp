#include "corrnet/varx.hpp"

#include "corrnet/error.hpp"

#include <cmath>
#include <numbers>

namespace corrnet {

namespace {

void check_inputs(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                  Eigen::Index first_row) {
  if (p < 1) throw DimensionError("lag order must be >= 1, got " + std::to_string(p));
  if (endog.rows() != exog.rows() || endog.cols() != exog.cols()) {
    throw DimensionError("endogenous and exogenous matrices differ in shape");
  }
  if (first_row < p) throw DimensionError("sample start precedes the first usable lag");
  const Eigen::Index n = endog.cols();
  const Eigen::Index k = 1 + 2 * n * p;
  const Eigen::Index obs = endog.rows() - first_row;
  if (obs <= k) {
    throw DimensionError("insufficient observations: " + std::to_string(obs) +
                         " effective rows for " + std::to_string(k) +
                         " regressors (n=" + std::to_string(n) + ", p=" + std::to_string(p) +
                         " needs T >= " + std::to_string(minimum_periods(n, p) + first_row - p) +
                         ", have T=" + std::to_string(endog.rows()) + ")");
  }
  if (!endog.allFinite() || !exog.allFinite()) throw DimensionError("non-finite input data");
}

void unpack(VarxFit& fit, const Eigen::MatrixXd& coefs) {
  const Eigen::Index n = coefs.cols();
  const int p = fit.p;
  fit.intercept = coefs.row(0).transpose();
  fit.endog_coefs.assign(static_cast<std::size_t>(p), Eigen::MatrixXd());
  fit.exog_coefs.assign(static_cast<std::size_t>(p), Eigen::MatrixXd());
  for (int s = 0; s < p; ++s) {
    fit.endog_coefs[static_cast<std::size_t>(s)] = coefs.middleRows(1 + s * n, n).transpose();
    fit.exog_coefs[static_cast<std::size_t>(s)] =
        coefs.middleRows(1 + n * p + s * n, n).transpose();
  }
}

void finish(VarxFit& fit, Eigen::MatrixXd residuals) {
  fit.residuals = std::move(residuals);
  const auto obs = static_cast<double>(fit.residuals.rows());
  fit.rss_per_equation = fit.residuals.colwise().squaredNorm().transpose();
  fit.resid_cov = (fit.residuals.transpose() * fit.residuals) / obs;
}

double log_det_pd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError(std::string(what) + " is not positive definite");
  }
  const Eigen::VectorXd d = llt.matrixL().toDenseMatrix().diagonal();
  if ((d.array() <= 0.0).any()) throw DefinitenessError(std::string(what) + " is singular");
  return 2.0 * d.array().log().sum();
}

template <class E>
[[noreturn]] void retag(const E& e, const std::string& tag) {
  throw E(tag + e.what());
}

}  // namespace

std::string_view to_string(EquationRole role) { return role == EquationRole::Gdp ? "gdp" : "cpi"; }

std::string_view to_string(InformationCriterion c) {
  return c == InformationCriterion::Aic ? "aic" : "bic";
}

Eigen::MatrixXd VarxFit::coefficient_matrix() const {
  const Eigen::Index n = countries();
  Eigen::MatrixXd b(1 + 2 * n * p, n);
  b.row(0) = intercept.transpose();
  for (int s = 0; s < p; ++s) {
    b.middleRows(1 + s * n, n) = endog_coefs[static_cast<std::size_t>(s)].transpose();
    b.middleRows(1 + n * p + s * n, n) = exog_coefs[static_cast<std::size_t>(s)].transpose();
  }
  return b;
}

Eigen::MatrixXd VarxFit::standard_errors() const {
  const auto dof = static_cast<double>(residual_dof());
  const Eigen::RowVectorXd sigma2 = rss_per_equation.transpose() / dof;
  return (inverse_gram_diag * sigma2).cwiseSqrt();
}

Eigen::Index minimum_periods(Eigen::Index n, int p) { return p + 2 + 2 * n * p; }

Eigen::MatrixXd build_design(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                             Eigen::Index first_row) {
  const Eigen::Index n = endog.cols();
  const Eigen::Index rows = endog.rows() - first_row;
  Eigen::MatrixXd X(rows, 1 + 2 * n * p);
  X.col(0).setOnes();
  for (int s = 1; s <= p; ++s) {
    X.middleCols(1 + (s - 1) * n, n) = endog.middleRows(first_row - s, rows);
    X.middleCols(1 + n * p + (s - 1) * n, n) = exog.middleRows(first_row - s, rows);
  }
  return X;
}

std::vector<std::string> design_column_names(EquationRole role, int p,
                                             const std::vector<std::string>& labels,
                                             Eigen::Index n) {
  const std::string endog = role == EquationRole::Gdp ? "GDP" : "CPI";
  const std::string exog = role == EquationRole::Gdp ? "CPI" : "GDP";
  auto code = [&](Eigen::Index j) {
    const auto idx = static_cast<std::size_t>(j);
    return idx < labels.size() ? labels[idx] : "#" + std::to_string(j);
  };
  std::vector<std::string> names{"intercept"};
  for (const auto* kind : {&endog, &exog}) {
    for (int s = 1; s <= p; ++s) {
      for (Eigen::Index j = 0; j < n; ++j) {
        names.push_back(*kind + ":" + code(j) + "(t-" + std::to_string(s) + ")");
      }
    }
  }
  return names;
}

VarxFit fit_varx_from(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                      Eigen::Index first_row, EquationRole role, const FitOptions& options) {
  check_inputs(endog, exog, p, first_row);
  const Eigen::Index n = endog.cols();
  const Eigen::MatrixXd X = build_design(endog, exog, p, first_row);
  const Eigen::MatrixXd Y = endog.bottomRows(endog.rows() - first_row);

  auto sol = solve_least_squares(X, Y, options.rank_policy,
                                 design_column_names(role, p, options.labels, n));
  VarxFit fit;
  fit.role = role;
  fit.p = p;
  fit.regressor_count = static_cast<int>(X.cols());
  fit.rank = static_cast<int>(sol.rank);
  fit.rank_policy = options.rank_policy;
  fit.inverse_gram_diag = std::move(sol.inverse_gram_diag);
  unpack(fit, sol.coefficients);
  finish(fit, std::move(sol.residuals));
  return fit;
}

VarxFit fit_varx(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                 EquationRole role, const FitOptions& options) {
  return fit_varx_from(endog, exog, p, p, role, options);
}

VarxFit evaluate_varx(const Eigen::MatrixXd& endog, const Eigen::MatrixXd& exog, int p,
                      EquationRole role, const Eigen::MatrixXd& coefficients, RankPolicy policy) {
  check_inputs(endog, exog, p, p);
  const Eigen::Index n = endog.cols();
  if (coefficients.rows() != 1 + 2 * n * p || coefficients.cols() != n) {
    throw DimensionError("coefficient matrix shape does not match n and p");
  }
  const Eigen::MatrixXd X = build_design(endog, exog, p, p);
  VarxFit fit;
  fit.role = role;
  fit.p = p;
  fit.regressor_count = static_cast<int>(X.cols());
  fit.rank = fit.regressor_count;
  fit.rank_policy = policy;
  fit.inverse_gram_diag = Eigen::VectorXd::Constant(X.cols(), std::nan(""));
  unpack(fit, coefficients);
  finish(fit, endog.bottomRows(endog.rows() - p) - X * coefficients);
  if (policy == RankPolicy::MinNorm) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(X * X.colwise().norm().cwiseInverse().asDiagonal());
    fit.rank = static_cast<int>(cod.rank());
  }
  return fit;
}

CoupledFit fit_coupled(const Panel& panel, int p, RankPolicy policy) {
  panel.validate();
  FitOptions opts{policy, panel.labels};
  CoupledFit fit;
  fit.labels = panel.labels;
  fit.periods = panel.periods();
  for (auto role : {EquationRole::Gdp, EquationRole::Cpi}) {
    const std::string tag = role == EquationRole::Gdp ? "GDP line (x equation): "
                                                      : "CPI line (y equation): ";
    try {
      auto f = fit_varx(endog_of(panel, role), exog_of(panel, role), p, role, opts);
      (role == EquationRole::Gdp ? fit.gdp : fit.cpi) = std::move(f);
    } catch (const SingularityError& e) {
      retag(e, tag);
    } catch (const DimensionError& e) {
      retag(e, tag);
    }
  }
  return fit;
}

double log_likelihood(const VarxFit& fit) {
  const auto obs = static_cast<double>(fit.observations());
  const auto n = static_cast<double>(fit.countries());
  const double log_det = log_det_pd(fit.resid_cov, "residual covariance");
  return -0.5 * obs * (n * std::log(2.0 * std::numbers::pi) + log_det + n);
}

LagSelection select_lag(const Panel& panel, int p_max, InformationCriterion criterion,
                        RankPolicy policy) {
  panel.validate();
  if (p_max < 1) throw DimensionError("p_max must be >= 1");
  const Eigen::Index n = panel.countries();
  const Eigen::Index T = panel.periods();
  if (T < minimum_periods(n, p_max)) {
    throw DimensionError("p_max=" + std::to_string(p_max) + " too large: n=" +
                         std::to_string(n) + " needs T >= " +
                         std::to_string(minimum_periods(n, p_max)) + ", have T=" +
                         std::to_string(T));
  }
  const auto eff = static_cast<double>(T - p_max);
  const double penalty = criterion == InformationCriterion::Aic ? 2.0 : std::log(eff);

  LagSelection sel;
  sel.criterion = criterion;
  FitOptions opts{policy, panel.labels};
  double best = 0.0;
  for (int p = 1; p <= p_max; ++p) {
    const auto params = static_cast<double>(n * (1 + 2 * n * p));
    double line_score[2];
    for (auto role : {EquationRole::Gdp, EquationRole::Cpi}) {
      const auto fit =
          fit_varx_from(endog_of(panel, role), exog_of(panel, role), p, p_max, role, opts);
      line_score[role == EquationRole::Gdp ? 0 : 1] =
          log_det_pd(fit.resid_cov, "residual covariance") + penalty * params / eff;
    }
    sel.scores[p] = {line_score[0], line_score[1]};
    const double total = line_score[0] + line_score[1];
    if (p == 1 || total < best) {
      best = total;
      sel.chosen_p = p;
    }
  }
  return sel;
}

}  // namespace corrnet
