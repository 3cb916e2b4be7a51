#include "corrnet/diagnostics.hpp"

#include "corrnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace corrnet {

bool CusumReport::any_rejected() const {
  return std::any_of(equations.begin(), equations.end(),
                     [](const CusumEquation& e) { return e.rejected; });
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& lags) {
  if (lags.empty()) throw DimensionError("companion matrix needs at least one lag");
  const Eigen::Index n = lags.front().rows();
  const auto p = static_cast<Eigen::Index>(lags.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n * p, n * p);
  for (Eigen::Index s = 0; s < p; ++s) {
    c.block(0, s * n, n, n) = lags[static_cast<std::size_t>(s)];
  }
  if (p > 1) c.bottomLeftCorner(n * (p - 1), n * (p - 1)).setIdentity();
  return c;
}

std::vector<double> companion_moduli(const std::vector<Eigen::MatrixXd>& lags) {
  const Eigen::MatrixXd c = companion_matrix(lags);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(c, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success || !c.allFinite()) {
    std::ostringstream msg;
    msg << "eigenvalue iteration did not converge for companion matrix (Frobenius norm "
        << c.norm() << ")";
    throw NumericalError(msg.str());
  }
  std::vector<double> moduli;
  for (const auto& ev : solver.eigenvalues()) moduli.push_back(std::abs(ev));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli;
}

StabilityReport companion_stability(const VarxFit& fit) {
  StabilityReport report;
  report.role = fit.role;
  report.eigen_moduli = companion_moduli(fit.endog_coefs);
  report.max_modulus = report.eigen_moduli.front();
  report.stable = report.max_modulus < 1.0;
  return report;
}

double cusum_critical_value(double alpha) {
  // Quantiles of sup |Brownian bridge| (Kolmogorov distribution).
  if (std::fabs(alpha - 0.10) < 1e-12) return 1.224;
  if (std::fabs(alpha - 0.05) < 1e-12) return 1.358;
  if (std::fabs(alpha - 0.01) < 1e-12) return 1.628;
  throw UsageError("CUSUM critical values exist only for alpha in {0.10, 0.05, 0.01}");
}

Eigen::VectorXd cusum_path(const Eigen::VectorXd& residuals, Eigen::Index dof) {
  if (dof <= 0) throw DegenerateFitError("CUSUM needs positive residual degrees of freedom");
  const double ss = residuals.squaredNorm();
  if (!(ss > 0.0)) throw DegenerateFitError("zero residual variance; CUSUM undefined");
  const double sigma = std::sqrt(ss / static_cast<double>(dof));
  const double scale = sigma * std::sqrt(static_cast<double>(residuals.size()));
  Eigen::VectorXd path(residuals.size());
  double acc = 0.0;
  for (Eigen::Index m = 0; m < residuals.size(); ++m) {
    acc += residuals(m);
    path(m) = acc / scale;
  }
  return path;
}

CusumReport ols_cusum(const VarxFit& fit, double alpha) {
  CusumReport report;
  report.role = fit.role;
  report.alpha = alpha;
  report.critical_value = cusum_critical_value(alpha);
  for (Eigen::Index i = 0; i < fit.residuals.cols(); ++i) {
    CusumEquation eq;
    try {
      eq.path = cusum_path(fit.residuals.col(i), fit.residual_dof());
    } catch (const DegenerateFitError& e) {
      throw DegenerateFitError("equation " + std::to_string(i) + ": " + e.what());
    }
    eq.sup_stat = eq.path.cwiseAbs().maxCoeff();
    eq.rejected = eq.sup_stat > report.critical_value;
    report.equations.push_back(std::move(eq));
  }
  return report;
}

}  // namespace corrnet
