#include "corrnet/least_squares.hpp"

#include "corrnet/error.hpp"

namespace corrnet {

namespace {

std::string column_name(const std::vector<std::string>& names, Eigen::Index j) {
  const auto idx = static_cast<std::size_t>(j);
  return idx < names.size() ? names[idx] : "column " + std::to_string(j);
}

}  // namespace

std::string_view to_string(RankPolicy policy) {
  return policy == RankPolicy::Strict ? "strict" : "min_norm";
}

RankPolicy parse_rank_policy(std::string_view text) {
  if (text == "strict") return RankPolicy::Strict;
  if (text == "min_norm" || text == "min-norm") return RankPolicy::MinNorm;
  throw UsageError("unknown rank policy '" + std::string(text) + "' (strict|min_norm)");
}

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                         RankPolicy policy,
                                         const std::vector<std::string>& column_names) {
  if (X.rows() != Y.rows()) throw DimensionError("design and response row counts differ");
  if (X.rows() < X.cols()) {
    throw DimensionError("design has " + std::to_string(X.rows()) + " rows for " +
                         std::to_string(X.cols()) + " regressors");
  }
  const Eigen::Index k = X.cols();

  Eigen::VectorXd norms = X.colwise().norm().transpose();
  Eigen::VectorXd inv_scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (norms(j) == 0.0) {
      if (policy == RankPolicy::Strict) {
        throw SingularityError("design is rank deficient: " + column_name(column_names, j) +
                               " is identically zero");
      }
      inv_scale(j) = 0.0;
    } else {
      inv_scale(j) = 1.0 / norms(j);
    }
  }
  const Eigen::MatrixXd scaled = X * inv_scale.asDiagonal();

  LeastSquaresSolution sol;
  if (policy == RankPolicy::Strict) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled);
    const auto R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
    const double largest = diag.maxCoeff();
    if (!(diag.minCoeff() >= kRankTolerance * largest)) {
      std::string cols;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (!(diag(j) >= kRankTolerance * largest)) {
          cols += (cols.empty() ? "" : ", ") + column_name(column_names, j);
        }
      }
      throw SingularityError("design is rank deficient (|R_jj| ratio < 1e-10); collinear with "
                             "preceding columns: " + cols);
    }
    const Eigen::MatrixXd qty = (qr.householderQ().transpose() * Y).topRows(k);
    sol.coefficients = inv_scale.asDiagonal() * R.solve(qty);
    const Eigen::MatrixXd r_inv = R.solve(Eigen::MatrixXd::Identity(k, k));
    sol.inverse_gram_diag = r_inv.rowwise().squaredNorm().cwiseProduct(
        inv_scale.cwiseAbs2());
    sol.rank = k;
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(scaled);
    sol.coefficients = inv_scale.asDiagonal() * cod.solve(Y);
    const Eigen::MatrixXd pinv = cod.pseudoInverse();
    sol.inverse_gram_diag =
        pinv.rowwise().squaredNorm().cwiseProduct(inv_scale.cwiseAbs2());
    sol.rank = cod.rank();
  }
  sol.residuals = Y - X * sol.coefficients;
  return sol;
}

}  // namespace corrnet
