#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace corrnet {

/// How a rank-deficient design is handled.
///  - Strict: throw SingularityError.
///  - MinNorm: return the minimum-norm solution (in the column-equilibrated
///    metric) and report the numerical rank.
enum class RankPolicy { Strict, MinNorm };

std::string_view to_string(RankPolicy policy);
RankPolicy parse_rank_policy(std::string_view text);

/// Ratio of smallest to largest |R_ii| (after column equilibration) below
/// which a design is considered rank deficient.
inline constexpr double kRankTolerance = 1e-10;

struct LeastSquaresSolution {
  Eigen::MatrixXd coefficients;  // k x m
  Eigen::MatrixXd residuals;     // rows x m
  Eigen::Index rank = 0;
  /// diag((X'X)^-1), or of the pseudo-inverse product under MinNorm.
  Eigen::VectorXd inverse_gram_diag;
};

/// Multi-response least squares min ||Y - X B|| through an orthogonal
/// factorization of the column-equilibrated design. `column_names` is used
/// only for error messages.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                         RankPolicy policy,
                                         const std::vector<std::string>& column_names = {});

}  // namespace corrnet
