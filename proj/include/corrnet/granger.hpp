#pragma once

#include "corrnet/panel.hpp"
#include "corrnet/varx.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrnet {

/// The four coefficient blocks of the coupled system and the networks they
/// induce: Phi (GDP -> GDP), Pi (CPI -> GDP), Psi (CPI -> CPI), Gamma (GDP -> CPI).
enum class AdjacencyRole { Phi, Pi, Psi, Gamma };

std::string_view to_string(AdjacencyRole role);
inline constexpr AdjacencyRole kAllRoles[] = {AdjacencyRole::Phi, AdjacencyRole::Pi,
                                             AdjacencyRole::Psi, AdjacencyRole::Gamma};

/// Equation line whose regressions carry a role's block.
EquationRole equation_of(AdjacencyRole role);
VariableKind target_kind(AdjacencyRole role);
VariableKind source_kind(AdjacencyRole role);
/// True for Phi and Psi, whose blocks are the endogenous lags of their line.
bool is_endogenous_block(AdjacencyRole role);

enum class Correction { None, Bonferroni, BenjaminiHochberg };

std::string_view to_string(Correction c);
Correction parse_correction(std::string_view text);

struct SeriesRef {
  VariableKind kind = VariableKind::Gdp;
  Eigen::Index country = 0;
};

/// One conditional block F-test: do the p lags of `source` help predict
/// `target` given every other regressor of the target's line?
struct GrangerTest {
  SeriesRef target;
  SeriesRef source;
  double f_stat = 0.0;
  int df_num = 0;
  int df_den = 0;
  double p_value = 1.0;
  /// p-value after multiple-testing adjustment; equals p_value without correction.
  double adjusted_p_value = 1.0;
  bool significant = false;
  /// Sum over lags of the unrestricted block coefficients.
  double weight_if_significant = 0.0;
};

/// Row i = target, column j = source. Entry = summed block coefficients
/// when the test is significant, else 0.
struct WeightedAdjacency {
  AdjacencyRole role = AdjacencyRole::Phi;
  std::vector<std::string> labels;
  Eigen::MatrixXd matrix;
  double alpha = 0.05;
  Correction correction = Correction::None;
  /// Every test that ran, row-major over (i, j).
  std::vector<GrangerTest> tests;
  /// Pairs that could not be tested (singular restricted design), with reason.
  std::vector<std::string> untestable;
};

struct CausalityNetwork {
  std::vector<std::string> labels;
  WeightedAdjacency phi;
  WeightedAdjacency pi;
  WeightedAdjacency psi;
  WeightedAdjacency gamma;
  double alpha = 0.05;
  Correction correction = Correction::None;
  int p = 1;
  Eigen::Index periods = 0;
  RankPolicy rank_policy = RankPolicy::Strict;

  [[nodiscard]] const WeightedAdjacency& get(AdjacencyRole role) const;
};

/// Block F-test of source -> target. The (target, source) kinds select the
/// block: GDP<-GDP Phi, GDP<-CPI Pi, CPI<-CPI Psi, CPI<-GDP Gamma.
/// Throws SingularityError when the restricted design is singular (or, under
/// MinNorm, when deleting the block does not change the rank).
GrangerTest block_f_test(const Panel& panel, const CoupledFit& fit, SeriesRef target,
                         SeriesRef source, double alpha = 0.05);

WeightedAdjacency build_adjacency(const Panel& panel, const CoupledFit& fit, AdjacencyRole role,
                                  double alpha = 0.05, Correction correction = Correction::None);

CausalityNetwork assemble_network(const Panel& panel, const CoupledFit& fit, double alpha = 0.05,
                                  Correction correction = Correction::None);

/// Adjusted p-values for a family of tests.
std::vector<double> adjust_p_values(const std::vector<double>& p_values, Correction correction);

}  // namespace corrnet
