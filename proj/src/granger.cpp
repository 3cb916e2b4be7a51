#include "corrnet/granger.hpp"

#include "corrnet/error.hpp"
#include "corrnet/f_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace corrnet {

namespace {

// RSS changes below this fraction of the target's sum of squares are
// indistinguishable from rounding in the two factorizations.
constexpr double kRssResolution = 1e3 * std::numeric_limits<double>::epsilon();

struct RestrictedFit {
  Eigen::VectorXd rss;
  Eigen::Index rank = 0;
};

AdjacencyRole role_for(SeriesRef target, SeriesRef source) {
  if (target.kind == VariableKind::Gdp) {
    return source.kind == VariableKind::Gdp ? AdjacencyRole::Phi : AdjacencyRole::Pi;
  }
  return source.kind == VariableKind::Cpi ? AdjacencyRole::Psi : AdjacencyRole::Gamma;
}

std::vector<Eigen::Index> block_columns(AdjacencyRole role, Eigen::Index n, int p,
                                        Eigen::Index source) {
  const Eigen::Index base = is_endogenous_block(role) ? 1 : 1 + n * p;
  std::vector<Eigen::Index> cols;
  for (int s = 0; s < p; ++s) cols.push_back(base + s * n + source);
  return cols;
}

RestrictedFit fit_restricted(const Panel& panel, const VarxFit& line, AdjacencyRole role,
                             Eigen::Index source) {
  const auto& endog = endog_of(panel, line.role);
  const auto& exog = exog_of(panel, line.role);
  const int p = line.p;
  const Eigen::Index n = endog.cols();
  const Eigen::MatrixXd full = build_design(endog, exog, p, p);
  const auto drop = block_columns(role, n, p, source);

  std::vector<std::string> all_names = design_column_names(line.role, p, panel.labels, n);
  std::vector<std::string> names;
  Eigen::MatrixXd X(full.rows(), full.cols() - static_cast<Eigen::Index>(drop.size()));
  Eigen::Index out = 0;
  for (Eigen::Index c = 0; c < full.cols(); ++c) {
    if (std::find(drop.begin(), drop.end(), c) != drop.end()) continue;
    X.col(out++) = full.col(c);
    names.push_back(all_names[static_cast<std::size_t>(c)]);
  }
  const Eigen::MatrixXd Y = endog.bottomRows(endog.rows() - p);
  auto sol = solve_least_squares(X, Y, line.rank_policy, names);
  return {sol.residuals.colwise().squaredNorm().transpose(), sol.rank};
}

double block_weight(const VarxFit& line, AdjacencyRole role, Eigen::Index i, Eigen::Index j) {
  const auto& stack = is_endogenous_block(role) ? line.endog_coefs : line.exog_coefs;
  double sum = 0.0;
  for (const auto& m : stack) sum += m(i, j);
  return sum;
}

std::string pair_name(const Panel& panel, AdjacencyRole role, Eigen::Index i, Eigen::Index j) {
  return std::string(to_string(source_kind(role))) + ":" +
         panel.labels[static_cast<std::size_t>(j)] + " -> " +
         std::string(to_string(target_kind(role))) + ":" +
         panel.labels[static_cast<std::size_t>(i)];
}

GrangerTest evaluate_test(const Panel& panel, const VarxFit& line, AdjacencyRole role,
                          const RestrictedFit& restricted, Eigen::Index i, Eigen::Index j) {
  const int p = line.p;
  const Eigen::Index obs = line.observations();
  GrangerTest test;
  test.target = {target_kind(role), i};
  test.source = {source_kind(role), j};
  test.df_num = static_cast<int>(line.rank - restricted.rank);
  test.df_den = static_cast<int>(obs - line.rank);
  if (line.rank_policy == RankPolicy::Strict) test.df_num = p;
  if (test.df_den <= 0) {
    throw DimensionError("no residual degrees of freedom for " + pair_name(panel, role, i, j));
  }
  if (test.df_num <= 0) {
    throw SingularityError("block " + pair_name(panel, role, i, j) +
                           " is aliased: deleting it does not change the design rank");
  }

  const double rss_u = line.rss_per_equation(i);
  const double rss_r = restricted.rss(i);
  const double tss = endog_of(panel, line.role).col(i).tail(obs).squaredNorm();
  const double floor = kRssResolution * tss;
  const double gain = rss_r - rss_u;
  if (gain <= floor) {
    test.f_stat = 0.0;
  } else if (rss_u <= floor) {
    test.f_stat = std::numeric_limits<double>::infinity();
  } else {
    test.f_stat = (gain / test.df_num) / (rss_u / test.df_den);
  }
  test.p_value = f_sf(test.f_stat, test.df_num, test.df_den);
  test.adjusted_p_value = test.p_value;
  test.weight_if_significant = block_weight(line, role, i, j);
  return test;
}

}  // namespace

std::string_view to_string(AdjacencyRole role) {
  switch (role) {
    case AdjacencyRole::Phi: return "phi";
    case AdjacencyRole::Pi: return "pi";
    case AdjacencyRole::Psi: return "psi";
    case AdjacencyRole::Gamma: return "gamma";
  }
  return "?";
}

EquationRole equation_of(AdjacencyRole role) {
  return role == AdjacencyRole::Phi || role == AdjacencyRole::Pi ? EquationRole::Gdp
                                                                : EquationRole::Cpi;
}

VariableKind target_kind(AdjacencyRole role) {
  return equation_of(role) == EquationRole::Gdp ? VariableKind::Gdp : VariableKind::Cpi;
}

VariableKind source_kind(AdjacencyRole role) {
  return role == AdjacencyRole::Phi || role == AdjacencyRole::Gamma ? VariableKind::Gdp
                                                                   : VariableKind::Cpi;
}

bool is_endogenous_block(AdjacencyRole role) {
  return role == AdjacencyRole::Phi || role == AdjacencyRole::Psi;
}

std::string_view to_string(Correction c) {
  switch (c) {
    case Correction::None: return "none";
    case Correction::Bonferroni: return "bonferroni";
    case Correction::BenjaminiHochberg: return "bh";
  }
  return "?";
}

Correction parse_correction(std::string_view text) {
  if (text == "none") return Correction::None;
  if (text == "bonferroni") return Correction::Bonferroni;
  if (text == "bh") return Correction::BenjaminiHochberg;
  throw UsageError("unknown correction '" + std::string(text) + "' (none|bonferroni|bh)");
}

const WeightedAdjacency& CausalityNetwork::get(AdjacencyRole role) const {
  switch (role) {
    case AdjacencyRole::Phi: return phi;
    case AdjacencyRole::Pi: return pi;
    case AdjacencyRole::Psi: return psi;
    case AdjacencyRole::Gamma: break;
  }
  return gamma;
}

std::vector<double> adjust_p_values(const std::vector<double>& p_values, Correction correction) {
  const std::size_t m = p_values.size();
  std::vector<double> adj(p_values);
  if (correction == Correction::Bonferroni) {
    for (auto& v : adj) v = std::min(1.0, v * static_cast<double>(m));
  } else if (correction == Correction::BenjaminiHochberg && m > 0) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
    double running = 1.0;
    for (std::size_t r = m; r-- > 0;) {
      const std::size_t idx = order[r];
      running = std::min(running, p_values[idx] * static_cast<double>(m) / static_cast<double>(r + 1));
      adj[idx] = std::min(1.0, running);
    }
  }
  return adj;
}

GrangerTest block_f_test(const Panel& panel, const CoupledFit& fit, SeriesRef target,
                         SeriesRef source, double alpha) {
  const AdjacencyRole role = role_for(target, source);
  const VarxFit& line = fit.line(equation_of(role));
  const Eigen::Index n = line.countries();
  if (target.country < 0 || target.country >= n || source.country < 0 || source.country >= n) {
    throw UsageError("country index out of range");
  }
  if (panel.countries() != n || panel.periods() != fit.periods) {
    throw DimensionError("fit does not match the panel");
  }
  const auto restricted = fit_restricted(panel, line, role, source.country);
  auto test = evaluate_test(panel, line, role, restricted, target.country, source.country);
  test.significant = test.p_value < alpha;
  return test;
}

WeightedAdjacency build_adjacency(const Panel& panel, const CoupledFit& fit, AdjacencyRole role,
                                  double alpha, Correction correction) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  const VarxFit& line = fit.line(equation_of(role));
  const Eigen::Index n = line.countries();
  if (panel.countries() != n || panel.periods() != fit.periods) {
    throw DimensionError("fit does not match the panel");
  }

  WeightedAdjacency adj;
  adj.role = role;
  adj.labels = panel.labels;
  adj.alpha = alpha;
  adj.correction = correction;
  adj.matrix = Eigen::MatrixXd::Zero(n, n);

  const bool skip_diagonal = is_endogenous_block(role);
  // Restricted fits depend only on the source column; each serves every target.
  std::vector<std::optional<RestrictedFit>> restricted(static_cast<std::size_t>(n));
  std::vector<std::string> source_failure(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    try {
      restricted[static_cast<std::size_t>(j)] = fit_restricted(panel, line, role, j);
    } catch (const SingularityError& e) {
      source_failure[static_cast<std::size_t>(j)] = e.what();
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (skip_diagonal && i == j) continue;
      const auto& r = restricted[static_cast<std::size_t>(j)];
      if (!r) {
        adj.untestable.push_back(pair_name(panel, role, i, j) + ": " +
                                 source_failure[static_cast<std::size_t>(j)]);
        continue;
      }
      try {
        adj.tests.push_back(evaluate_test(panel, line, role, *r, i, j));
      } catch (const SingularityError& e) {
        adj.untestable.push_back(e.what());
      }
    }
  }

  std::vector<double> raw;
  raw.reserve(adj.tests.size());
  for (const auto& t : adj.tests) raw.push_back(t.p_value);
  const auto adjusted = adjust_p_values(raw, correction);
  for (std::size_t k = 0; k < adj.tests.size(); ++k) {
    auto& t = adj.tests[k];
    t.adjusted_p_value = adjusted[k];
    t.significant = t.adjusted_p_value < alpha;
    if (t.significant) adj.matrix(t.target.country, t.source.country) = t.weight_if_significant;
  }
  return adj;
}

CausalityNetwork assemble_network(const Panel& panel, const CoupledFit& fit, double alpha,
                                  Correction correction) {
  CausalityNetwork net;
  net.labels = panel.labels;
  net.alpha = alpha;
  net.correction = correction;
  net.p = fit.p();
  net.periods = fit.periods;
  net.rank_policy = fit.gdp.rank_policy;
  net.phi = build_adjacency(panel, fit, AdjacencyRole::Phi, alpha, correction);
  net.pi = build_adjacency(panel, fit, AdjacencyRole::Pi, alpha, correction);
  net.psi = build_adjacency(panel, fit, AdjacencyRole::Psi, alpha, correction);
  net.gamma = build_adjacency(panel, fit, AdjacencyRole::Gamma, alpha, correction);
  return net;
}

}  // namespace corrnet
