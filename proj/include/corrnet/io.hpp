#pragma once

#include "corrnet/diagnostics.hpp"
#include "corrnet/granger.hpp"
#include "corrnet/synthgen.hpp"
#include "corrnet/varx.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace corrnet {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct Provenance {
  std::string config_hash;
  std::string panel_hash;
  /// ISO-8601 UTC; empty means "not recorded" (serialized as null).
  std::string created;
};

/// One line of a model file: what the JSON stores about a VarxFit.
struct ModelLine {
  Eigen::VectorXd intercepts;
  std::vector<Eigen::MatrixXd> endog;
  std::vector<Eigen::MatrixXd> exog;
  Eigen::MatrixXd resid_cov;

  /// Stacked k x n coefficient matrix in design-column order.
  [[nodiscard]] Eigen::MatrixXd coefficient_matrix() const;
};

/// Parsed model JSON (fitted model or generator spec).
struct ModelFile {
  std::vector<std::string> labels;
  int p = 1;
  Eigen::Index periods = 0;
  RankPolicy rank_policy = RankPolicy::Strict;
  ModelLine gdp;
  ModelLine cpi;
  Json lag_selection;  // null unless the lag order was selected
  Json generator;      // null unless this is a generator spec
  Provenance provenance;
};

ModelLine model_line(const VarxFit& fit);
ModelFile model_from_fit(const CoupledFit& fit);

Json to_json(const ModelFile& model);
ModelFile model_from_json(const Json& j);

Json to_json(const GeneratorSpec& spec);
GeneratorSpec spec_from_json(const Json& j);

Json to_json(const CausalityNetwork& net, const ModelFile& model, const Provenance& prov);
/// Adjacency matrices stored in a network JSON.
std::vector<std::pair<AdjacencyRole, Eigen::MatrixXd>> matrices_from_network_json(const Json& j);

Json to_json(const StabilityReport& report);
Json to_json(const CusumReport& report, const std::vector<std::string>& labels);

/// Appendix-table style CSV: header and first column are country codes,
/// row = target, column = source; zeros as `0`, others with 2 decimals.
void write_adjacency_csv(std::ostream& out, const WeightedAdjacency& adj);
struct AdjacencyTable {
  std::string corner;
  std::vector<std::string> labels;
  Eigen::MatrixXd matrix;
};
AdjacencyTable read_adjacency_csv(std::istream& in);

/// Graphviz digraph: one node per country (label order), one edge
/// source -> target per nonzero entry (row-major scan), blue if positive,
/// red if negative, labelled with the weight to 2 decimals.
void write_dot(std::ostream& out, const WeightedAdjacency& adj);

/// Columns: step, one per country.
void write_cusum_csv(std::ostream& out, const CusumReport& report,
                     const std::vector<std::string>& labels);

/// Entry as printed in adjacency CSV/DOT.
std::string format_weight(double v);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace corrnet
