#include "corrnet/io.hpp"

#include "corrnet/csv_util.hpp"
#include "corrnet/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace corrnet {

namespace {

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Json stack_json(const std::vector<Eigen::MatrixXd>& stack) {
  Json arr = Json::array();
  for (const auto& m : stack) arr.push_back(matrix_json(m));
  return arr;
}

double number_at(const Json& j, const std::string& where) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  return j.get<double>();
}

Eigen::MatrixXd matrix_from(const Json& j, Eigen::Index rows, Eigen::Index cols,
                            const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw SchemaError(where + ": expected " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SchemaError(where + ": row " + std::to_string(i) + " must have " +
                        std::to_string(cols) + " entries");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = number_at(row[static_cast<std::size_t>(k)], where);
    }
  }
  return m;
}

Eigen::VectorXd vector_from(const Json& j, Eigen::Index n, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw SchemaError(where + ": expected " + std::to_string(n) + " entries");
  }
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = number_at(j[static_cast<std::size_t>(i)], where);
  return v;
}

std::vector<Eigen::MatrixXd> stack_from(const Json& j, int p, Eigen::Index n,
                                        const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != p) {
    throw SchemaError(where + ": expected " + std::to_string(p) + " lag matrices");
  }
  std::vector<Eigen::MatrixXd> out;
  for (int s = 0; s < p; ++s) {
    out.push_back(matrix_from(j[static_cast<std::size_t>(s)], n, n,
                              where + "[" + std::to_string(s) + "]"));
  }
  return out;
}

Json line_json(const ModelLine& line) {
  Json j;
  j["intercepts"] = vector_json(line.intercepts);
  j["endog"] = stack_json(line.endog);
  j["exog"] = stack_json(line.exog);
  j["resid_cov"] = matrix_json(line.resid_cov);
  return j;
}

ModelLine line_from(const Json& j, int p, Eigen::Index n, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  ModelLine line;
  line.intercepts = vector_from(j.at("intercepts"), n, where + ".intercepts");
  line.endog = stack_from(j.at("endog"), p, n, where + ".endog");
  line.exog = stack_from(j.at("exog"), p, n, where + ".exog");
  line.resid_cov = matrix_from(j.at("resid_cov"), n, n, where + ".resid_cov");
  return line;
}

Json provenance_json(const Provenance& prov) {
  Json j;
  j["config_hash"] = prov.config_hash;
  j["panel_hash"] = prov.panel_hash;
  j["timestamps"] = Json::object();
  j["timestamps"]["created"] = prov.created.empty() ? Json(nullptr) : Json(prov.created);
  return j;
}

Provenance provenance_from(const Json& j) {
  Provenance prov;
  if (!j.is_object()) return prov;
  prov.config_hash = j.value("config_hash", "");
  prov.panel_hash = j.value("panel_hash", "");
  if (j.contains("timestamps") && j["timestamps"].contains("created") &&
      j["timestamps"]["created"].is_string()) {
    prov.created = j["timestamps"]["created"].get<std::string>();
  }
  return prov;
}

Json fit_section(const ModelFile& model) {
  Json fit;
  fit["gdp"] = line_json(model.gdp);
  fit["cpi"] = line_json(model.cpi);
  return fit;
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string corner_label(AdjacencyRole role) {
  return std::string(to_string(target_kind(role))) + "\\" +
         std::string(to_string(source_kind(role)));
}

}  // namespace

Eigen::MatrixXd ModelLine::coefficient_matrix() const {
  const Eigen::Index n = intercepts.size();
  const auto p = static_cast<Eigen::Index>(endog.size());
  Eigen::MatrixXd b(1 + 2 * n * p, n);
  b.row(0) = intercepts.transpose();
  for (Eigen::Index s = 0; s < p; ++s) {
    b.middleRows(1 + s * n, n) = endog[static_cast<std::size_t>(s)].transpose();
    b.middleRows(1 + n * p + s * n, n) = exog[static_cast<std::size_t>(s)].transpose();
  }
  return b;
}

ModelLine model_line(const VarxFit& fit) {
  return {fit.intercept, fit.endog_coefs, fit.exog_coefs, fit.resid_cov};
}

ModelFile model_from_fit(const CoupledFit& fit) {
  ModelFile model;
  model.labels = fit.labels;
  model.p = fit.p();
  model.periods = fit.periods;
  model.rank_policy = fit.gdp.rank_policy;
  model.gdp = model_line(fit.gdp);
  model.cpi = model_line(fit.cpi);
  return model;
}

Json to_json(const ModelFile& model) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = model.generator.is_null() ? "model" : "generator";
  j["labels"] = model.labels;
  j["p"] = model.p;
  j["T"] = model.periods;
  j["rank_policy"] = std::string(to_string(model.rank_policy));
  if (!model.lag_selection.is_null()) j["lag_selection"] = model.lag_selection;
  if (!model.generator.is_null()) j["generator"] = model.generator;
  j["fit"] = fit_section(model);
  j["provenance"] = provenance_json(model.provenance);
  return j;
}

ModelFile model_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw SchemaError("model JSON must be an object");
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw SchemaError("unsupported schema_version " + std::to_string(version));
    }
    ModelFile model;
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.p = j.at("p").get<int>();
    if (model.p < 1) throw SchemaError("p must be >= 1");
    model.periods = j.value("T", Eigen::Index{0});
    model.rank_policy = parse_rank_policy(j.value("rank_policy", std::string("strict")));
    const auto n = static_cast<Eigen::Index>(model.labels.size());
    if (n < 1) throw SchemaError("labels must not be empty");
    const auto& fit = j.at("fit");
    model.gdp = line_from(fit.at("gdp"), model.p, n, "fit.gdp");
    model.cpi = line_from(fit.at("cpi"), model.p, n, "fit.cpi");
    if (j.contains("lag_selection")) model.lag_selection = j["lag_selection"];
    if (j.contains("generator")) model.generator = j["generator"];
    if (j.contains("provenance")) model.provenance = provenance_from(j["provenance"]);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model JSON: ") + e.what());
  }
}

Json to_json(const GeneratorSpec& spec) {
  ModelFile model;
  model.p = spec.p;
  if (spec.labels.empty()) {
    for (Eigen::Index j = 0; j < spec.n; ++j) model.labels.push_back("C" + std::to_string(j + 1));
  } else {
    model.labels = spec.labels;
  }
  model.gdp = {spec.b, spec.phi, spec.pi, spec.omega};
  model.cpi = {spec.c, spec.psi, spec.gamma, spec.sigma};
  model.generator = Json::object();
  model.generator["burn_in"] = spec.burn_in;
  model.generator["seed"] = spec.seed;
  model.generator["noise_free"] = spec.noise_free;
  model.generator["start"] = spec.start.str();
  return to_json(model);
}

GeneratorSpec spec_from_json(const Json& j) {
  const ModelFile model = model_from_json(j);
  GeneratorSpec spec;
  spec.n = static_cast<Eigen::Index>(model.labels.size());
  spec.p = model.p;
  spec.labels = model.labels;
  spec.b = model.gdp.intercepts;
  spec.phi = model.gdp.endog;
  spec.pi = model.gdp.exog;
  spec.omega = model.gdp.resid_cov;
  spec.c = model.cpi.intercepts;
  spec.psi = model.cpi.endog;
  spec.gamma = model.cpi.exog;
  spec.sigma = model.cpi.resid_cov;
  if (model.generator.is_object()) {
    try {
      spec.burn_in = model.generator.value("burn_in", 200);
      spec.seed = model.generator.value("seed", std::uint64_t{0});
      spec.noise_free = model.generator.value("noise_free", false);
      if (model.generator.contains("start")) {
        spec.start = Quarter::parse(model.generator["start"].get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("malformed generator section: ") + e.what());
    }
  }
  return spec;
}

Json to_json(const CausalityNetwork& net, const ModelFile& model, const Provenance& prov) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "network";
  j["labels"] = net.labels;
  j["p"] = net.p;
  j["alpha"] = net.alpha;
  j["correction"] = std::string(to_string(net.correction));
  j["T"] = net.periods;
  j["rank_policy"] = std::string(to_string(net.rank_policy));
  j["orientation"] = "row = target i, column = source j (edge j -> i)";
  Json matrices, tests, untestable;
  for (auto role : kAllRoles) {
    const auto& adj = net.get(role);
    const std::string key(to_string(role));
    matrices[key] = matrix_json(adj.matrix);
    Json list = Json::array();
    for (const auto& t : adj.tests) {
      Json e;
      e["target"] = net.labels[static_cast<std::size_t>(t.target.country)];
      e["source"] = net.labels[static_cast<std::size_t>(t.source.country)];
      e["f_stat"] = json_number(t.f_stat);
      e["df_num"] = t.df_num;
      e["df_den"] = t.df_den;
      e["p_value"] = t.p_value;
      e["adjusted_p_value"] = t.adjusted_p_value;
      e["significant"] = t.significant;
      e["weight"] = t.weight_if_significant;
      list.push_back(std::move(e));
    }
    tests[key] = std::move(list);
    untestable[key] = adj.untestable;
  }
  j["matrices"] = std::move(matrices);
  j["tests"] = std::move(tests);
  j["untestable"] = std::move(untestable);
  j["fit"] = fit_section(model);
  j["provenance"] = provenance_json(prov);
  return j;
}

std::vector<std::pair<AdjacencyRole, Eigen::MatrixXd>> matrices_from_network_json(const Json& j) {
  const auto n = static_cast<Eigen::Index>(j.at("labels").size());
  std::vector<std::pair<AdjacencyRole, Eigen::MatrixXd>> out;
  for (auto role : kAllRoles) {
    const std::string key(to_string(role));
    out.emplace_back(role, matrix_from(j.at("matrices").at(key), n, n, "matrices." + key));
  }
  return out;
}

Json to_json(const StabilityReport& report) {
  Json j;
  j["role"] = std::string(to_string(report.role));
  j["eigen_moduli"] = report.eigen_moduli;
  j["max_modulus"] = report.max_modulus;
  j["stable"] = report.stable;
  return j;
}

Json to_json(const CusumReport& report, const std::vector<std::string>& labels) {
  Json j;
  j["role"] = std::string(to_string(report.role));
  j["alpha"] = report.alpha;
  j["critical_value"] = report.critical_value;
  Json eqs = Json::array();
  for (std::size_t i = 0; i < report.equations.size(); ++i) {
    Json e;
    e["country"] = i < labels.size() ? labels[i] : std::to_string(i);
    e["sup_stat"] = report.equations[i].sup_stat;
    e["rejected"] = report.equations[i].rejected;
    eqs.push_back(std::move(e));
  }
  j["equations"] = std::move(eqs);
  j["any_rejected"] = report.any_rejected();
  return j;
}

std::string format_weight(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

void write_adjacency_csv(std::ostream& out, const WeightedAdjacency& adj) {
  out << corner_label(adj.role);
  for (const auto& l : adj.labels) out << ',' << l;
  out << '\n';
  for (Eigen::Index i = 0; i < adj.matrix.rows(); ++i) {
    out << adj.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < adj.matrix.cols(); ++j) out << ',' << format_weight(adj.matrix(i, j));
    out << '\n';
  }
}

AdjacencyTable read_adjacency_csv(std::istream& in) {
  AdjacencyTable table;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty adjacency CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = detail::split_csv_line(line);
  table.corner = header.front();
  table.labels.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(table.labels.size());
  table.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw SchemaError("adjacency CSV has too few rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto cells = detail::split_csv_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != n + 1 ||
        cells.front() != table.labels[static_cast<std::size_t>(i)]) {
      throw SchemaError("adjacency CSV row " + std::to_string(i + 2) + " is malformed");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[static_cast<std::size_t>(j + 1)], v)) {
        throw ParseError("adjacency CSV row " + std::to_string(i + 2) + ", column " +
                         std::to_string(j + 2) + ": non-numeric value");
      }
      table.matrix(i, j) = v;
    }
  }
  return table;
}

void write_dot(std::ostream& out, const WeightedAdjacency& adj) {
  const std::string name(to_string(adj.role));
  out << "digraph G_" << name << " {\n";
  out << "  // " << to_string(source_kind(adj.role)) << " of source -> "
      << to_string(target_kind(adj.role)) << " of target; entry (i,j) is edge j -> i\n";
  out << "  label=\"G_" << name << " (alpha=" << format_double(adj.alpha) << ")\";\n";
  out << "  node [shape=circle];\n";
  for (const auto& l : adj.labels) out << "  \"" << l << "\";\n";
  for (Eigen::Index i = 0; i < adj.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < adj.matrix.cols(); ++j) {
      const double w = adj.matrix(i, j);
      if (w == 0.0) continue;
      out << "  \"" << adj.labels[static_cast<std::size_t>(j)] << "\" -> \""
          << adj.labels[static_cast<std::size_t>(i)] << "\" [color="
          << (w > 0.0 ? "blue" : "red") << ", label=\"" << format_weight(w) << "\"];\n";
    }
  }
  out << "}\n";
}

void write_cusum_csv(std::ostream& out, const CusumReport& report,
                     const std::vector<std::string>& labels) {
  out << "step";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  if (report.equations.empty()) return;
  const Eigen::Index steps = report.equations.front().path.size();
  for (Eigen::Index m = 0; m < steps; ++m) {
    out << (m + 1);
    for (const auto& eq : report.equations) out << ',' << format_double(eq.path(m));
    out << '\n';
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace corrnet
