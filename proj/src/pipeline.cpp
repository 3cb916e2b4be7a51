#include "corrnet/pipeline.hpp"

#include "corrnet/csv_util.hpp"
#include "corrnet/diagnostics.hpp"
#include "corrnet/hash.hpp"
#include "corrnet/random.hpp"
#include "corrnet/synthgen.hpp"

#include <charconv>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

namespace corrnet {

namespace fs = std::filesystem;

namespace {

template <class F>
auto guarded(int code, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageFailure&) {
    throw;
  } catch (const UsageError& e) {
    throw StageFailure(kExitUsage, e.what());
  } catch (const Error& e) {
    throw StageFailure(code, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw StageFailure(code, e.what());
  }
}

int parse_int(std::string_view key, std::string_view value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw UsageError(std::string(key) + ": expected an integer, got '" + std::string(value) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw UsageError(std::string(key) + ": expected true/false, got '" + std::string(value) + "'");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Fnv1a h;
  h.update(bytes);
  return hex64(h.digest());
}

std::string hash_text(const std::string& text) {
  Fnv1a h;
  h.update(text);
  return hex64(h.digest());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void ensure_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw Error("cannot create output directory " + config.out_dir.string());
}

std::string fit_stage_key(const RunConfig& config, const std::string& panel_hash) {
  std::ostringstream key;
  key << "stage=fit\n";
  if (config.p) key << "p=" << *config.p << "\n";
  if (config.p_max) key << "p_max=" << *config.p_max << "\ncriterion=" << config.criterion << "\n";
  key << "rank_policy=" << to_string(config.rank_policy) << "\npanel=" << panel_hash << "\n";
  return key.str();
}

std::string format_score(double v) {
  std::ostringstream s;
  s << std::setprecision(8) << v;
  return s.str();
}

void check_model_matches_panel(const ModelFile& model, const Panel& panel) {
  if (model.labels != panel.labels) throw DimensionError("model labels differ from panel labels");
  if (model.periods != 0 && model.periods != panel.periods()) {
    throw DimensionError("model was fitted on T=" + std::to_string(model.periods) +
                         " periods, panel has T=" + std::to_string(panel.periods()));
  }
}

}  // namespace

void RunConfig::set(std::string_view key_in, std::string_view value_in, const fs::path& base_dir) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  auto path = [&]() {
    fs::path p(value);
    return (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
  };
  if (key == "gdp_csv" || key == "gdp") {
    gdp_csv = path();
  } else if (key == "cpi_csv" || key == "cpi") {
    cpi_csv = path();
  } else if (key == "cpi_frequency") {
    if (value == "annual") cpi_frequency = Frequency::Annual;
    else if (value == "quarterly") cpi_frequency = Frequency::Quarterly;
    else throw UsageError("cpi_frequency must be annual or quarterly");
  } else if (key == "anchor") {
    std::string_view v = value;
    if (!v.empty() && (v.front() == 'Q' || v.front() == 'q')) v.remove_prefix(1);
    anchor = parse_int(key, v);
    if (anchor < 1 || anchor > 4) throw UsageError("anchor must be Q1..Q4");
  } else if (key == "p") {
    p = parse_int(key, value);
    if (*p < 1) throw UsageError("p must be >= 1");
  } else if (key == "p_max") {
    p_max = parse_int(key, value);
    if (*p_max < 1) throw UsageError("p_max must be >= 1");
  } else if (key == "criterion") {
    if (value != "aic" && value != "bic" && value != "both") {
      throw UsageError("criterion must be aic, bic or both");
    }
    criterion = value;
  } else if (key == "alpha") {
    if (!detail::parse_double(value, alpha) || !(alpha > 0.0 && alpha < 1.0)) {
      throw UsageError("alpha must be a number in (0, 1)");
    }
  } else if (key == "correction") {
    correction = parse_correction(value);
  } else if (key == "rank_policy") {
    rank_policy = parse_rank_policy(value);
  } else if (key == "out_dir" || key == "output") {
    out_dir = path();
  } else if (key == "formats") {
    formats.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item != "csv" && item != "dot" && item != "json") {
        throw UsageError("unknown export format '" + item + "' (csv, dot, json)");
      }
      formats.insert(item);
    }
  } else if (key == "diagnostics") {
    diagnostics = parse_bool(key, value);
  } else if (key == "panel") {
    panel_csv = path();
  } else if (key == "model") {
    model_json = path();
  } else if (key == "spec") {
    spec_json = path();
  } else if (key == "T") {
    periods = parse_int(key, value);
  } else if (key == "seed") {
    std::uint64_t s = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw UsageError("seed must be a non-negative integer");
    }
    seed = s;
  } else {
    throw UsageError("unknown configuration key '" + key + "'");
  }
}

void RunConfig::require_lag_choice() const {
  if (p.has_value() == p_max.has_value()) {
    throw UsageError("exactly one of p or p_max must be given");
  }
}

fs::path RunConfig::panel_path() const {
  return panel_csv.empty() ? out_dir / "panel.csv" : panel_csv;
}

fs::path RunConfig::model_path() const {
  return model_json.empty() ? out_dir / "model.json" : model_json;
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["cpi_frequency"] = std::string(to_string(cpi_frequency));
  kv["anchor"] = "Q" + std::to_string(anchor);
  if (p) kv["p"] = std::to_string(*p);
  if (p_max) kv["p_max"] = std::to_string(*p_max);
  kv["criterion"] = criterion;
  kv["alpha"] = format_double(alpha);
  kv["correction"] = std::string(to_string(correction));
  kv["rank_policy"] = std::string(to_string(rank_policy));
  std::string f;
  for (const auto& x : formats) f += (f.empty() ? "" : ",") + x;
  kv["formats"] = f;
  kv["diagnostics"] = diagnostics ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

void apply_config_file(RunConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    config.set(t.substr(0, eq), t.substr(eq + 1), base);
  }
}

RunConfig load_config_file(const fs::path& path) {
  RunConfig config;
  apply_config_file(config, path);
  return config;
}

std::string reproducible_timestamp() {
  const char* env = std::getenv("SOURCE_DATE_EPOCH");
  if (env == nullptr || *env == '\0') return {};
  long long secs = 0;
  auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), secs);
  if (ec != std::errc{}) return {};
  const std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Panel cmd_ingest(const RunConfig& config, std::ostream& log) {
  return guarded(kExitIngest, [&] {
    if (config.gdp_csv.empty() || config.cpi_csv.empty()) {
      throw UsageError("ingest needs both gdp_csv and cpi_csv");
    }
    ensure_out_dir(config);
    std::ostringstream text;

    const auto gdp = load_series_csv(config.gdp_csv, VariableKind::Gdp, Frequency::Quarterly);
    const auto cpi_raw = load_series_csv(config.cpi_csv, VariableKind::Cpi, config.cpi_frequency);

    const std::string key = "stage=ingest\ncpi_frequency=" +
                            std::string(to_string(config.cpi_frequency)) + "\nanchor=Q" +
                            std::to_string(config.anchor) + "\ngdp=" + file_hash(config.gdp_csv) +
                            "\ncpi=" + file_hash(config.cpi_csv) + "\n";
    text << "config_hash=" << hash_text(key) << "\n";
    text << "gdp: file=" << config.gdp_csv.filename().string() << " rows_read=" << gdp.periods.size()
         << " countries=" << gdp.labels.size() << " span=" << gdp.period_label(0) << ".."
         << gdp.period_label(gdp.periods.size() - 1) << "\n";
    text << "cpi: file=" << config.cpi_csv.filename().string() << " rows_read="
         << cpi_raw.periods.size() << " countries=" << cpi_raw.labels.size()
         << " frequency=" << to_string(config.cpi_frequency) << " span=" << cpi_raw.period_label(0)
         << ".." << cpi_raw.period_label(cpi_raw.periods.size() - 1) << "\n";

    RawSeriesSet cpi;
    if (config.cpi_frequency == Frequency::Annual) {
      cpi = interpolate_annual_to_quarterly(cpi_raw, config.anchor);
      text << "interpolation: linear, anchor=Q" << config.anchor << ", quarterly rows="
           << cpi.periods.size() << " span=" << cpi.period_label(0) << ".."
           << cpi.period_label(cpi.periods.size() - 1) << "\n";
    } else {
      cpi = cpi_raw;
      text << "interpolation: skipped (cpi_frequency=quarterly)\n";
    }

    const Panel panel = align_panel(gdp, cpi);
    const int first = panel.quarters.front().ordinal();
    const int last = panel.quarters.back().ordinal();
    auto trimmed = [&](const RawSeriesSet& s) {
      std::string list;
      for (std::size_t r = 0; r < s.periods.size(); ++r) {
        if (s.periods[r] < first || s.periods[r] > last) {
          list += (list.empty() ? "" : " ") + s.period_label(r);
        }
      }
      return list.empty() ? std::string("none") : list;
    };
    text << "alignment: T=" << panel.periods() << " n=" << panel.countries()
         << " span=" << panel.quarters.front().str() << ".." << panel.quarters.back().str() << "\n";
    text << "trimmed gdp quarters: " << trimmed(gdp) << "\n";
    text << "trimmed cpi quarters: " << trimmed(cpi) << "\n";
    text << "panel_hash=" << hex64(panel_hash(panel)) << "\n";

    save_panel_csv(config.out_dir / "panel.csv", panel);
    write_text_file(config.out_dir / "ingest.log", text.str());
    log << text.str();
    return panel;
  });
}

ModelFile cmd_fit(const RunConfig& config, const Panel& panel, std::ostream& out) {
  return guarded(kExitFit, [&] {
    config.require_lag_choice();
    ensure_out_dir(config);
    const std::string phash = hex64(panel_hash(panel));
    Json lag = nullptr;
    int p = 0;
    if (config.p) {
      p = *config.p;
    } else {
      const int p_max = *config.p_max;
      const bool want_aic = config.criterion != "bic";
      const bool want_bic = config.criterion != "aic";
      std::optional<LagSelection> aic, bic;
      if (want_aic) aic = select_lag(panel, p_max, InformationCriterion::Aic, config.rank_policy);
      if (want_bic) bic = select_lag(panel, p_max, InformationCriterion::Bic, config.rank_policy);

      std::ostringstream csv, table;
      csv << "p";
      table << std::left << std::setw(4) << "p";
      for (const auto* name : {"aic", "bic"}) {
        if ((name[0] == 'a' && !aic) || (name[0] == 'b' && !bic)) continue;
        for (const auto* part : {"gdp", "cpi", "total"}) {
          csv << "," << name << "_" << part;
          table << std::setw(16) << (std::string(name) + "_" + part);
        }
      }
      csv << "\n";
      table << "\n";
      Json rows = Json::array();
      for (int lag_p = 1; lag_p <= p_max; ++lag_p) {
        csv << lag_p;
        table << std::setw(4) << lag_p;
        Json row;
        row["p"] = lag_p;
        for (const auto* sel : {&aic, &bic}) {
          if (!*sel) continue;
          const auto [g, c] = (*sel)->scores.at(lag_p);
          const std::string name(to_string((*sel)->criterion));
          csv << "," << format_double(g) << "," << format_double(c) << "," << format_double(g + c);
          table << std::setw(16) << format_score(g) << std::setw(16) << format_score(c)
                << std::setw(16) << format_score(g + c);
          row[name + "_gdp"] = g;
          row[name + "_cpi"] = c;
          row[name + "_total"] = g + c;
        }
        csv << "\n";
        table << "\n";
        rows.push_back(std::move(row));
      }
      p = bic ? bic->chosen_p : aic->chosen_p;
      lag = Json::object();
      lag["criterion"] = config.criterion;
      lag["p_max"] = p_max;
      lag["chosen_p"] = p;
      if (aic) lag["aic_choice"] = aic->chosen_p;
      if (bic) lag["bic_choice"] = bic->chosen_p;
      lag["scores"] = std::move(rows);
      out << table.str();
      out << "chosen p=" << p;
      if (aic && bic && aic->chosen_p != bic->chosen_p) {
        out << " (BIC; AIC prefers p=" << aic->chosen_p << ")";
      }
      out << "\n";
      write_text_file(config.out_dir / "lag_selection.csv", csv.str());
    }

    const CoupledFit fit = fit_coupled(panel, p, config.rank_policy);
    ModelFile model = model_from_fit(fit);
    model.lag_selection = lag;
    model.provenance.config_hash = hash_text(fit_stage_key(config, phash));
    model.provenance.panel_hash = phash;
    model.provenance.created = reproducible_timestamp();
    write_text_file(config.out_dir / "model.json", dump(to_json(model)));
    out << "fitted p=" << p << " n=" << panel.countries() << " T=" << panel.periods()
        << " rank(gdp)=" << fit.gdp.rank << "/" << fit.gdp.regressor_count
        << " rank(cpi)=" << fit.cpi.rank << "/" << fit.cpi.regressor_count << "\n";
    return model;
  });
}

CausalityNetwork cmd_network(const RunConfig& config, const ModelFile& model, const Panel& panel,
                             std::ostream& out) {
  return guarded(kExitNetwork, [&] {
    check_model_matches_panel(model, panel);
    ensure_out_dir(config);
    const CoupledFit fit = fit_coupled(panel, model.p, model.rank_policy);
    if (fit.gdp.coefficient_matrix() != model.gdp.coefficient_matrix() ||
        fit.cpi.coefficient_matrix() != model.cpi.coefficient_matrix()) {
      throw DimensionError("model coefficients are not the least-squares fit of this panel");
    }
    const CausalityNetwork net = assemble_network(panel, fit, config.alpha, config.correction);

    const std::string phash = hex64(panel_hash(panel));
    Provenance prov;
    prov.panel_hash = phash;
    prov.created = model.provenance.created;
    prov.config_hash = hash_text("stage=network\nalpha=" + format_double(config.alpha) +
                                 "\ncorrection=" + std::string(to_string(config.correction)) +
                                 "\nmodel=" + model.provenance.config_hash + "\npanel=" + phash +
                                 "\n");

    for (auto role : kAllRoles) {
      const auto& adj = net.get(role);
      const std::string name(to_string(role));
      if (config.formats.count("csv")) {
        std::ostringstream s;
        write_adjacency_csv(s, adj);
        write_text_file(config.out_dir / ("adjacency_" + name + ".csv"), s.str());
      }
      if (config.formats.count("dot")) {
        std::ostringstream s;
        write_dot(s, adj);
        write_text_file(config.out_dir / ("network_" + name + ".dot"), s.str());
      }
      out << "G_" << name << ": " << (adj.matrix.array() != 0.0).count() << " edges, "
          << adj.tests.size() << " tests, " << adj.untestable.size() << " untestable\n";
    }
    if (config.formats.count("json")) {
      write_text_file(config.out_dir / "network.json", dump(to_json(net, model, prov)));
    }
    return net;
  });
}

DiagnoseOutcome cmd_diagnose(const RunConfig& config, const ModelFile& model, const Panel& panel,
                             std::ostream& err) {
  return guarded(kExitDiagnose, [&] {
    cusum_critical_value(config.alpha);  // UsageError for unsupported alpha
    check_model_matches_panel(model, panel);
    ensure_out_dir(config);

    DiagnoseOutcome outcome;
    Json lines = Json::object();
    for (auto role : {EquationRole::Gdp, EquationRole::Cpi}) {
      const ModelLine& line = role == EquationRole::Gdp ? model.gdp : model.cpi;
      const VarxFit fit = evaluate_varx(endog_of(panel, role), exog_of(panel, role), model.p, role,
                                        line.coefficient_matrix(), model.rank_policy);
      auto stability = companion_stability(fit);
      auto cusum = ols_cusum(fit, config.alpha);
      Json j;
      j["stability"] = to_json(stability);
      j["cusum"] = to_json(cusum, panel.labels);
      lines[std::string(to_string(role))] = std::move(j);

      std::ostringstream csv;
      write_cusum_csv(csv, cusum, panel.labels);
      write_text_file(config.out_dir / ("cusum_" + std::string(to_string(role)) + ".csv"),
                      csv.str());
      if (role == EquationRole::Gdp) {
        outcome.gdp_stability = std::move(stability);
        outcome.gdp_cusum = std::move(cusum);
      } else {
        outcome.cpi_stability = std::move(stability);
        outcome.cpi_cusum = std::move(cusum);
      }
    }

    const std::string phash = hex64(panel_hash(panel));
    Provenance prov;
    prov.panel_hash = phash;
    prov.created = model.provenance.created;
    Fnv1a coef_hash;
    for (const auto* line : {&model.gdp, &model.cpi}) {
      const Eigen::MatrixXd b = line->coefficient_matrix();
      for (Eigen::Index k = 0; k < b.size(); ++k) coef_hash.update(b.data()[k]);
    }
    prov.config_hash =
        hash_text("stage=diagnose\nalpha=" + format_double(config.alpha) + "\ncoefficients=" +
                  hex64(coef_hash.digest()) + "\npanel=" + phash + "\n");

    Json report;
    report["schema_version"] = kSchemaVersion;
    report["kind"] = "diagnostics";
    report["labels"] = panel.labels;
    report["p"] = model.p;
    report["alpha"] = config.alpha;
    report["stable"] = outcome.stable();
    report["cusum_rejected"] = outcome.gdp_cusum.any_rejected() || outcome.cpi_cusum.any_rejected();
    report["lines"] = std::move(lines);
    Json pj;
    pj["config_hash"] = prov.config_hash;
    pj["panel_hash"] = prov.panel_hash;
    pj["timestamps"]["created"] = prov.created.empty() ? Json(nullptr) : Json(prov.created);
    report["provenance"] = std::move(pj);
    write_text_file(config.out_dir / "diagnostics.json", dump(report));

    if (!outcome.stable()) {
      err << "WARN: model is not dynamically stable (max companion modulus gdp="
          << outcome.gdp_stability.max_modulus << ", cpi=" << outcome.cpi_stability.max_modulus
          << ")\n";
    }
    if (outcome.gdp_cusum.any_rejected() || outcome.cpi_cusum.any_rejected()) {
      err << "WARN: OLS-CUSUM rejects parameter stability for at least one equation at alpha="
          << config.alpha << "\n";
    }
    return outcome;
  });
}

Panel cmd_simulate(const RunConfig& config) {
  return guarded(kExitSimulate, [&] {
    if (config.spec_json.empty()) throw UsageError("simulate needs a spec file");
    if (config.periods < 1) throw UsageError("simulate needs T >= 1");
    GeneratorSpec spec = spec_from_json(read_json_file(config.spec_json));
    if (config.seed) spec.seed = *config.seed;
    const Panel panel = simulate(spec, config.periods);
    ensure_out_dir(config);
    save_panel_csv(config.out_dir / "panel.csv", panel);
    return panel;
  });
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.diagnostics) {
    guarded(kExitUsage, [&] { return cusum_critical_value(config.alpha); });
  }
  if (config.p.has_value() == config.p_max.has_value()) {
    throw StageFailure(kExitUsage, "exactly one of p or p_max must be given");
  }
  const Panel panel = cmd_ingest(config, out);
  const ModelFile model = cmd_fit(config, panel, out);
  const CausalityNetwork net = cmd_network(config, model, panel, out);
  std::optional<DiagnoseOutcome> diag;
  if (config.diagnostics) diag = cmd_diagnose(config, model, panel, err);

  Json report;
  report["schema_version"] = kSchemaVersion;
  report["kind"] = "run_report";
  const std::string inputs = "gdp=" + file_hash(config.gdp_csv) + "\ncpi=" +
                             file_hash(config.cpi_csv) + "\n";
  report["config_hash"] = hash_text(config.canonical() + inputs);
  Json cfg = Json::object();
  std::istringstream lines(config.canonical());
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    cfg[line.substr(0, eq)] = line.substr(eq + 1);
  }
  report["config"] = std::move(cfg);
  report["algorithms"] = {
      {"least_squares", config.rank_policy == RankPolicy::Strict
                            ? "Householder QR, column-equilibrated design"
                            : "complete orthogonal decomposition, minimum norm, column-equilibrated"},
      {"rank_tolerance", kRankTolerance},
      {"f_distribution", "regularized incomplete beta, continued fraction (modified Lentz)"},
      {"eigenvalues", "real Schur (Eigen::EigenSolver)"},
      {"rng", Xoshiro256::kName},
      {"normal_variates", NormalSampler::kName}};
  report["stages"] = {{"panel_hash", hex64(panel_hash(panel))},
                      {"model_config_hash", model.provenance.config_hash}};
  Json summary;
  summary["T"] = panel.periods();
  summary["n"] = panel.countries();
  summary["p"] = model.p;
  for (auto role : kAllRoles) {
    const auto& adj = net.get(role);
    summary["edges"][std::string(to_string(role))] = (adj.matrix.array() != 0.0).count();
    summary["untestable"][std::string(to_string(role))] = adj.untestable.size();
  }
  if (diag) {
    summary["stable"] = diag->stable();
    summary["cusum_rejected"] = diag->gdp_cusum.any_rejected() || diag->cpi_cusum.any_rejected();
  }
  report["summary"] = std::move(summary);
  const std::string created = reproducible_timestamp();
  report["timestamps"]["created"] = created.empty() ? Json(nullptr) : Json(created);
  write_text_file(config.out_dir / "run_report.json", dump(report));
  return kExitOk;
}

}  // namespace corrnet
