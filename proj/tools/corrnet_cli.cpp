// corrnet: estimate the coupled GDP/CPI VARX system, extract Granger
// networks, run stability diagnostics and export the results.

#include "corrnet/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"--gdp", "gdp_csv", "Quarterly GDP CSV"},
    {"--cpi", "cpi_csv", "CPI CSV (annual or quarterly)"},
    {"--cpi-frequency", "cpi_frequency", "annual|quarterly"},
    {"--anchor", "anchor", "Quarter of the year annual values sit at (Q1..Q4)"},
    {"-p,--p", "p", "Lag order"},
    {"--p-max", "p_max", "Largest lag order for information-criterion selection"},
    {"--criterion", "criterion", "aic|bic|both"},
    {"--alpha", "alpha", "Significance level"},
    {"--correction", "correction", "none|bonferroni|bh"},
    {"--rank-policy", "rank_policy", "strict|min_norm"},
    {"-o,--out", "out_dir", "Output directory"},
    {"--formats", "formats", "Comma list of csv,dot,json"},
    {"--diagnostics", "diagnostics", "true|false (run only)"},
    {"--panel", "panel", "Aligned panel CSV (default <out>/panel.csv)"},
    {"--model", "model", "Model JSON (default <out>/model.json)"},
    {"--spec", "spec", "Generator spec JSON (simulate)"},
    {"-T,--T", "T", "Number of periods to simulate"},
    {"--seed", "seed", "Seed override for simulate"},
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_flags(Command& cmd) {
  cmd.app->add_option("-c,--config", cmd.config_file, "Flat key=value config file");
  for (const auto& f : kFlags) {
    cmd.options[f.key] = cmd.app->add_option(f.name, cmd.values[f.key], f.help);
  }
}

corrnet::RunConfig resolve(const Command& cmd) {
  corrnet::RunConfig config;
  if (!cmd.config_file.empty()) corrnet::apply_config_file(config, cmd.config_file);
  for (const auto& [key, opt] : cmd.options) {
    if (opt->count() == 0) continue;
    config.set(key, cmd.values.at(key));
    if (key == "p") config.p_max.reset();
    if (key == "p_max") config.p.reset();
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled GDP/CPI vector autoregression and Granger-causality networks"};
  app.require_subcommand(1);

  std::map<std::string, Command> commands;
  const std::pair<const char*, const char*> subs[] = {
      {"ingest", "Load, interpolate and align GDP and CPI series into a panel"},
      {"fit", "Estimate both VARX lines (fixed p or selected by AIC/BIC)"},
      {"network", "Granger block F-tests and the four weighted adjacency matrices"},
      {"diagnose", "Companion-root stability and OLS-CUSUM checks"},
      {"simulate", "Simulate a panel from a generator spec"},
      {"run", "Full pipeline: ingest, fit, network, diagnose"},
  };
  for (const auto& [name, help] : subs) {
    Command& cmd = commands[name];
    cmd.app = app.add_subcommand(name, help);
    add_flags(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? corrnet::kExitOk : corrnet::kExitUsage;
  }

  try {
    for (auto& [name, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      corrnet::RunConfig config;
      try {
        config = resolve(cmd);
      } catch (const corrnet::Error& e) {
        throw corrnet::StageFailure(corrnet::kExitUsage, e.what());
      }

      if (name == "ingest") {
        corrnet::cmd_ingest(config, std::cout);
      } else if (name == "fit") {
        try {
          config.require_lag_choice();
        } catch (const corrnet::Error& e) {
          throw corrnet::StageFailure(corrnet::kExitUsage, e.what());
        }
        const auto panel = [&] {
          try {
            return corrnet::load_panel_csv(config.panel_path());
          } catch (const corrnet::Error& e) {
            throw corrnet::StageFailure(corrnet::kExitFit, e.what());
          }
        }();
        corrnet::cmd_fit(config, panel, std::cout);
      } else if (name == "network" || name == "diagnose") {
        const int code = name == "network" ? corrnet::kExitNetwork : corrnet::kExitDiagnose;
        corrnet::Panel panel;
        corrnet::ModelFile model;
        try {
          panel = corrnet::load_panel_csv(config.panel_path());
          model = corrnet::model_from_json(corrnet::read_json_file(config.model_path()));
        } catch (const corrnet::Error& e) {
          throw corrnet::StageFailure(code, e.what());
        }
        if (name == "network") {
          corrnet::cmd_network(config, model, panel, std::cout);
        } else {
          const auto outcome = corrnet::cmd_diagnose(config, model, panel, std::cerr);
          std::cout << "stable=" << (outcome.stable() ? "true" : "false")
                    << " max_modulus(gdp)=" << outcome.gdp_stability.max_modulus
                    << " max_modulus(cpi)=" << outcome.cpi_stability.max_modulus << "\n";
        }
      } else if (name == "simulate") {
        const auto panel = corrnet::cmd_simulate(config);
        std::cout << "simulated T=" << panel.periods() << " n=" << panel.countries() << " -> "
                  << (config.out_dir / "panel.csv").string() << "\n";
      } else if (name == "run") {
        return corrnet::cmd_run(config, std::cout, std::cerr);
      }
    }
  } catch (const corrnet::StageFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  }
  return corrnet::kExitOk;
}
