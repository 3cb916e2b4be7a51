#pragma once

#include "corrnet/error.hpp"
#include "corrnet/granger.hpp"
#include "corrnet/io.hpp"
#include "corrnet/panel.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace corrnet {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIngest = 2,
  kExitFit = 3,
  kExitNetwork = 4,
  kExitDiagnose = 5,
  kExitSimulate = 6,
};

/// A stage failed; `code` is the exit code to report.
class StageFailure : public Error {
 public:
  StageFailure(int code, const std::string& what) : Error(what), code_(code) {}
  [[nodiscard]] int code() const { return code_; }

 private:
  int code_;
};

struct RunConfig {
  std::filesystem::path gdp_csv;
  std::filesystem::path cpi_csv;
  Frequency cpi_frequency = Frequency::Annual;
  int anchor = 4;
  std::optional<int> p;
  std::optional<int> p_max;
  std::string criterion = "bic";  // aic | bic | both
  double alpha = 0.05;
  Correction correction = Correction::None;
  RankPolicy rank_policy = RankPolicy::Strict;
  std::filesystem::path out_dir = "out";
  std::set<std::string> formats{"csv", "dot", "json"};
  bool diagnostics = true;
  // Stage inputs; default to files inside out_dir.
  std::filesystem::path panel_csv;
  std::filesystem::path model_json;
  std::filesystem::path spec_json;
  Eigen::Index periods = 0;  // simulate: T
  std::optional<std::uint64_t> seed;

  /// Sets one `key=value` entry; throws UsageError on unknown keys or bad values.
  /// Relative paths are resolved against `base_dir`.
  void set(std::string_view key, std::string_view value,
           const std::filesystem::path& base_dir = {});

  /// Throws UsageError unless exactly one of p and p_max is set.
  void require_lag_choice() const;

  [[nodiscard]] std::filesystem::path panel_path() const;
  [[nodiscard]] std::filesystem::path model_path() const;

  /// Analysis parameters (no paths) as sorted key=value lines.
  [[nodiscard]] std::string canonical() const;
};

/// Reads a flat key=value file (`#` comments, blank lines ignored).
RunConfig load_config_file(const std::filesystem::path& path);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// UTC timestamp from SOURCE_DATE_EPOCH, or empty when unset.
std::string reproducible_timestamp();

Panel cmd_ingest(const RunConfig& config, std::ostream& log);
ModelFile cmd_fit(const RunConfig& config, const Panel& panel, std::ostream& out);
CausalityNetwork cmd_network(const RunConfig& config, const ModelFile& model, const Panel& panel,
                             std::ostream& out);

struct DiagnoseOutcome {
  StabilityReport gdp_stability;
  StabilityReport cpi_stability;
  CusumReport gdp_cusum;
  CusumReport cpi_cusum;
  [[nodiscard]] bool stable() const { return gdp_stability.stable && cpi_stability.stable; }
  [[nodiscard]] bool warn() const {
    return !stable() || gdp_cusum.any_rejected() || cpi_cusum.any_rejected();
  }
};
DiagnoseOutcome cmd_diagnose(const RunConfig& config, const ModelFile& model, const Panel& panel,
                             std::ostream& err);

Panel cmd_simulate(const RunConfig& config);

/// ingest -> fit -> network -> diagnose, plus run_report.json. Returns the
/// exit code (0 also when diagnostics only warn).
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace corrnet
