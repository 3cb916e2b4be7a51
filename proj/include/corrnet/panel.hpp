#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace corrnet {

enum class VariableKind { Gdp, Cpi };
enum class Frequency { Quarterly, Annual };

std::string_view to_string(VariableKind kind);
std::string_view to_string(Frequency freq);

/// Calendar quarter. Ordered by (year, quarter).
struct Quarter {
  int year = 0;
  int q = 1;  // 1..4

  [[nodiscard]] int ordinal() const { return year * 4 + (q - 1); }
  [[nodiscard]] static Quarter from_ordinal(int ord);
  [[nodiscard]] Quarter next() const { return from_ordinal(ordinal() + 1); }
  /// Parses `YYYYQn`; throws ParseError.
  [[nodiscard]] static Quarter parse(std::string_view text);
  [[nodiscard]] std::string str() const;

  friend auto operator<=>(const Quarter&, const Quarter&) = default;
};

/// Raw observations of one variable for a set of countries, sharing one
/// period index. `periods` holds quarter ordinals (Quarterly) or calendar
/// years (Annual); `values` is periods x countries.
struct RawSeriesSet {
  VariableKind kind = VariableKind::Gdp;
  Frequency frequency = Frequency::Quarterly;
  std::vector<std::string> labels;
  std::vector<int> periods;
  Eigen::MatrixXd values;

  [[nodiscard]] std::string period_label(std::size_t row) const;
  /// Throws on any violated invariant (labels, continuity, finiteness).
  void validate() const;
};

/// Aligned quarterly panel: x is GDP, y is CPI, both T x n with columns in
/// `labels` order.
struct Panel {
  std::vector<std::string> labels;
  std::vector<Quarter> quarters;
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;

  [[nodiscard]] Eigen::Index periods() const { return x.rows(); }
  [[nodiscard]] Eigen::Index countries() const { return x.cols(); }
  void validate() const;
};

RawSeriesSet parse_series_csv(std::istream& in, VariableKind kind, Frequency frequency);
RawSeriesSet load_series_csv(const std::filesystem::path& path, VariableKind kind,
                             Frequency frequency);
void write_series_csv(std::ostream& out, const RawSeriesSet& set);

/// Linear interpolation of annual values onto quarters. Each annual value sits
/// at quarter `anchor` (1..4) of its year; nothing is extrapolated.
RawSeriesSet interpolate_annual_to_quarterly(const RawSeriesSet& annual, int anchor = 4);

/// Joins GDP and CPI sets on their common calendar, columns in GDP order.
Panel align_panel(const RawSeriesSet& gdp, const RawSeriesSet& cpi);

/// Lossless panel CSV: `period,GDP:<code>...,CPI:<code>...`.
void write_panel_csv(std::ostream& out, const Panel& panel);
Panel read_panel_csv(std::istream& in);
void save_panel_csv(const std::filesystem::path& path, const Panel& panel);
Panel load_panel_csv(const std::filesystem::path& path);

/// Stable 64-bit content hash of a panel (labels, quarters, values).
std::uint64_t panel_hash(const Panel& panel);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace corrnet
