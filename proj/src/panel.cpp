#include "corrnet/panel.hpp"

#include "corrnet/csv_util.hpp"
#include "corrnet/error.hpp"
#include "corrnet/hash.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace corrnet {

namespace detail {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::general);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace detail

namespace {

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool valid_code(std::string_view code) {
  if (code.empty()) return false;
  return std::all_of(code.begin(), code.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

int parse_year(std::string_view text) {
  int year = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), year);
  if (text.size() != 4 || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("invalid annual period '" + std::string(text) + "' (expected YYYY)");
  }
  return year;
}

std::string format_period(Frequency freq, int period) {
  return freq == Frequency::Quarterly ? Quarter::from_ordinal(period).str()
                                      : std::to_string(period);
}

void check_continuity(Frequency freq, const std::vector<int>& periods) {
  for (std::size_t r = 1; r < periods.size(); ++r) {
    const int prev = periods[r - 1];
    const int cur = periods[r];
    if (cur == prev) {
      throw ContinuityError("duplicate period " + format_period(freq, cur));
    }
    if (cur < prev) {
      throw ContinuityError("period " + format_period(freq, cur) + " out of order after " +
                            format_period(freq, prev));
    }
    if (cur != prev + 1) {
      throw ContinuityError("missing period " + format_period(freq, prev + 1) + " between " +
                            format_period(freq, prev) + " and " + format_period(freq, cur));
    }
  }
}

void check_labels(const std::vector<std::string>& labels) {
  std::unordered_set<std::string> seen;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (!valid_code(labels[j])) {
      throw SchemaError("column " + std::to_string(j + 2) + ": invalid country code '" +
                        labels[j] + "'");
    }
    if (!seen.insert(labels[j]).second) {
      throw SchemaError("column " + std::to_string(j + 2) + ": duplicate country code '" +
                        labels[j] + "'");
    }
  }
}

}  // namespace

std::string_view to_string(VariableKind kind) { return kind == VariableKind::Gdp ? "GDP" : "CPI"; }

std::string_view to_string(Frequency freq) {
  return freq == Frequency::Quarterly ? "quarterly" : "annual";
}

Quarter Quarter::from_ordinal(int ord) {
  const int year = ord >= 0 ? ord / 4 : -((-ord + 3) / 4);
  return Quarter{year, ord - year * 4 + 1};
}

Quarter Quarter::parse(std::string_view text) {
  if (text.size() != 6 || (text[4] != 'Q' && text[4] != 'q') || text[5] < '1' || text[5] > '4') {
    throw ParseError("invalid quarterly period '" + std::string(text) + "' (expected YYYYQn)");
  }
  return Quarter{parse_year(text.substr(0, 4)), text[5] - '0'};
}

std::string Quarter::str() const { return std::to_string(year) + "Q" + std::to_string(q); }

std::string RawSeriesSet::period_label(std::size_t row) const {
  return format_period(frequency, periods.at(row));
}

void RawSeriesSet::validate() const {
  check_labels(labels);
  if (labels.empty()) throw SchemaError("no country columns");
  if (values.rows() != static_cast<Eigen::Index>(periods.size()) ||
      values.cols() != static_cast<Eigen::Index>(labels.size())) {
    throw SchemaError("value matrix shape does not match periods x labels");
  }
  check_continuity(frequency, periods);
  if (!values.allFinite()) throw ParseError("non-finite value in series set");
}

void Panel::validate() const {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw AlignmentError("x and y shapes differ");
  }
  if (x.rows() < 2 || x.cols() < 1) throw AlignmentError("panel needs T >= 2 and n >= 1");
  if (static_cast<Eigen::Index>(labels.size()) != x.cols() ||
      static_cast<Eigen::Index>(quarters.size()) != x.rows()) {
    throw AlignmentError("labels/quarters do not match matrix shape");
  }
  check_labels(labels);
  for (std::size_t t = 1; t < quarters.size(); ++t) {
    if (quarters[t] != quarters[t - 1].next()) {
      throw ContinuityError("panel quarters not consecutive at " + quarters[t].str());
    }
  }
  if (!x.allFinite() || !y.allFinite()) throw ParseError("non-finite value in panel");
}

RawSeriesSet parse_series_csv(std::istream& in, VariableKind kind, Frequency frequency) {
  RawSeriesSet set;
  set.kind = kind;
  set.frequency = frequency;

  std::string line;
  if (!read_line(in, line)) throw SchemaError("empty file: missing header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = detail::split_csv_line(line);
  if (header.front() != "period") {
    throw SchemaError("column 1: expected 'period', found '" + header.front() + "'");
  }
  if (header.size() < 2) throw SchemaError("header has no country columns");
  set.labels.assign(header.begin() + 1, header.end());
  check_labels(set.labels);

  const std::size_t n = set.labels.size();
  std::vector<double> flat;
  std::size_t row = 1;
  while (read_line(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != n + 1) {
      throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(n + 1) +
                       " fields, found " + std::to_string(cells.size()));
    }
    try {
      set.periods.push_back(frequency == Frequency::Quarterly
                                ? Quarter::parse(cells[0]).ordinal()
                                : parse_year(cells[0]));
    } catch (const ParseError& e) {
      throw ParseError("row " + std::to_string(row) + ", column 1: " + e.what());
    }
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[j + 1], v)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(j + 2) +
                         " (" + set.labels[j] + "): non-numeric value '" + cells[j + 1] + "'");
      }
      flat.push_back(v);
    }
  }
  if (set.periods.empty()) throw SchemaError("no data rows");

  const auto rows = static_cast<Eigen::Index>(set.periods.size());
  set.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(flat.data(), rows,
                                                                static_cast<Eigen::Index>(n));
  set.validate();
  return set;
}

RawSeriesSet load_series_csv(const std::filesystem::path& path, VariableKind kind,
                             Frequency frequency) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  return parse_series_csv(in, kind, frequency);
}

void write_series_csv(std::ostream& out, const RawSeriesSet& set) {
  out << "period";
  for (const auto& l : set.labels) out << ',' << l;
  out << '\n';
  for (Eigen::Index r = 0; r < set.values.rows(); ++r) {
    out << set.period_label(static_cast<std::size_t>(r));
    for (Eigen::Index j = 0; j < set.values.cols(); ++j) out << ',' << format_double(set.values(r, j));
    out << '\n';
  }
}

RawSeriesSet interpolate_annual_to_quarterly(const RawSeriesSet& annual, int anchor) {
  if (annual.frequency != Frequency::Annual) {
    throw UsageError("interpolation expects an annual series set");
  }
  if (anchor < 1 || anchor > 4) throw UsageError("anchor quarter must be in 1..4");
  if (annual.periods.size() < 2) {
    throw InsufficientDataError("need at least 2 annual observations, found " +
                                std::to_string(annual.periods.size()));
  }
  annual.validate();

  RawSeriesSet out;
  out.kind = annual.kind;
  out.frequency = Frequency::Quarterly;
  out.labels = annual.labels;

  const auto years = static_cast<Eigen::Index>(annual.periods.size());
  const Eigen::Index quarters = (years - 1) * 4 + 1;
  const int first = Quarter{annual.periods.front(), anchor}.ordinal();
  out.values.resize(quarters, annual.values.cols());
  for (Eigen::Index t = 0; t < quarters; ++t) {
    out.periods.push_back(first + static_cast<int>(t));
    const Eigen::Index k = t / 4;
    const Eigen::Index offset = t % 4;
    if (offset == 0) {
      out.values.row(t) = annual.values.row(k);
    } else {
      const double w = static_cast<double>(offset) / 4.0;
      out.values.row(t) =
          annual.values.row(k) + (annual.values.row(k + 1) - annual.values.row(k)) * w;
    }
  }
  return out;
}

Panel align_panel(const RawSeriesSet& gdp, const RawSeriesSet& cpi) {
  if (gdp.frequency != Frequency::Quarterly || cpi.frequency != Frequency::Quarterly) {
    throw AlignmentError("both series sets must be quarterly before alignment");
  }
  gdp.validate();
  cpi.validate();

  std::unordered_map<std::string, Eigen::Index> cpi_col;
  for (std::size_t j = 0; j < cpi.labels.size(); ++j) {
    cpi_col.emplace(cpi.labels[j], static_cast<Eigen::Index>(j));
  }
  const std::set<std::string> g(gdp.labels.begin(), gdp.labels.end());
  const std::set<std::string> c(cpi.labels.begin(), cpi.labels.end());
  if (g != c) {
    std::string only_g, only_c;
    for (const auto& l : g) if (!c.count(l)) only_g += (only_g.empty() ? "" : " ") + l;
    for (const auto& l : c) if (!g.count(l)) only_c += (only_c.empty() ? "" : " ") + l;
    throw LabelError("label sets differ; only in GDP: [" + only_g + "]; only in CPI: [" +
                     only_c + "]");
  }

  const int start = std::max(gdp.periods.front(), cpi.periods.front());
  const int end = std::min(gdp.periods.back(), cpi.periods.back());
  if (start > end) {
    throw AlignmentError("GDP (" + gdp.period_label(0) + ".." +
                         gdp.period_label(gdp.periods.size() - 1) + ") and CPI (" +
                         cpi.period_label(0) + ".." + cpi.period_label(cpi.periods.size() - 1) +
                         ") calendars do not overlap");
  }
  const Eigen::Index T = end - start + 1;
  const Eigen::Index n = static_cast<Eigen::Index>(gdp.labels.size());
  const Eigen::Index g0 = start - gdp.periods.front();
  const Eigen::Index c0 = start - cpi.periods.front();

  Panel panel;
  panel.labels = gdp.labels;
  for (int ord = start; ord <= end; ++ord) panel.quarters.push_back(Quarter::from_ordinal(ord));
  panel.x = gdp.values.middleRows(g0, T);
  panel.y.resize(T, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    panel.y.col(j) = cpi.values.col(cpi_col.at(gdp.labels[static_cast<std::size_t>(j)])).segment(c0, T);
  }
  panel.validate();
  return panel;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
  out << "period";
  for (const auto& l : panel.labels) out << ",GDP:" << l;
  for (const auto& l : panel.labels) out << ",CPI:" << l;
  out << '\n';
  for (Eigen::Index t = 0; t < panel.periods(); ++t) {
    out << panel.quarters[static_cast<std::size_t>(t)].str();
    for (Eigen::Index j = 0; j < panel.countries(); ++j) out << ',' << format_double(panel.x(t, j));
    for (Eigen::Index j = 0; j < panel.countries(); ++j) out << ',' << format_double(panel.y(t, j));
    out << '\n';
  }
}

Panel read_panel_csv(std::istream& in) {
  std::string line;
  if (!read_line(in, line)) throw SchemaError("empty panel file");
  auto header = detail::split_csv_line(line);
  if (header.front() != "period") {
    throw SchemaError("column 1: expected 'period', found '" + header.front() + "'");
  }
  if (header.size() < 3 || (header.size() - 1) % 2 != 0) {
    throw SchemaError("panel header must list GDP and CPI columns in equal number");
  }
  const std::size_t n = (header.size() - 1) / 2;
  Panel panel;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& gcell = header[1 + j];
    const auto& ccell = header[1 + n + j];
    if (gcell.rfind("GDP:", 0) != 0) {
      throw SchemaError("column " + std::to_string(j + 2) + ": expected GDP:<code>, found '" +
                        gcell + "'");
    }
    if (ccell.rfind("CPI:", 0) != 0 || ccell.substr(4) != gcell.substr(4)) {
      throw SchemaError("column " + std::to_string(n + j + 2) + ": expected CPI:" +
                        gcell.substr(4) + ", found '" + ccell + "'");
    }
    panel.labels.push_back(gcell.substr(4));
  }

  std::vector<double> flat;
  std::size_t row = 1;
  while (read_line(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    panel.quarters.push_back(Quarter::parse(cells[0]));
    for (std::size_t j = 1; j < cells.size(); ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[j], v)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(j + 1) +
                         ": non-numeric value '" + cells[j] + "'");
      }
      flat.push_back(v);
    }
  }
  const auto T = static_cast<Eigen::Index>(panel.quarters.size());
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> all(
      flat.data(), T, 2 * N);
  panel.x = all.leftCols(N);
  panel.y = all.rightCols(N);
  panel.validate();
  return panel;
}

void save_panel_csv(const std::filesystem::path& path, const Panel& panel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_panel_csv(out, panel);
}

Panel load_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  return read_panel_csv(in);
}

std::uint64_t panel_hash(const Panel& panel) {
  Fnv1a h;
  for (const auto& l : panel.labels) {
    h.update(l);
    h.update(std::string_view("\0", 1));
  }
  for (const auto& q : panel.quarters) h.update(static_cast<std::uint64_t>(q.ordinal()));
  for (Eigen::Index j = 0; j < panel.x.cols(); ++j)
    for (Eigen::Index t = 0; t < panel.x.rows(); ++t) h.update(panel.x(t, j));
  for (Eigen::Index j = 0; j < panel.y.cols(); ++j)
    for (Eigen::Index t = 0; t < panel.y.rows(); ++t) h.update(panel.y(t, j));
  return h.digest();
}

}  // namespace corrnet
