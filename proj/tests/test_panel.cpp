#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corrnet/error.hpp"
#include "corrnet/panel.hpp"

#include <random>
#include <sstream>
#include <string>

using namespace corrnet;

namespace {

RawSeriesSet parse(const std::string& text, VariableKind kind, Frequency freq) {
  std::istringstream in(text);
  return parse_series_csv(in, kind, freq);
}

std::string quarterly_csv(Quarter start, int rows, int n, double base = 100.0) {
  std::ostringstream out;
  out << "period";
  for (int j = 0; j < n; ++j) out << ",C" << j;
  out << "\n";
  Quarter q = start;
  for (int r = 0; r < rows; ++r, q = q.next()) {
    out << q.str();
    for (int j = 0; j < n; ++j) out << "," << base + r + 0.25 * j;
    out << "\n";
  }
  return out.str();
}

RawSeriesSet annual(std::vector<std::string> labels, int first_year, Eigen::MatrixXd values) {
  RawSeriesSet s;
  s.kind = VariableKind::Cpi;
  s.frequency = Frequency::Annual;
  s.labels = std::move(labels);
  for (Eigen::Index r = 0; r < values.rows(); ++r) s.periods.push_back(first_year + static_cast<int>(r));
  s.values = std::move(values);
  return s;
}

template <class E, class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("quarter parsing and ordering") {
  const auto q = Quarter::parse("2015Q2");
  CHECK(q.year == 2015);
  CHECK(q.q == 2);
  CHECK(q.str() == "2015Q2");
  CHECK(Quarter::parse("2015Q4").next().str() == "2016Q1");
  CHECK(Quarter{2015, 4} < Quarter{2016, 1});
  CHECK_THROWS_AS((void)Quarter::parse("2015Q5"), ParseError);
  CHECK_THROWS_AS((void)Quarter::parse("2015-2"), ParseError);
}

TEST_CASE("3-country quarterly file with 45 rows") {
  const auto s = parse(quarterly_csv({2012, 4}, 45, 3), VariableKind::Gdp, Frequency::Quarterly);
  CHECK(s.values.rows() == 45);
  CHECK(s.values.cols() == 3);
  CHECK(s.labels == std::vector<std::string>{"C0", "C1", "C2"});
  CHECK(s.period_label(0) == "2012Q4");
  CHECK(s.period_label(44) == "2023Q4");
}

TEST_CASE("CRLF line endings are accepted") {
  const auto s = parse("period,A\r\n2020Q1,1\r\n2020Q2,2\r\n", VariableKind::Gdp, Frequency::Quarterly);
  CHECK(s.values.rows() == 2);
  CHECK(s.values(1, 0) == 2.0);
}

TEST_CASE("period gap names the missing quarter") {
  const std::string text = "period,A\n2015Q1,1\n2015Q3,2\n";
  const auto msg = error_of<ContinuityError>(
      [&] { parse(text, VariableKind::Gdp, Frequency::Quarterly); });
  CHECK(msg.find("2015Q2") != std::string::npos);
}

TEST_CASE("duplicate period is a continuity error") {
  CHECK_THROWS_AS(parse("period,A\n2015Q1,1\n2015Q1,2\n", VariableKind::Gdp, Frequency::Quarterly),
                  ContinuityError);
}

TEST_CASE("malformed header names the column") {
  const auto msg = error_of<SchemaError>(
      [&] { parse("period,A,,B\n2015Q1,1,2,3\n", VariableKind::Gdp, Frequency::Quarterly); });
  CHECK(msg.find("column 3") != std::string::npos);
  CHECK_THROWS_AS(parse("when,A\n2015Q1,1\n", VariableKind::Gdp, Frequency::Quarterly), SchemaError);
  CHECK_THROWS_AS(parse("period,A,A\n2015Q1,1,2\n", VariableKind::Gdp, Frequency::Quarterly),
                  SchemaError);
}

TEST_CASE("non-numeric cell reports row and column") {
  const auto msg = error_of<ParseError>(
      [&] { parse("period,A,B\n2015Q1,1,2\n2015Q2,3,x\n", VariableKind::Gdp, Frequency::Quarterly); });
  CHECK(msg.find("row 3") != std::string::npos);
  CHECK(msg.find("B") != std::string::npos);
  CHECK_THROWS_AS(parse("period,A\n2015Q1,1,000\n", VariableKind::Gdp, Frequency::Quarterly), Error);
}

TEST_CASE("interpolation examples") {
  SUBCASE("constant series stays constant") {
    const auto q = interpolate_annual_to_quarterly(
        annual({"A"}, 2012, Eigen::MatrixXd::Constant(5, 1, 50.0)), 4);
    CHECK(q.frequency == Frequency::Quarterly);
    CHECK((q.values.array() == 50.0).all());
  }
  SUBCASE("40 -> 44 at Q4 steps by one") {
    Eigen::MatrixXd v(2, 1);
    v << 40, 44;
    const auto q = interpolate_annual_to_quarterly(annual({"A"}, 2012, v), 4);
    REQUIRE(q.values.rows() == 5);
    CHECK(q.period_label(0) == "2012Q4");
    CHECK(q.values(1, 0) == 41.0);
    CHECK(q.values(2, 0) == 42.0);
    CHECK(q.values(3, 0) == 43.0);
    CHECK(q.values(4, 0) == 44.0);
  }
  SUBCASE("12 years anchored at Q4 give 45 quarters") {
    const auto q = interpolate_annual_to_quarterly(
        annual({"A", "B"}, 2012, Eigen::MatrixXd::Random(12, 2)), 4);
    CHECK(q.values.rows() == 45);
    CHECK(q.period_label(0) == "2012Q4");
    CHECK(q.period_label(44) == "2023Q4");
  }
  SUBCASE("fewer than two points") {
    CHECK_THROWS_AS(interpolate_annual_to_quarterly(annual({"A"}, 2012, Eigen::MatrixXd::Ones(1, 1))),
                    InsufficientDataError);
  }
}

TEST_CASE("property: anchors reproduced bit-for-bit, affine equivariance") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(50.0, 20.0);
  for (int anchor = 1; anchor <= 4; ++anchor) {
    Eigen::MatrixXd v(9, 3);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = N(rng);
    const auto base = annual({"A", "B", "C"}, 2001, v);
    const auto q = interpolate_annual_to_quarterly(base, anchor);
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const Eigen::Index row = 4 * r;  // anchors are 4 quarters apart
      CHECK(q.period_label(static_cast<std::size_t>(row)) ==
            Quarter{2001 + static_cast<int>(r), anchor}.str());
      for (Eigen::Index j = 0; j < 3; ++j) CHECK(q.values(row, j) == v(r, j));
    }
    const double a = -1.7, b = 3.25;
    auto shifted = base;
    shifted.values = (a * v.array() + b).matrix();
    const auto qs = interpolate_annual_to_quarterly(shifted, anchor);
    const Eigen::MatrixXd expect = (a * q.values.array() + b).matrix();
    const double scale = expect.cwiseAbs().maxCoeff();
    CHECK((qs.values - expect).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("align_panel") {
  const auto gdp = parse(quarterly_csv({2012, 4}, 45, 3), VariableKind::Gdp, Frequency::Quarterly);
  SUBCASE("identical calendars keep T") {
    auto cpi = gdp;
    cpi.kind = VariableKind::Cpi;
    const auto panel = align_panel(gdp, cpi);
    CHECK(panel.periods() == 45);
    CHECK(panel.countries() == 3);
  }
  SUBCASE("extra GDP quarter is dropped") {
    const auto gdp46 = parse(quarterly_csv({2012, 4}, 46, 3), VariableKind::Gdp, Frequency::Quarterly);
    auto cpi = gdp;
    cpi.kind = VariableKind::Cpi;
    const auto panel = align_panel(gdp46, cpi);
    CHECK(panel.periods() == 45);
    CHECK(panel.quarters.back().str() == "2023Q4");
  }
  SUBCASE("columns follow GDP order") {
    auto cpi = parse("period,C2,C0,C1\n2012Q4,2,0,1\n2013Q1,2,0,1\n", VariableKind::Cpi,
                     Frequency::Quarterly);
    const auto panel = align_panel(gdp, cpi);
    CHECK(panel.labels == gdp.labels);
    CHECK(panel.y(0, 0) == 0.0);
    CHECK(panel.y(0, 2) == 2.0);
  }
  SUBCASE("label mismatch lists the difference") {
    auto cpi = parse("period,C0,C1,ZZ\n2012Q4,1,2,3\n", VariableKind::Cpi, Frequency::Quarterly);
    const auto msg = error_of<LabelError>([&] { align_panel(gdp, cpi); });
    CHECK(msg.find("ZZ") != std::string::npos);
    CHECK(msg.find("C2") != std::string::npos);
  }
  SUBCASE("disjoint calendars") {
    const auto cpi = parse(quarterly_csv({1990, 1}, 4, 3), VariableKind::Cpi, Frequency::Quarterly);
    CHECK_THROWS_AS(align_panel(gdp, cpi), AlignmentError);
  }
}

TEST_CASE("property: align is idempotent and the panel CSV round trips exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  RawSeriesSet g;
  g.kind = VariableKind::Gdp;
  g.labels = {"AAA", "BBB", "CCC", "DDD"};
  Quarter q{1999, 3};
  for (int r = 0; r < 30; ++r, q = q.next()) g.periods.push_back(q.ordinal());
  g.values.resize(30, 4);
  for (Eigen::Index i = 0; i < g.values.size(); ++i) g.values.data()[i] = U(rng) / 3.0;
  auto c = g;
  c.kind = VariableKind::Cpi;
  c.values = g.values.array().square().matrix() * 1e-7;
  c.values(3, 1) = 0.1 + 0.2;  // a value with no short decimal form

  const Panel panel = align_panel(g, c);

  RawSeriesSet gx = g, cy = c;
  gx.values = panel.x;
  cy.values = panel.y;
  const Panel again = align_panel(gx, cy);
  CHECK(again.x == panel.x);
  CHECK(again.y == panel.y);
  CHECK(again.labels == panel.labels);

  std::ostringstream out;
  write_panel_csv(out, panel);
  CHECK(out.str().rfind("period,GDP:AAA,GDP:BBB,GDP:CCC,GDP:DDD,CPI:AAA", 0) == 0);
  std::istringstream in(out.str());
  const Panel back = read_panel_csv(in);
  CHECK(back.x == panel.x);
  CHECK(back.y == panel.y);
  CHECK(back.quarters == panel.quarters);
  CHECK(panel_hash(back) == panel_hash(panel));
}

TEST_CASE("series CSV round trip") {
  const auto s = parse(quarterly_csv({2001, 1}, 6, 2, 0.1), VariableKind::Gdp, Frequency::Quarterly);
  std::ostringstream out;
  write_series_csv(out, s);
  const auto back = parse(out.str(), VariableKind::Gdp, Frequency::Quarterly);
  CHECK(back.values == s.values);
  CHECK(back.periods == s.periods);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(41.0) == "41");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}
