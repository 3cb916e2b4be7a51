#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corrnet/error.hpp"
#include "corrnet/least_squares.hpp"
#include "corrnet/synthgen.hpp"
#include "corrnet/varx.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>
#include <random>

using namespace corrnet;

namespace {

Panel random_panel(std::mt19937_64& rng, Eigen::Index T, Eigen::Index n) {
  Panel p;
  for (Eigen::Index j = 0; j < n; ++j) p.labels.push_back("C" + std::to_string(j));
  Quarter q{2000, 1};
  for (Eigen::Index t = 0; t < T; ++t, q = q.next()) p.quarters.push_back(q);
  p.x = oracle::gaussian_matrix(rng, T, n);
  p.y = oracle::gaussian_matrix(rng, T, n);
  return p;
}

Panel permuted(const Panel& p, const std::vector<int>& perm) {
  Panel out = p;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    out.labels[j] = p.labels[static_cast<std::size_t>(perm[j])];
    out.x.col(static_cast<Eigen::Index>(j)) = p.x.col(perm[j]);
    out.y.col(static_cast<Eigen::Index>(j)) = p.y.col(perm[j]);
  }
  return out;
}

}  // namespace

TEST_CASE("design layout") {
  Eigen::MatrixXd x(4, 2), y(4, 2);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  y << 10, 20, 30, 40, 50, 60, 70, 80;
  const auto X = build_design(x, y, 2, 2);
  REQUIRE(X.rows() == 2);
  REQUIRE(X.cols() == 9);
  // row t=2: 1 | x[1] x[0] | y[1] y[0]
  Eigen::VectorXd expect(9);
  expect << 1, 3, 4, 1, 2, 30, 40, 10, 20;
  CHECK(X.row(0).transpose() == expect);
  const auto names = design_column_names(EquationRole::Gdp, 2, {"A", "B"}, 2);
  CHECK(names[0] == "intercept");
  CHECK(names[1].find("A") != std::string::npos);
  CHECK(minimum_periods(13, 1) == 1 + 2 + 26);
}

TEST_CASE("coefficients match the normal-equations oracle") {
  std::mt19937_64 rng(2024);
  for (int inst = 0; inst < 20; ++inst) {
    const Eigen::Index n = 1 + inst % 3;
    const int p = 1 + inst % 2;
    const Eigen::Index T = minimum_periods(n, p) + 6;
    const Panel panel = random_panel(rng, T, n);
    const auto fit = fit_coupled(panel, p);
    for (auto role : {EquationRole::Gdp, EquationRole::Cpi}) {
      const auto& line = fit.line(role);
      const auto B = line.coefficient_matrix();
      const auto X = oracle::design(endog_of(panel, role), exog_of(panel, role), p, p);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto beta = oracle::normal_equations(X, oracle::column(endog_of(panel, role), static_cast<int>(i), p));
        for (Eigen::Index c = 0; c < beta.size(); ++c) {
          const double ref = static_cast<double>(beta(c));
          CHECK(std::fabs(B(c, i) - ref) <= 1e-8 * std::max(std::fabs(ref), 1e-3));
        }
      }
    }
  }
}

TEST_CASE("log-likelihood matches a row-wise Gaussian density") {
  std::mt19937_64 rng(5);
  const Panel panel = random_panel(rng, 40, 3);
  const auto fit = fit_coupled(panel, 2);
  for (const auto* line : {&fit.gdp, &fit.cpi}) {
    const double ref = oracle::mvn_loglik(line->residuals, line->resid_cov);
    CHECK(log_likelihood(*line) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("property: orthogonality, rss consistency, PSD covariance") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n = 1 + rep % 4;
    const int p = 1 + rep % 3;
    const Panel panel = random_panel(rng, minimum_periods(n, p) + 10 + rep, n);
    const auto fit = fit_coupled(panel, p);
    for (auto role : {EquationRole::Gdp, EquationRole::Cpi}) {
      const auto& line = fit.line(role);
      const auto X = build_design(endog_of(panel, role), exog_of(panel, role), p, p);
      const Eigen::MatrixXd inner = X.transpose() * line.residuals;
      for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double scale = X.col(c).norm() * line.residuals.colwise().norm().maxCoeff();
        CHECK(inner.row(c).cwiseAbs().maxCoeff() <= 1e-8 * scale);
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sq = line.residuals.col(i).squaredNorm();
        CHECK(std::fabs(line.rss_per_equation(i) - sq) <= 1e-12 * sq);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(line.resid_cov);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      CHECK(line.residual_dof() == line.observations() - line.regressor_count);
    }
  }
}

TEST_CASE("property: exact fit on noise-free data") {
  // The GDP line generated without noise from arbitrary stable coefficients,
  // driven by a random exogenous block so every design column is informative.
  std::mt19937_64 rng(31);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const int p = 1 + static_cast<int>(seed % 2);
    const Eigen::Index n = 3, T = 60;
    const auto spec = random_stable_spec(n, p, seed, 0.8);
    const Eigen::MatrixXd y = oracle::gaussian_matrix(rng, T, n);
    Eigen::MatrixXd x = oracle::gaussian_matrix(rng, T, n);
    for (Eigen::Index t = p; t < T; ++t) {
      Eigen::VectorXd v = spec.b;
      for (int s = 1; s <= p; ++s)
        v += spec.phi[s - 1] * x.row(t - s).transpose() + spec.pi[s - 1] * y.row(t - s).transpose();
      x.row(t) = v.transpose();
    }
    const auto fit = fit_varx(x, y, p, EquationRole::Gdp);
    double err = (fit.intercept - spec.b).cwiseAbs().maxCoeff();
    for (int s = 0; s < p; ++s) {
      err = std::max(err, (fit.endog_coefs[s] - spec.phi[s]).cwiseAbs().maxCoeff());
      err = std::max(err, (fit.exog_coefs[s] - spec.pi[s]).cwiseAbs().maxCoeff());
    }
    CHECK(err <= 1e-8);
    CHECK(fit.residuals.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("noise-free simulated path has zero residuals under min_norm") {
  // Modes of a deterministic path decay geometrically, so the design is
  // numerically rank deficient and only the residuals are pinned down.
  auto spec = random_stable_spec(2, 1, 9, 0.8);
  spec.noise_free = true;
  spec.burn_in = 0;
  const Panel panel = simulate(spec, 40);
  const auto fit = fit_coupled(panel, 1, RankPolicy::MinNorm);
  CHECK(fit.gdp.residuals.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(fit.cpi.residuals.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("exact recovery with a full-rank noise-free design") {
  // n=1, p=1: x_t = b + phi x_{t-1} + pi y_{t-1}, y from its own rule with
  // an input that keeps the regressors linearly independent.
  const Eigen::Index T = 30;
  Panel panel;
  panel.labels = {"A"};
  Quarter q{2000, 1};
  for (Eigen::Index t = 0; t < T; ++t, q = q.next()) panel.quarters.push_back(q);
  panel.x.resize(T, 1);
  panel.y.resize(T, 1);
  panel.x(0, 0) = 1.0;
  for (Eigen::Index t = 0; t < T; ++t) panel.y(t, 0) = std::sin(0.7 * static_cast<double>(t * t));
  for (Eigen::Index t = 1; t < T; ++t) panel.x(t, 0) = 0.3 + 0.6 * panel.x(t - 1, 0) - 0.4 * panel.y(t - 1, 0);
  const auto fit = fit_varx(panel.x, panel.y, 1, EquationRole::Gdp);
  CHECK(std::fabs(fit.intercept(0) - 0.3) <= 1e-8);
  CHECK(std::fabs(fit.endog_coefs[0](0, 0) - 0.6) <= 1e-8);
  CHECK(std::fabs(fit.exog_coefs[0](0, 0) + 0.4) <= 1e-8);
  CHECK(fit.residuals.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("property: permutation equivariance") {
  std::mt19937_64 rng(3);
  const Panel panel = random_panel(rng, 30, 3);
  const std::vector<int> perm{2, 0, 1};
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
  for (int j = 0; j < 3; ++j) P(j, perm[static_cast<std::size_t>(j)]) = 1.0;
  const auto a = fit_coupled(panel, 2);
  const auto b = fit_coupled(permuted(panel, perm), 2);
  for (auto role : {EquationRole::Gdp, EquationRole::Cpi}) {
    const auto& la = a.line(role);
    const auto& lb = b.line(role);
    CHECK((lb.intercept - P * la.intercept).cwiseAbs().maxCoeff() <= 1e-10);
    for (int s = 0; s < 2; ++s) {
      CHECK((lb.endog_coefs[s] - P * la.endog_coefs[s] * P.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((lb.exog_coefs[s] - P * la.exog_coefs[s] * P.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    }
    CHECK((lb.resid_cov - P * la.resid_cov * P.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("errors") {
  std::mt19937_64 rng(1);
  SUBCASE("too few periods") {
    const Panel panel = random_panel(rng, minimum_periods(3, 2) - 1, 3);
    CHECK_THROWS_AS(fit_coupled(panel, 2), DimensionError);
    CHECK_THROWS_AS(fit_coupled(random_panel(rng, 20, 2), 0), DimensionError);
  }
  SUBCASE("collinear columns are named under strict") {
    Panel panel = random_panel(rng, 30, 3);
    panel.x.col(2) = 2.0 * panel.x.col(0) - panel.x.col(1);
    try {
      fit_coupled(panel, 1);
      FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("GDP line") != std::string::npos);
      CHECK(msg.find("C2") != std::string::npos);
    }
    const auto fit = fit_coupled(panel, 1, RankPolicy::MinNorm);
    CHECK(fit.gdp.rank == fit.gdp.regressor_count - 1);
  }
  SUBCASE("constant series makes the design singular") {
    Panel panel = random_panel(rng, 30, 2);
    panel.y.col(1).setConstant(5.0);
    CHECK_THROWS_AS(fit_coupled(panel, 1), SingularityError);
  }
}

TEST_CASE("standard errors use residual dof") {
  std::mt19937_64 rng(8);
  const Panel panel = random_panel(rng, 25, 1);
  const auto fit = fit_varx(panel.x, panel.y, 1, EquationRole::Gdp);
  const auto X = build_design(panel.x, panel.y, 1, 1);
  const Eigen::MatrixXd G = (X.transpose() * X).inverse();
  const double s2 = fit.rss_per_equation(0) / static_cast<double>(fit.residual_dof());
  const auto se = fit.standard_errors();
  for (Eigen::Index c = 0; c < 3; ++c) CHECK(se(c, 0) == doctest::Approx(std::sqrt(s2 * G(c, c))).epsilon(1e-9));
}

TEST_CASE("lag selection") {
  SUBCASE("white noise picks p=1") {
    std::mt19937_64 rng(12);
    const Panel panel = random_panel(rng, 200, 2);
    const auto sel = select_lag(panel, 2, InformationCriterion::Bic);
    CHECK(sel.chosen_p == 1);
    CHECK(sel.scores.size() == 2);
    for (const auto& [p, s] : sel.scores) {
      CHECK(std::isfinite(s.first));
      CHECK(std::isfinite(s.second));
    }
  }
  SUBCASE("chosen p minimises the summed score") {
    const auto spec = random_stable_spec(2, 2, 77, 0.8);
    const Panel panel = simulate(spec, 300);
    for (auto crit : {InformationCriterion::Aic, InformationCriterion::Bic}) {
      const auto sel = select_lag(panel, 3, crit);
      int best = 0;
      double best_score = 0;
      for (const auto& [p, s] : sel.scores)
        if (best == 0 || s.first + s.second < best_score) {
          best = p;
          best_score = s.first + s.second;
        }
      CHECK(sel.chosen_p == best);
    }
  }
  SUBCASE("scores use the sample trimmed at p_max") {
    std::mt19937_64 rng(4);
    const Panel panel = random_panel(rng, 60, 2);
    const auto sel = select_lag(panel, 3, InformationCriterion::Aic);
    const auto f1g = fit_varx_from(panel.x, panel.y, 1, 3, EquationRole::Gdp);
    const double N = static_cast<double>(f1g.observations());
    REQUIRE(N == 57);
    const double expect = std::log(f1g.resid_cov.determinant()) + 2.0 * 2 * (1 + 2 * 2 * 1) / N;
    CHECK(sel.scores.at(1).first == doctest::Approx(expect).epsilon(1e-12));
  }
}
