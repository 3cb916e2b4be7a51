#include "corrnet/synthgen.hpp"

#include "corrnet/diagnostics.hpp"
#include "corrnet/error.hpp"
#include "corrnet/random.hpp"

#include <cmath>
#include <sstream>

namespace corrnet {

namespace {

Eigen::MatrixXd lower_factor(const Eigen::MatrixXd& cov, const char* name) {
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw DefinitenessError(std::string(name) + " is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError(std::string(name) + " is not positive definite");
  }
  return llt.matrixL();
}

void check_stack(const std::vector<Eigen::MatrixXd>& stack, Eigen::Index n, int p,
                 const char* name) {
  if (static_cast<int>(stack.size()) != p) {
    throw DimensionError(std::string(name) + " must hold p lag matrices");
  }
  for (const auto& m : stack) {
    if (m.rows() != n || m.cols() != n) {
      throw DimensionError(std::string(name) + " lag matrices must be n x n");
    }
  }
}

}  // namespace

GeneratorSpec GeneratorSpec::zeros(Eigen::Index n, int p) {
  GeneratorSpec spec;
  spec.n = n;
  spec.p = p;
  spec.b = Eigen::VectorXd::Zero(n);
  spec.c = Eigen::VectorXd::Zero(n);
  for (auto* stack : {&spec.phi, &spec.pi, &spec.psi, &spec.gamma}) {
    stack->assign(static_cast<std::size_t>(p), Eigen::MatrixXd::Zero(n, n));
  }
  spec.omega = 0.01 * Eigen::MatrixXd::Identity(n, n);
  spec.sigma = spec.omega;
  return spec;
}

void GeneratorSpec::validate() const {
  if (n < 1 || p < 1) throw DimensionError("generator needs n >= 1 and p >= 1");
  if (b.size() != n || c.size() != n) throw DimensionError("intercepts must have length n");
  check_stack(phi, n, p, "phi");
  check_stack(pi, n, p, "pi");
  check_stack(psi, n, p, "psi");
  check_stack(gamma, n, p, "gamma");
  if (burn_in < 0) throw DimensionError("burn_in must be >= 0");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionError("labels must have length n");
  }
  if (!noise_free) {
    if (omega.rows() != n || omega.cols() != n || sigma.rows() != n || sigma.cols() != n) {
      throw DimensionError("noise covariances must be n x n");
    }
    lower_factor(omega, "omega");
    lower_factor(sigma, "sigma");
  }
  const double radius = joint_spectral_radius(*this);
  if (!(radius < 1.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "generator is not stationary: joint spectral radius " << radius << " >= 1";
    throw StationarityError(msg.str());
  }
}

std::vector<Eigen::MatrixXd> joint_lag_matrices(const GeneratorSpec& spec) {
  std::vector<Eigen::MatrixXd> lags;
  const Eigen::Index n = spec.n;
  for (int s = 0; s < spec.p; ++s) {
    const auto k = static_cast<std::size_t>(s);
    Eigen::MatrixXd a(2 * n, 2 * n);
    a << spec.phi[k], spec.pi[k], spec.gamma[k], spec.psi[k];
    lags.push_back(std::move(a));
  }
  return lags;
}

double joint_spectral_radius(const GeneratorSpec& spec) {
  return companion_moduli(joint_lag_matrices(spec)).front();
}

Panel simulate(const GeneratorSpec& spec, Eigen::Index T) {
  spec.validate();
  if (T < spec.p + 2) throw DimensionError("T must be at least p + 2");

  const Eigen::Index n = spec.n;
  const int p = spec.p;
  const Eigen::Index total = spec.burn_in + T;
  // Rows 0..p-1 hold the zero initial conditions.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total + p, n);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(total + p, n);

  Eigen::MatrixXd l_omega, l_sigma;
  if (!spec.noise_free) {
    l_omega = lower_factor(spec.omega, "omega");
    l_sigma = lower_factor(spec.sigma, "sigma");
  }
  NormalSampler normal(spec.seed);
  Eigen::VectorXd e1(n), e2(n);

  for (Eigen::Index t = p; t < total + p; ++t) {
    Eigen::VectorXd xt = spec.b;
    Eigen::VectorXd yt = spec.c;
    for (int s = 1; s <= p; ++s) {
      const auto k = static_cast<std::size_t>(s - 1);
      const auto xl = x.row(t - s).transpose();
      const auto yl = y.row(t - s).transpose();
      xt += spec.phi[k] * xl + spec.pi[k] * yl;
      yt += spec.psi[k] * yl + spec.gamma[k] * xl;
    }
    if (!spec.noise_free) {
      for (Eigen::Index i = 0; i < n; ++i) e1(i) = normal();
      for (Eigen::Index i = 0; i < n; ++i) e2(i) = normal();
      xt += l_omega * e1;
      yt += l_sigma * e2;
    }
    x.row(t) = xt.transpose();
    y.row(t) = yt.transpose();
  }

  Panel panel;
  panel.x = x.bottomRows(T);
  panel.y = y.bottomRows(T);
  if (spec.labels.empty()) {
    for (Eigen::Index j = 0; j < n; ++j) panel.labels.push_back("C" + std::to_string(j + 1));
  } else {
    panel.labels = spec.labels;
  }
  for (Eigen::Index t = 0; t < T; ++t) {
    panel.quarters.push_back(Quarter::from_ordinal(spec.start.ordinal() + static_cast<int>(t)));
  }
  return panel;
}

GeneratorSpec random_stable_spec(Eigen::Index n, int p, std::uint64_t seed, double target_radius) {
  if (!(target_radius > 0.0 && target_radius < 1.0)) {
    throw UsageError("target_radius must lie in (0, 1)");
  }
  GeneratorSpec spec = GeneratorSpec::zeros(n, p);
  spec.seed = seed;
  NormalSampler normal(seed ^ 0x5eedc0ffee123457ULL);
  const double scale = 1.0 / std::sqrt(static_cast<double>(2 * n * p));
  for (auto* stack : {&spec.phi, &spec.pi, &spec.psi, &spec.gamma}) {
    for (auto& m : *stack) {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = scale * normal();
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) spec.b(i) = normal();
  for (Eigen::Index i = 0; i < n; ++i) spec.c(i) = normal();

  const double radius = joint_spectral_radius(spec);
  if (!(radius > 0.0)) throw NumericalError("degenerate random draw (zero spectral radius)");
  // Scaling lag s by r^s scales every companion eigenvalue by r.
  const double r = target_radius / radius;
  for (auto* stack : {&spec.phi, &spec.pi, &spec.psi, &spec.gamma}) {
    double f = r;
    for (auto& m : *stack) {
      m *= f;
      f *= r;
    }
  }
  return spec;
}

}  // namespace corrnet
