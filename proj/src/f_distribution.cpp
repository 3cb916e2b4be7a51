#include "corrnet/f_distribution.hpp"

#include "corrnet/error.hpp"

#include <cmath>
#include <limits>

namespace corrnet {

namespace {

// Continued fraction for I_x(a,b), modified Lentz. Converges fast for
// x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge (a=" +
                       std::to_string(a) + ", b=" + std::to_string(b) +
                       ", x=" + std::to_string(x) + ")");
}

double log_front(double a, double b, double x) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
         b * std::log1p(-x);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw UsageError("incomplete beta domain: a, b > 0 and 0 <= x <= 1");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front(a, b, x)) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front(b, a, 1.0 - x)) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, int d1, int d2) {
  if (d1 < 1 || d2 < 1) throw UsageError("F degrees of freedom must be positive");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double u = d1 * x;
  return regularized_incomplete_beta(0.5 * d1, 0.5 * d2, u / (u + d2));
}

double f_sf(double x, int d1, int d2) {
  if (d1 < 1 || d2 < 1) throw UsageError("F degrees of freedom must be positive");
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double u = d1 * x;
  // 1 - I_z(a,b) = I_{1-z}(b,a), with 1-z = d2 / (d1 x + d2).
  return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (u + d2));
}

}  // namespace corrnet
