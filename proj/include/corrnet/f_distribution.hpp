#pragma once

namespace corrnet {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of the F(d1, d2) distribution at x >= 0.
double f_cdf(double x, int d1, int d2);

/// Upper tail 1 - f_cdf(x, d1, d2), evaluated without cancellation.
double f_sf(double x, int d1, int d2);

}  // namespace corrnet
