#pragma once

namespace rdt {

/// Sampling constants, computed from their defining equations.
struct Constants {
  double xi = 0;            // positive root of x^4 + x^2 - 1
  double kappa = 0;         // root of k^4 = 4(1 - k^2)(1 - sqrt(3) k)^2 with sqrt(3) k < 1
  double xi_threshold = 0;  // xi / (xi + 1)
  double kappa_threshold = 0;
  double eps_sample = 0.3245;
  double eps_voronoi = 0.4132;
  double eta_domain = 0;  // sqrt(4 sqrt(5) - 8)
  double xi_residual = 0;
  double kappa_residual = 0;
};

double xi_residual(double x);
double kappa_residual(double k);

/// Computed once on first use.
const Constants& constants();

}  // namespace rdt
