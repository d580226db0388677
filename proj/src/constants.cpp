#include "rdt/constants.hpp"

#include <cmath>

namespace rdt {

double xi_residual(double x) { return x * x * x * x + x * x - 1; }

double kappa_residual(double k) {
  const double s = 1 - std::sqrt(3.0) * k;
  return k * k * k * k - 4 * (1 - k * k) * s * s;
}

namespace {

template <typename F, typename D>
double bisect_newton(F f, D df, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const double d = df(x);
    if (d == 0) break;
    const double next = x - f(x) / d;
    if (!(next > lo - 1e-12 && next < hi + 1e-12)) break;
    x = next;
  }
  return x;
}

Constants compute() {
  Constants c;
  c.xi = bisect_newton(xi_residual, [](double x) { return 4 * x * x * x + 2 * x; }, 0.0, 1.0);
  const double r3 = std::sqrt(3.0);
  c.kappa = bisect_newton(
      kappa_residual,
      [r3](double k) {
        const double s = 1 - r3 * k;
        return 4 * k * k * k + 8 * k * s * s + 8 * r3 * (1 - k * k) * s;
      },
      0.0, 1 / r3);
  c.xi_threshold = c.xi / (c.xi + 1);
  c.kappa_threshold = c.kappa / (c.kappa + 1);
  c.eta_domain = std::sqrt(4 * std::sqrt(5.0) - 8);
  c.xi_residual = xi_residual(c.xi);
  c.kappa_residual = kappa_residual(c.kappa);
  return c;
}

}  // namespace

const Constants& constants() {
  static const Constants c = compute();
  return c;
}

}  // namespace rdt
