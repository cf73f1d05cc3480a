#include "exq/rng.hpp"

#include <cmath>

#include "exq/error.hpp"

namespace exq {

double SplitMix64::next_gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; both outputs are used, so one pair of uniforms yields two draws.
  const double u1 = next_open_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double SplitMix64::next_gamma(double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::bad_spec, "gamma shape must be positive", alpha);
  }
  if (alpha < 1.0) {
    // Boost to shape alpha + 1 and scale back (Marsaglia & Tsang).
    const double u = next_open_double();
    return next_gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_open_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Eigen::VectorXd SplitMix64::next_dirichlet(const Eigen::VectorXd& alpha) {
  Eigen::VectorXd g(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    g[i] = next_gamma(alpha[i]);
  }
  const double total = g.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::internal, "dirichlet draw degenerated to zero");
  }
  return g / total;
}

} // namespace exq
