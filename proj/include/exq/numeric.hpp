#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace exq {

// Fixed-order pairwise (binary-tree) summation. Deterministic for a given
// array order, independent of how the array was filled.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 32) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// log(sum exp(v_i)) with max shift; -inf entries are skipped.
inline double logsumexp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m; // all -inf (or empty)
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Compensated (Kahan) accumulator; the result is insensitive, to within a
// couple of ulps of the term magnitudes, to the order the terms arrive in.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

} // namespace exq
