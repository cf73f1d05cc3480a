#pragma once

// Shared generators for randomized tests. Everything is driven by SplitMix64
// substreams so failures reproduce exactly.

#include <vector>

#include "exq/hilbert.hpp"
#include "exq/rng.hpp"

namespace exq::testutil {

inline CVec random_unit_vector(SplitMix64& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
  }
  return v / v.norm();
}

inline PureState random_pure(SplitMix64& rng, int n) {
  return PureState(random_unit_vector(rng, n));
}

inline CMat random_ginibre(SplitMix64& rng, int n) {
  CMat g(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      g(r, c) = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
    }
  }
  return g;
}

inline DensityMatrix random_density(SplitMix64& rng, int n) {
  const CMat g = random_ginibre(rng, n);
  CMat w = g * g.adjoint();
  w /= w.trace().real();
  return DensityMatrix(std::move(w));
}

// Random k-outcome POVM: E_i = S^{-1/2} A_i S^{-1/2} with A_i Wishart and
// S their sum.
inline Povm random_povm(SplitMix64& rng, int n, int k, const std::string& label = "random") {
  std::vector<CMat> parts;
  CMat total = CMat::Zero(n, n);
  for (int i = 0; i < k; ++i) {
    const CMat g = random_ginibre(rng, n);
    parts.push_back(g * g.adjoint());
    total += parts.back();
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(total);
  const CMat inv_sqrt = es.operatorInverseSqrt();
  std::vector<Effect> effects;
  for (const auto& a : parts) {
    effects.emplace_back(inv_sqrt * a * inv_sqrt);
  }
  return Povm(label, std::move(effects));
}

// Random trace-preserving channel with k Kraus operators:
// K_i = G_i (sum_j G_j^dag G_j)^{-1/2}.
inline Transformation random_channel(SplitMix64& rng, int n, int k,
                                     const std::string& label = "channel") {
  std::vector<CMat> gs;
  CMat total = CMat::Zero(n, n);
  for (int i = 0; i < k; ++i) {
    gs.push_back(random_ginibre(rng, n));
    total += gs.back().adjoint() * gs.back();
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(total);
  const CMat inv_sqrt = es.operatorInverseSqrt();
  std::vector<CMat> kraus;
  for (const auto& g : gs) kraus.push_back(g * inv_sqrt);
  return Transformation(label, std::move(kraus));
}

inline PureState basis_state(int n, int k) {
  CVec v = CVec::Zero(n);
  v[k] = 1.0;
  return PureState(std::move(v));
}

inline PureState plus_x() {
  CVec v(2);
  v[0] = 1.0 / std::sqrt(2.0);
  v[1] = 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

inline PureState minus_x() {
  CVec v(2);
  v[0] = 1.0 / std::sqrt(2.0);
  v[1] = -1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

inline Povm z_measurement() {
  const PureState states[] = {basis_state(2, 0), basis_state(2, 1)};
  return projective_measurement(states, "z");
}

inline Povm x_measurement() {
  const PureState states[] = {plus_x(), minus_x()};
  return projective_measurement(states, "x");
}

} // namespace exq::testutil
