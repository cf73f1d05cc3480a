#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exq/hilbert.hpp"

namespace exq {

// Hilbert-Schmidt orthonormal Hermitian basis fixing the real embedding.
// Element order: B_0 = I/sqrt(n); then for each index pair (j, k) with
// 1 <= j < k <= n in lexicographic order, the symmetric then the
// antisymmetric generalized Gell-Mann matrix; then the diagonal ones
// l = 1..n-1. All scaled to tr(B_a B_b) = delta_ab. For n = 2 this is
// {I, sigma_x, sigma_y, sigma_z} / sqrt(2).
class HermitianBasis {
 public:
  static HermitianBasis standard(int n);

  int dim() const { return n_; }
  int dim_real() const { return n_ * n_; }
  const std::vector<CMat>& elements() const { return elements_; }

 private:
  HermitianBasis(int n, std::vector<CMat> elements)
      : n_(n), elements_(std::move(elements)) {}
  int n_;
  std::vector<CMat> elements_;
};

struct GptState {
  RVec coords;
  int dim_real() const { return static_cast<int>(coords.size()); }
};

struct GptEffect {
  RVec coords;
  int dim_real() const { return static_cast<int>(coords.size()); }
};

struct GptMeasurement {
  std::string label;
  std::vector<std::string> outcome_labels;
  std::vector<GptEffect> effects;

  int outcome_count() const { return static_cast<int>(effects.size()); }
  int dim_real() const { return effects.front().dim_real(); }
};

// Outcome probabilities of a GPT measurement on a state, clamped and
// checked for normalization like the matrix-level route.
RVec gpt_outcome_distribution(const GptMeasurement& m, const GptState& s);

struct GptSystem {
  enum class Kind { classical, quantum, custom };
  Kind kind;
  int size = 0; // k for classical, n for quantum
  std::vector<GptState> extremal_states; // finite generating set; empty for quantum
  std::vector<GptMeasurement> measurements;
};

GptState embed_state(const DensityMatrix& rho, const HermitianBasis& basis);
GptEffect embed_effect(const Effect& e, const HermitianBasis& basis);
CMat unembed(const RVec& coords, const HermitianBasis& basis);
GptMeasurement embed_povm(const Povm& m, const HermitianBasis& basis);

double vector_probability(const GptEffect& o, const GptState& s);

// Classical k-outcome system. States are probability vectors padded with a
// trailing normalization coordinate, coords = (p_1..p_k, 1). The fine-grained
// measurement projects out the k probability coordinates.
GptSystem classical_system(int k);

struct DistinguishabilityResult {
  bool distinguishable = false;
  double overlap = 0.0;            // tr(rho1 rho2)
  std::optional<Povm> witness;     // {P_supp(rho1), I - P_supp(rho1)} when true
};

DistinguishabilityResult perfectly_distinguishable(const DensityMatrix& rho1,
                                                   const DensityMatrix& rho2);

// Escape hatch for a raw linear map on embedded states. The result is
// unembedded and re-validated; maps that leave the state space are rejected.
DensityMatrix apply_state_map(const RMat& map, const DensityMatrix& rho,
                              const HermitianBasis& basis);

nlohmann::ordered_json gpt_measurement_to_json(const GptMeasurement& m);
nlohmann::ordered_json gpt_system_to_json(const GptSystem& sys);

} // namespace exq
