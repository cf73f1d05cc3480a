#pragma once

#include <span>
#include <string>
#include <vector>

#include "exq/complex_matrix.hpp"

namespace exq {

// Unit-trace positive-semidefinite Hermitian matrix. Validates eagerly;
// immutable afterwards.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMat m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& matrix() const { return m_; }

  double purity() const;

 private:
  CMat m_;
};

// Measurement-outcome operator with spectrum in [0, 1].
class Effect {
 public:
  explicit Effect(CMat m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& matrix() const { return m_; }

 private:
  CMat m_;
};

class Povm {
 public:
  Povm(std::string label, std::vector<Effect> effects,
       std::vector<std::string> outcome_labels = {});

  const std::string& label() const { return label_; }
  const std::vector<Effect>& effects() const { return effects_; }
  const std::vector<std::string>& outcome_labels() const { return outcome_labels_; }
  int dim() const { return effects_.front().dim(); }
  int outcome_count() const { return static_cast<int>(effects_.size()); }

 private:
  std::string label_;
  std::vector<Effect> effects_;
  std::vector<std::string> outcome_labels_;
};

class PureState {
 public:
  explicit PureState(CVec amplitudes);

  int dim() const { return static_cast<int>(v_.size()); }
  const CVec& amplitudes() const { return v_; }
  CMat projector() const { return v_ * v_.adjoint(); }

 private:
  CVec v_;
};

// Trace-preserving Kraus map.
class Transformation {
 public:
  Transformation(std::string label, std::vector<CMat> kraus_ops);

  const std::string& label() const { return label_; }
  const std::vector<CMat>& kraus_ops() const { return kraus_; }
  int dim() const { return static_cast<int>(kraus_.front().rows()); }

 private:
  std::string label_;
  std::vector<CMat> kraus_;
};

DensityMatrix validate_density(CMat m);

double trace_probability(const Effect& effect, const DensityMatrix& rho);
RVec outcome_distribution(const Povm& m, const DensityMatrix& rho);
double born_probability(const PureState& psi_i, const PureState& psi_k);
double expectation_value(const RVec& values, const Povm& m, const DensityMatrix& rho);
DensityMatrix apply_transformation(const Transformation& t, const DensityMatrix& rho);
Povm projective_measurement(std::span<const PureState> vectors, std::string label = "projective");

// Clamp a raw probability into [0, 1]; anything farther than tol::prob_clamp
// outside the interval is an error, not noise.
double clamp_probability(double raw);

// Eigenvalues of a Hermitian matrix, ascending.
RVec hermitian_eigenvalues(const CMat& m);

nlohmann::ordered_json povm_to_json(const Povm& m);

} // namespace exq
