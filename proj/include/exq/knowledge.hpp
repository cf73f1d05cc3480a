#pragma once

#include <span>
#include <variant>
#include <vector>

#include "exq/embedding.hpp"

namespace exq {

class MixtureWeights {
 public:
  explicit MixtureWeights(RVec weights);

  const RVec& weights() const { return w_; }
  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[i]; }

 private:
  RVec w_;
};

// Column-stochastic outcome post-processing matrix: entry (j, i) is the
// probability of reporting new outcome j given original outcome i.
class DitherMatrix {
 public:
  explicit DitherMatrix(RMat q);

  const RMat& matrix() const { return q_; }
  int rows() const { return static_cast<int>(q_.rows()); }
  int cols() const { return static_cast<int>(q_.cols()); }

 private:
  RMat q_;
};

GptState mix_preparations(std::span<const GptState> states, const MixtureWeights& q);

// Disjoint-union mixture of two measurements; outcome labels are prefixed
// with the source measurement's label so outcome identity survives mixing.
GptMeasurement mix_measurements(const GptMeasurement& m1, const GptMeasurement& m2,
                                const MixtureWeights& q);

GptMeasurement dither_measurement(const GptMeasurement& m, const DitherMatrix& q);

struct MixWith {
  GptMeasurement other;
  MixtureWeights weights;
};
struct ApplyDither {
  DitherMatrix matrix;
};
using MeasurementOp = std::variant<MixWith, ApplyDither>;

GptMeasurement compose(GptMeasurement m, std::span<const MeasurementOp> ops);

} // namespace exq
