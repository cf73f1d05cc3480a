#include "exq/knowledge.hpp"

#include <cmath>
#include <sstream>

#include "exq/error.hpp"
#include "exq/tolerances.hpp"

namespace exq {

MixtureWeights::MixtureWeights(RVec weights) : w_(std::move(weights)) {
  if (w_.size() < 1) {
    throw Error(ErrorCode::bad_weights, "mixture needs at least one weight");
  }
  if (w_.minCoeff() < -tol::weights) {
    throw Error(ErrorCode::bad_weights, "mixture weights must be non-negative",
                w_.minCoeff());
  }
  const double dev = std::abs(w_.sum() - 1.0);
  if (dev > tol::weights) {
    std::ostringstream os;
    os << "mixture weights sum to " << w_.sum() << ", not 1";
    throw Error(ErrorCode::bad_weights, os.str(), dev);
  }
}

DitherMatrix::DitherMatrix(RMat q) : q_(std::move(q)) {
  if (q_.rows() < 1 || q_.cols() < 1) {
    throw Error(ErrorCode::shape_mismatch, "dither matrix must be nonempty");
  }
  if (q_.minCoeff() < -tol::stochastic) {
    throw Error(ErrorCode::bad_weights, "dither entries must be non-negative",
                q_.minCoeff());
  }
  for (int c = 0; c < q_.cols(); ++c) {
    const double dev = std::abs(q_.col(c).sum() - 1.0);
    if (dev > tol::stochastic) {
      std::ostringstream os;
      os << "dither column " << c << " sums to " << q_.col(c).sum() << ", not 1";
      throw Error(ErrorCode::bad_weights, os.str(), dev);
    }
  }
}

GptState mix_preparations(std::span<const GptState> states, const MixtureWeights& q) {
  if (states.empty()) {
    throw Error(ErrorCode::bad_weights, "mixture needs at least one state");
  }
  if (static_cast<int>(states.size()) != q.size()) {
    throw Error(ErrorCode::length_mismatch, "state count does not match weight count");
  }
  const int d = states.front().dim_real();
  RVec coords = RVec::Zero(d);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim_real() != d) {
      throw Error(ErrorCode::dimension_mismatch, "mixed states live in different spaces");
    }
    coords += q[static_cast<int>(i)] * states[i].coords;
  }
  return GptState{std::move(coords)};
}

GptMeasurement mix_measurements(const GptMeasurement& m1, const GptMeasurement& m2,
                                const MixtureWeights& q) {
  if (q.size() != 2) {
    throw Error(ErrorCode::bad_weights, "measurement mixture takes exactly two weights");
  }
  if (m1.dim_real() != m2.dim_real()) {
    throw Error(ErrorCode::system_mismatch,
                "mixed measurements must belong to the same system");
  }
  GptMeasurement out;
  out.label = m1.label + "+" + m2.label;
  auto append = [&out](const GptMeasurement& m, double w) {
    for (std::size_t i = 0; i < m.effects.size(); ++i) {
      out.effects.push_back(GptEffect{w * m.effects[i].coords});
      out.outcome_labels.push_back(m.label + "/" + m.outcome_labels[i]);
    }
  };
  append(m1, q[0]);
  append(m2, q[1]);
  return out;
}

GptMeasurement dither_measurement(const GptMeasurement& m, const DitherMatrix& q) {
  if (q.cols() != m.outcome_count()) {
    std::ostringstream os;
    os << "dither has " << q.cols() << " columns but measurement \"" << m.label
       << "\" has " << m.outcome_count() << " outcomes";
    throw Error(ErrorCode::shape_mismatch, os.str());
  }
  GptMeasurement out;
  out.label = m.label + "~dither";
  const int d = m.dim_real();
  for (int j = 0; j < q.rows(); ++j) {
    RVec coords = RVec::Zero(d);
    for (int i = 0; i < q.cols(); ++i) {
      coords += q.matrix()(j, i) * m.effects[static_cast<std::size_t>(i)].coords;
    }
    out.effects.push_back(GptEffect{std::move(coords)});
    out.outcome_labels.push_back(std::to_string(j));
  }
  return out;
}

GptMeasurement compose(GptMeasurement m, std::span<const MeasurementOp> ops) {
  for (const auto& op : ops) {
    if (const auto* mix = std::get_if<MixWith>(&op)) {
      m = mix_measurements(m, mix->other, mix->weights);
    } else {
      m = dither_measurement(m, std::get<ApplyDither>(op).matrix);
    }
  }
  return m;
}

} // namespace exq
