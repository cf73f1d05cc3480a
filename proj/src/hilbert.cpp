#include "exq/hilbert.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "exq/error.hpp"
#include "exq/tolerances.hpp"

namespace exq {

namespace {

void require_square(const CMat& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorCode::dimension_mismatch, "matrix must be square and nonempty");
  }
}

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimensions " << a << " and " << b << " differ";
    throw Error(ErrorCode::dimension_mismatch, os.str());
  }
}

void require_hermitian(const CMat& m, const char* what) {
  const double dev = hermiticity_violation(m);
  if (dev > tol::hermitian) {
    std::ostringstream os;
    os << what << " is not Hermitian: max |A_ab - conj(A_ba)| = " << dev;
    throw Error(ErrorCode::not_hermitian, os.str(), dev);
  }
}

} // namespace

RVec hermitian_eigenvalues(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DensityMatrix::DensityMatrix(CMat m) : m_(std::move(m)) {
  require_square(m_);
  require_hermitian(m_, "density matrix");
  const double trace_dev = std::abs(m_.trace() - std::complex<double>(1.0, 0.0));
  if (trace_dev > tol::trace_one) {
    std::ostringstream os;
    os << "density matrix trace deviates from 1 by " << trace_dev;
    throw Error(ErrorCode::trace_not_one, os.str(), trace_dev);
  }
  const RVec ev = hermitian_eigenvalues(m_);
  if (ev.minCoeff() < -tol::psd) {
    std::ostringstream os;
    os << "density matrix has negative eigenvalue " << ev.minCoeff();
    throw Error(ErrorCode::not_positive, os.str(), ev.minCoeff());
  }
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

Effect::Effect(CMat m) : m_(std::move(m)) {
  require_square(m_);
  require_hermitian(m_, "effect");
  const RVec ev = hermitian_eigenvalues(m_);
  if (ev.minCoeff() < -tol::psd) {
    std::ostringstream os;
    os << "effect has negative eigenvalue " << ev.minCoeff();
    throw Error(ErrorCode::not_positive, os.str(), ev.minCoeff());
  }
  if (ev.maxCoeff() > 1.0 + tol::effect_upper) {
    std::ostringstream os;
    os << "effect has eigenvalue above 1: " << ev.maxCoeff();
    throw Error(ErrorCode::numeric_range, os.str(), ev.maxCoeff());
  }
}

Povm::Povm(std::string label, std::vector<Effect> effects,
           std::vector<std::string> outcome_labels)
    : label_(std::move(label)),
      effects_(std::move(effects)),
      outcome_labels_(std::move(outcome_labels)) {
  if (effects_.empty()) {
    throw Error(ErrorCode::bad_spec, "POVM needs at least one effect");
  }
  const int n = effects_.front().dim();
  for (const auto& e : effects_) require_same_dim(n, e.dim(), "POVM effects");

  if (outcome_labels_.empty()) {
    for (std::size_t i = 0; i < effects_.size(); ++i) {
      outcome_labels_.push_back(std::to_string(i));
    }
  }
  if (outcome_labels_.size() != effects_.size()) {
    throw Error(ErrorCode::length_mismatch, "POVM outcome labels must match effect count");
  }
  std::set<std::string> seen(outcome_labels_.begin(), outcome_labels_.end());
  if (seen.size() != outcome_labels_.size()) {
    throw Error(ErrorCode::bad_spec, "POVM outcome labels must be unique");
  }

  CMat sum = CMat::Zero(n, n);
  for (const auto& e : effects_) sum += e.matrix();
  const double dev = (sum - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > tol::povm_sum) {
    std::ostringstream os;
    os << "POVM \"" << label_ << "\" effects do not sum to identity, max deviation " << dev;
    throw Error(ErrorCode::check_failed, os.str(), dev);
  }
}

PureState::PureState(CVec amplitudes) : v_(std::move(amplitudes)) {
  if (v_.size() < 1) {
    throw Error(ErrorCode::dimension_mismatch, "pure state must be nonempty");
  }
  const double dev = std::abs(v_.squaredNorm() - 1.0);
  if (dev > tol::pure_norm) {
    std::ostringstream os;
    os << "pure state norm^2 deviates from 1 by " << dev;
    throw Error(ErrorCode::numeric_range, os.str(), dev);
  }
}

Transformation::Transformation(std::string label, std::vector<CMat> kraus_ops)
    : label_(std::move(label)), kraus_(std::move(kraus_ops)) {
  if (kraus_.empty()) {
    throw Error(ErrorCode::bad_spec, "transformation needs at least one Kraus operator");
  }
  const auto n = kraus_.front().rows();
  for (const auto& k : kraus_) {
    require_square(k);
    require_same_dim(static_cast<int>(n), static_cast<int>(k.rows()), "Kraus operators");
  }
  CMat sum = CMat::Zero(n, n);
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  const double dev = (sum - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > tol::kraus_sum) {
    std::ostringstream os;
    os << "transformation \"" << label_ << "\" is not trace-preserving, max deviation " << dev;
    throw Error(ErrorCode::check_failed, os.str(), dev);
  }
}

DensityMatrix validate_density(CMat m) { return DensityMatrix(std::move(m)); }

double clamp_probability(double raw) {
  if (raw < -tol::prob_clamp || raw > 1.0 + tol::prob_clamp) {
    std::ostringstream os;
    os << "probability " << raw << " is outside [0, 1] beyond the clamp window";
    throw Error(ErrorCode::numeric_range, os.str(), raw);
  }
  if (raw < 0.0) return 0.0;
  if (raw > 1.0) return 1.0;
  return raw;
}

double trace_probability(const Effect& effect, const DensityMatrix& rho) {
  require_same_dim(effect.dim(), rho.dim(), "trace_probability");
  const double raw = (effect.matrix() * rho.matrix()).trace().real();
  return clamp_probability(raw);
}

RVec outcome_distribution(const Povm& m, const DensityMatrix& rho) {
  require_same_dim(m.dim(), rho.dim(), "outcome_distribution");
  RVec p(m.outcome_count());
  for (int i = 0; i < m.outcome_count(); ++i) {
    p[i] = trace_probability(m.effects()[static_cast<std::size_t>(i)], rho);
  }
  const double dev = std::abs(p.sum() - 1.0);
  if (dev > tol::distribution_sum) {
    std::ostringstream os;
    os << "outcome distribution of \"" << m.label() << "\" sums to " << p.sum();
    throw Error(ErrorCode::check_failed, os.str(), dev);
  }
  return p;
}

double born_probability(const PureState& psi_i, const PureState& psi_k) {
  require_same_dim(psi_i.dim(), psi_k.dim(), "born_probability");
  return std::norm(psi_i.amplitudes().dot(psi_k.amplitudes()));
}

double expectation_value(const RVec& values, const Povm& m, const DensityMatrix& rho) {
  if (values.size() != m.outcome_count()) {
    throw Error(ErrorCode::length_mismatch, "outcome values must match outcome count");
  }
  const RVec p = outcome_distribution(m, rho);
  return values.dot(p);
}

DensityMatrix apply_transformation(const Transformation& t, const DensityMatrix& rho) {
  require_same_dim(t.dim(), rho.dim(), "apply_transformation");
  CMat out = CMat::Zero(rho.dim(), rho.dim());
  for (const auto& k : t.kraus_ops()) {
    out += k * rho.matrix() * k.adjoint();
  }
  return DensityMatrix(std::move(out));
}

Povm projective_measurement(std::span<const PureState> vectors, std::string label) {
  if (vectors.empty()) {
    throw Error(ErrorCode::bad_spec, "projective measurement needs at least one vector");
  }
  const int n = vectors.front().dim();
  if (static_cast<int>(vectors.size()) != n) {
    throw Error(ErrorCode::not_orthonormal,
                "projective measurement needs exactly dim orthonormal vectors");
  }
  for (std::size_t a = 0; a < vectors.size(); ++a) {
    for (std::size_t b = 0; b < vectors.size(); ++b) {
      const double overlap = std::abs(vectors[a].amplitudes().dot(vectors[b].amplitudes()));
      const double target = a == b ? 1.0 : 0.0;
      if (std::abs(overlap - target) > tol::orthonormal) {
        std::ostringstream os;
        os << "vectors " << a << " and " << b << " are not orthonormal: |<a|b>| = " << overlap;
        throw Error(ErrorCode::not_orthonormal, os.str(), std::abs(overlap - target));
      }
    }
  }
  std::vector<Effect> effects;
  effects.reserve(vectors.size());
  for (const auto& v : vectors) effects.emplace_back(v.projector());
  return Povm(std::move(label), std::move(effects));
}

nlohmann::ordered_json povm_to_json(const Povm& m) {
  nlohmann::ordered_json effects = nlohmann::ordered_json::array();
  for (const auto& e : m.effects()) effects.push_back(matrix_to_json(e.matrix()));
  return nlohmann::ordered_json{
      {"label", m.label()},
      {"outcome_labels", m.outcome_labels()},
      {"effects", std::move(effects)},
  };
}

} // namespace exq
