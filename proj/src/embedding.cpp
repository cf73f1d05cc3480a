#include "exq/embedding.hpp"

#include <cmath>
#include <sstream>

#include "exq/error.hpp"
#include "exq/tolerances.hpp"

namespace exq {

HermitianBasis HermitianBasis::standard(int n) {
  if (n < 2) {
    throw Error(ErrorCode::bad_spec, "basis dimension must be >= 2");
  }
  std::vector<CMat> elems;
  elems.reserve(static_cast<std::size_t>(n) * n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  elems.push_back(CMat::Identity(n, n) / std::sqrt(static_cast<double>(n)));
  for (int j = 1; j < n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      std::ostringstream sym, asym;
      sym << "gellmann:" << n << ":" << j << ":" << k;
      asym << "gellmann:" << n << ":" << k << ":" << j;
      elems.push_back(named_matrix(sym.str()) * inv_sqrt2);
      elems.push_back(named_matrix(asym.str()) * inv_sqrt2);
    }
  }
  for (int l = 1; l < n; ++l) {
    std::ostringstream diag;
    diag << "gellmann:" << n << ":" << l << ":" << l;
    elems.push_back(named_matrix(diag.str()) * inv_sqrt2);
  }
  return HermitianBasis(n, std::move(elems));
}

namespace {

RVec embed_hermitian(const CMat& a, const HermitianBasis& basis, const char* what) {
  if (a.rows() != basis.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": matrix dimension does not match basis");
  }
  RVec coords(basis.dim_real());
  for (int i = 0; i < basis.dim_real(); ++i) {
    const std::complex<double> t =
        (basis.elements()[static_cast<std::size_t>(i)] * a).trace();
    if (std::abs(t.imag()) > tol::embed_imag) {
      std::ostringstream os;
      os << what << ": tr(B_a A) has imaginary part " << t.imag();
      throw Error(ErrorCode::numeric_range, os.str(), t.imag());
    }
    coords[i] = t.real();
  }
  return coords;
}

} // namespace

GptState embed_state(const DensityMatrix& rho, const HermitianBasis& basis) {
  return GptState{embed_hermitian(rho.matrix(), basis, "embed_state")};
}

GptEffect embed_effect(const Effect& e, const HermitianBasis& basis) {
  return GptEffect{embed_hermitian(e.matrix(), basis, "embed_effect")};
}

CMat unembed(const RVec& coords, const HermitianBasis& basis) {
  if (coords.size() != basis.dim_real()) {
    throw Error(ErrorCode::dimension_mismatch, "unembed: coordinate count does not match basis");
  }
  CMat out = CMat::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim_real(); ++i) {
    out += coords[i] * basis.elements()[static_cast<std::size_t>(i)];
  }
  return out;
}

GptMeasurement embed_povm(const Povm& m, const HermitianBasis& basis) {
  GptMeasurement out;
  out.label = m.label();
  out.outcome_labels = m.outcome_labels();
  out.effects.reserve(m.effects().size());
  for (const auto& e : m.effects()) out.effects.push_back(embed_effect(e, basis));
  return out;
}

double vector_probability(const GptEffect& o, const GptState& s) {
  if (o.dim_real() != s.dim_real()) {
    throw Error(ErrorCode::dimension_mismatch,
                "vector_probability: state and effect dimensions differ");
  }
  return clamp_probability(o.coords.dot(s.coords));
}

RVec gpt_outcome_distribution(const GptMeasurement& m, const GptState& s) {
  RVec p(m.outcome_count());
  for (int i = 0; i < m.outcome_count(); ++i) {
    p[i] = vector_probability(m.effects[static_cast<std::size_t>(i)], s);
  }
  const double dev = std::abs(p.sum() - 1.0);
  if (dev > tol::distribution_sum) {
    std::ostringstream os;
    os << "GPT outcome distribution of \"" << m.label << "\" sums to " << p.sum();
    throw Error(ErrorCode::check_failed, os.str(), dev);
  }
  return p;
}

GptSystem classical_system(int k) {
  if (k < 2) {
    throw Error(ErrorCode::bad_spec, "classical system needs k >= 2");
  }
  GptSystem sys;
  sys.kind = GptSystem::Kind::classical;
  sys.size = k;
  for (int v = 0; v < k; ++v) {
    RVec coords = RVec::Zero(k + 1);
    coords[v] = 1.0;
    coords[k] = 1.0; // normalization coordinate
    sys.extremal_states.push_back(GptState{std::move(coords)});
  }
  GptMeasurement fine;
  fine.label = "fine";
  for (int i = 0; i < k; ++i) {
    RVec coords = RVec::Zero(k + 1);
    coords[i] = 1.0;
    fine.effects.push_back(GptEffect{std::move(coords)});
    fine.outcome_labels.push_back(std::to_string(i));
  }
  sys.measurements.push_back(std::move(fine));
  return sys;
}

namespace {

// Projector onto the span of eigenvectors with eigenvalue above the rank cut.
CMat support_projector(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  const auto& ev = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  CMat proj = CMat::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > tol::support_rank) {
      proj += vecs.col(i) * vecs.col(i).adjoint();
    }
  }
  return proj;
}

} // namespace

DistinguishabilityResult perfectly_distinguishable(const DensityMatrix& rho1,
                                                   const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "perfectly_distinguishable: dimensions differ");
  }
  DistinguishabilityResult result;
  result.overlap = (rho1.matrix() * rho2.matrix()).trace().real();
  if (std::abs(result.overlap) > tol::support_overlap) {
    return result;
  }
  const CMat p1 = support_projector(rho1.matrix());
  const CMat p2 = support_projector(rho2.matrix());
  if ((p1 * p2).cwiseAbs().maxCoeff() > tol::support_projector) {
    return result;
  }
  result.distinguishable = true;
  const int n = rho1.dim();
  std::vector<Effect> effects;
  effects.emplace_back(p1);
  effects.emplace_back(CMat::Identity(n, n) - p1);
  result.witness = Povm("distinguishing", std::move(effects), {"first", "second"});
  return result;
}

DensityMatrix apply_state_map(const RMat& map, const DensityMatrix& rho,
                              const HermitianBasis& basis) {
  if (map.rows() != basis.dim_real() || map.cols() != basis.dim_real()) {
    throw Error(ErrorCode::shape_mismatch,
                "state map must be square of size dim^2 x dim^2");
  }
  const GptState s = embed_state(rho, basis);
  const RVec mapped = map * s.coords;
  CMat out = unembed(mapped, basis);
  // Hermitian by construction of the basis; trace and positivity can fail for
  // arbitrary maps, in which case the result is rejected here.
  return DensityMatrix(std::move(out));
}

nlohmann::ordered_json gpt_measurement_to_json(const GptMeasurement& m) {
  nlohmann::ordered_json effects = nlohmann::ordered_json::array();
  for (const auto& e : m.effects) {
    effects.push_back(std::vector<double>(e.coords.data(), e.coords.data() + e.coords.size()));
  }
  return nlohmann::ordered_json{
      {"label", m.label},
      {"outcome_labels", m.outcome_labels},
      {"effects", std::move(effects)},
  };
}

nlohmann::ordered_json gpt_system_to_json(const GptSystem& sys) {
  nlohmann::ordered_json states = nlohmann::ordered_json::array();
  for (const auto& s : sys.extremal_states) {
    states.push_back(std::vector<double>(s.coords.data(), s.coords.data() + s.coords.size()));
  }
  nlohmann::ordered_json measurements = nlohmann::ordered_json::array();
  for (const auto& m : sys.measurements) measurements.push_back(gpt_measurement_to_json(m));
  const char* kind = sys.kind == GptSystem::Kind::classical  ? "classical"
                     : sys.kind == GptSystem::Kind::quantum ? "quantum"
                                                            : "custom";
  return nlohmann::ordered_json{
      {"kind", kind},
      {"size", sys.size},
      {"extremal_states", std::move(states)},
      {"measurements", std::move(measurements)},
  };
}

} // namespace exq
