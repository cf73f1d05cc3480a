#include "exq/sampling.hpp"

#include <cmath>
#include <sstream>

#include "exq/error.hpp"
#include "exq/numeric.hpp"
#include "exq/rng.hpp"
#include "exq/tolerances.hpp"

namespace exq {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const char* PriorSpec::kind_name() const {
  switch (kind) {
    case Kind::haar_pure: return "haar_pure";
    case Kind::hilbert_schmidt: return "hilbert_schmidt";
    case Kind::simplex_dirichlet: return "simplex_dirichlet";
    case Kind::product_dirichlet: return "product_dirichlet";
    case Kind::grid: return "grid";
    case Kind::explicit_points: return "explicit";
  }
  return "?";
}

void PriorSpec::validate() const {
  switch (kind) {
    case Kind::haar_pure:
    case Kind::hilbert_schmidt:
      if (dim < 2) throw Error(ErrorCode::bad_spec, "quantum prior needs n >= 2");
      break;
    case Kind::grid:
      if (dim != 2) {
        throw Error(ErrorCode::unsupported_grid, "grid prior is only supported for n = 2");
      }
      if (resolution < 2) throw Error(ErrorCode::bad_spec, "grid resolution must be >= 2");
      break;
    case Kind::simplex_dirichlet:
    case Kind::product_dirichlet: {
      if (alphas.empty()) throw Error(ErrorCode::bad_spec, "dirichlet prior needs alphas");
      if (kind == Kind::simplex_dirichlet && alphas.size() != 1) {
        throw Error(ErrorCode::bad_spec, "simplex_dirichlet takes a single alpha vector");
      }
      for (const auto& a : alphas) {
        if (a.size() < 2 || a.minCoeff() <= 0.0) {
          throw Error(ErrorCode::bad_spec, "dirichlet alphas must be positive, length >= 2");
        }
      }
      break;
    }
    case Kind::explicit_points: {
      if (points.empty()) throw Error(ErrorCode::bad_spec, "explicit prior needs points");
      double sum = 0.0;
      for (const auto& [w, p] : points) {
        (void)p;
        if (w < 0.0) throw Error(ErrorCode::bad_spec, "explicit weights must be non-negative", w);
        sum += w;
      }
      if (std::abs(sum - 1.0) > tol::explicit_weights) {
        throw Error(ErrorCode::bad_spec, "explicit weights must sum to 1", std::abs(sum - 1.0));
      }
      break;
    }
  }
}

namespace {

RVec rvec_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::schema_violation, std::string(what) + " must be a nonempty array");
  }
  RVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  }
  return v;
}

std::vector<double> rvec_to_std(const RVec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

} // namespace

PriorSpec PriorSpec::from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw Error(ErrorCode::schema_violation, "prior must be an object with a \"kind\"");
  }
  if (!j.contains("seed")) {
    throw Error(ErrorCode::schema_violation, "prior requires an explicit \"seed\"");
  }
  PriorSpec spec;
  spec.seed = j.at("seed").get<std::uint64_t>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "haar_pure" || kind == "hilbert_schmidt") {
    spec.kind = kind == "haar_pure" ? Kind::haar_pure : Kind::hilbert_schmidt;
    spec.dim = j.at("n").get<int>();
  } else if (kind == "grid") {
    spec.kind = Kind::grid;
    spec.dim = j.at("n").get<int>();
    spec.resolution = j.at("resolution").get<int>();
  } else if (kind == "simplex_dirichlet") {
    spec.kind = Kind::simplex_dirichlet;
    spec.alphas.push_back(rvec_from_json(j.at("alpha"), "alpha"));
  } else if (kind == "product_dirichlet") {
    spec.kind = Kind::product_dirichlet;
    if (!j.contains("alphas") || !j.at("alphas").is_array() || j.at("alphas").empty()) {
      throw Error(ErrorCode::schema_violation, "product_dirichlet needs a list of alpha vectors");
    }
    for (const auto& a : j.at("alphas")) {
      spec.alphas.push_back(rvec_from_json(a, "alphas entry"));
    }
  } else if (kind == "explicit") {
    spec.kind = Kind::explicit_points;
    if (!j.contains("points") || !j.at("points").is_array() || j.at("points").empty()) {
      throw Error(ErrorCode::schema_violation, "explicit prior needs a nonempty \"points\" list");
    }
    for (const auto& p : j.at("points")) {
      const double w = p.at("weight").get<double>();
      if (p.contains("state")) {
        const CMat m = state_spec_from_json(p.at("state"));
        DensityMatrix rho(m);
        const auto basis = HermitianBasis::standard(rho.dim());
        GptState coords = embed_state(rho, basis);
        if (spec.dim == 0) spec.dim = rho.dim();
        spec.points.emplace_back(w, QuantumPoint{std::move(rho), std::move(coords)});
      } else if (p.contains("etas")) {
        SimplexTuple etas;
        for (const auto& eta : p.at("etas")) {
          etas.push_back(rvec_from_json(eta, "eta"));
        }
        spec.points.emplace_back(w, std::move(etas));
      } else {
        throw Error(ErrorCode::schema_violation,
                    "explicit point needs either \"state\" or \"etas\"");
      }
    }
  } else {
    throw Error(ErrorCode::schema_violation, "unknown prior kind \"" + kind + "\"");
  }
  spec.validate();
  return spec;
}

ojson PriorSpec::to_json() const {
  ojson j{{"kind", kind_name()}, {"seed", seed}};
  switch (kind) {
    case Kind::haar_pure:
    case Kind::hilbert_schmidt:
      j["n"] = dim;
      break;
    case Kind::grid:
      j["n"] = dim;
      j["resolution"] = resolution;
      break;
    case Kind::simplex_dirichlet:
      j["alpha"] = rvec_to_std(alphas.front());
      break;
    case Kind::product_dirichlet: {
      ojson a = ojson::array();
      for (const auto& alpha : alphas) a.push_back(rvec_to_std(alpha));
      j["alphas"] = std::move(a);
      break;
    }
    case Kind::explicit_points: {
      ojson pts = ojson::array();
      for (const auto& [w, p] : points) {
        ojson entry{{"weight", w}};
        if (const auto* q = std::get_if<QuantumPoint>(&p)) {
          entry["state"] = matrix_to_json(q->rho.matrix());
        } else {
          ojson etas = ojson::array();
          for (const auto& eta : std::get<SimplexTuple>(p)) etas.push_back(rvec_to_std(eta));
          entry["etas"] = std::move(etas);
        }
        pts.push_back(std::move(entry));
      }
      j["points"] = std::move(pts);
      break;
    }
  }
  return j;
}

ParticleEnsemble::ParticleEnsemble(std::shared_ptr<const std::vector<ParameterPoint>> points,
                                   RVec log_weights, SeedProvenance provenance, bool exact)
    : points_(std::move(points)),
      log_weights_(std::move(log_weights)),
      provenance_(std::move(provenance)),
      exact_(exact) {
  if (!points_ || points_->empty() ||
      static_cast<Eigen::Index>(points_->size()) != log_weights_.size()) {
    throw Error(ErrorCode::length_mismatch,
                "ensemble needs matching, nonempty points and log-weights");
  }
  const std::size_t first_kind = points_->front().index();
  for (const auto& p : *points_) {
    if (p.index() != first_kind) {
      throw Error(ErrorCode::bad_spec, "ensemble mixes quantum and simplex points");
    }
  }
  const double lse = logsumexp({log_weights_.data(), static_cast<std::size_t>(log_weights_.size())});
  if (!std::isfinite(lse)) {
    throw Error(ErrorCode::all_weights_zero, "every particle weight is zero");
  }
  norm_weights_ = (log_weights_.array() - lse).exp();
  const double dev = std::abs(norm_weights_.sum() - 1.0);
  if (dev > tol::ensemble_weights) {
    throw Error(ErrorCode::check_failed, "normalized ensemble weights do not sum to 1", dev);
  }
}

double ParticleEnsemble::effective_sample_size() const {
  return 1.0 / norm_weights_.array().square().sum();
}

namespace {

QuantumPoint make_quantum_point(CMat m, const HermitianBasis& basis) {
  DensityMatrix rho(std::move(m));
  GptState coords = embed_state(rho, basis);
  return QuantumPoint{std::move(rho), std::move(coords)};
}

CMat ginibre(SplitMix64& rng, int n) {
  CMat g(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      g(r, c) = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
    }
  }
  return g;
}

} // namespace

ParticleEnsemble sample_prior(const PriorSpec& spec, std::size_t count) {
  spec.validate();
  if (count < 1) {
    throw Error(ErrorCode::bad_spec, "particle count must be >= 1");
  }
  SeedProvenance prov;
  prov.seed = spec.seed;
  prov.prior_kind = spec.kind_name();

  auto points = std::make_shared<std::vector<ParameterPoint>>();
  bool exact = false;

  switch (spec.kind) {
    case PriorSpec::Kind::haar_pure: {
      const auto basis = HermitianBasis::standard(spec.dim);
      points->reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        SplitMix64 rng = SplitMix64::substream(spec.seed, k);
        CVec psi(spec.dim);
        for (int i = 0; i < spec.dim; ++i) {
          psi[i] = std::complex<double>(rng.next_gaussian(), rng.next_gaussian());
        }
        psi /= psi.norm();
        points->push_back(make_quantum_point(psi * psi.adjoint(), basis));
      }
      break;
    }
    case PriorSpec::Kind::hilbert_schmidt: {
      const auto basis = HermitianBasis::standard(spec.dim);
      points->reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        SplitMix64 rng = SplitMix64::substream(spec.seed, k);
        const CMat g = ginibre(rng, spec.dim);
        CMat w = g * g.adjoint();
        w /= w.trace().real();
        points->push_back(make_quantum_point(std::move(w), basis));
      }
      break;
    }
    case PriorSpec::Kind::simplex_dirichlet:
    case PriorSpec::Kind::product_dirichlet: {
      points->reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        SplitMix64 rng = SplitMix64::substream(spec.seed, k);
        SimplexTuple etas;
        etas.reserve(spec.alphas.size());
        for (const auto& alpha : spec.alphas) {
          etas.push_back(rng.next_dirichlet(alpha));
        }
        points->push_back(std::move(etas));
      }
      break;
    }
    case PriorSpec::Kind::grid: {
      // Midpoint lattice over the Bloch ball: cell centers of [-1,1]^3 at the
      // requested per-axis resolution, keeping |r| <= 1, uniform weights.
      const auto basis = HermitianBasis::standard(2);
      const int res = spec.resolution;
      const double h = 2.0 / res;
      const CMat sx = named_matrix("pauli:x");
      const CMat sy = named_matrix("pauli:y");
      const CMat sz = named_matrix("pauli:z");
      const CMat id = CMat::Identity(2, 2);
      for (int ix = 0; ix < res; ++ix) {
        const double x = -1.0 + (ix + 0.5) * h;
        for (int iy = 0; iy < res; ++iy) {
          const double y = -1.0 + (iy + 0.5) * h;
          for (int iz = 0; iz < res; ++iz) {
            const double z = -1.0 + (iz + 0.5) * h;
            if (x * x + y * y + z * z > 1.0) continue;
            points->push_back(
                make_quantum_point(0.5 * (id + x * sx + y * sy + z * sz), basis));
          }
        }
      }
      exact = true;
      break;
    }
    case PriorSpec::Kind::explicit_points: {
      RVec lw(spec.points.size());
      points->reserve(spec.points.size());
      for (std::size_t i = 0; i < spec.points.size(); ++i) {
        points->push_back(spec.points[i].second);
        lw[static_cast<Eigen::Index>(i)] = std::log(spec.points[i].first);
      }
      return ParticleEnsemble(std::move(points), std::move(lw), std::move(prov), true);
    }
  }

  RVec lw = RVec::Constant(static_cast<Eigen::Index>(points->size()),
                           -std::log(static_cast<double>(points->size())));
  return ParticleEnsemble(std::move(points), std::move(lw), std::move(prov), exact);
}

EnsembleSummary ensemble_statistics(const ParticleEnsemble& e) {
  EnsembleSummary summary;
  summary.ess = e.effective_sample_size();
  const RVec& w = e.normalized_weights();

  if (const auto* q0 = std::get_if<QuantumPoint>(&e.points().front())) {
    const int n = q0->rho.dim();
    CMat mean = CMat::Zero(n, n);
    double purity = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const auto& q = std::get<QuantumPoint>(e.points()[k]);
      mean += w[static_cast<Eigen::Index>(k)] * q.rho.matrix();
      purity += w[static_cast<Eigen::Index>(k)] * q.rho.purity();
    }
    summary.mean_state = DensityMatrix(std::move(mean));
    summary.mean_purity = purity;
  } else {
    const auto& t0 = std::get<SimplexTuple>(e.points().front());
    SimplexTuple mean;
    for (const auto& eta : t0) mean.push_back(RVec::Zero(eta.size()));
    for (std::size_t k = 0; k < e.size(); ++k) {
      const auto& tuple = std::get<SimplexTuple>(e.points()[k]);
      for (std::size_t c = 0; c < mean.size(); ++c) {
        mean[c] += w[static_cast<Eigen::Index>(k)] * tuple[c];
      }
    }
    summary.mean_etas = std::move(mean);
  }
  return summary;
}

ParticleEnsemble systematic_resample(const ParticleEnsemble& e, std::uint64_t seed) {
  const std::size_t n = e.size();
  const RVec& w = e.normalized_weights();
  SplitMix64 rng = SplitMix64::substream(seed, 0);
  const double offset = rng.next_double();

  auto points = std::make_shared<std::vector<ParameterPoint>>();
  points->reserve(n);
  double cumulative = w[0];
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (offset + static_cast<double>(i)) / static_cast<double>(n);
    while (u > cumulative && idx + 1 < n) {
      ++idx;
      cumulative += w[static_cast<Eigen::Index>(idx)];
    }
    points->push_back(e.points()[idx]);
  }
  SeedProvenance prov = e.provenance();
  prov.prior_kind += "+resample";
  RVec lw = RVec::Constant(static_cast<Eigen::Index>(n),
                           -std::log(static_cast<double>(n)));
  return ParticleEnsemble(std::move(points), std::move(lw), std::move(prov), false);
}

} // namespace exq
