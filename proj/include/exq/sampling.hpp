#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "exq/embedding.hpp"
#include "exq/hilbert.hpp"

namespace exq {

// A quantum parameter point carries both the density matrix and its embedded
// coordinates so likelihoods are plain dot products.
struct QuantumPoint {
  DensityMatrix rho;
  GptState coords;
};

// One probability vector per measurement kind, in registry order. The
// single-simplex exchangeable model is the one-component case.
using SimplexTuple = std::vector<RVec>;

using ParameterPoint = std::variant<QuantumPoint, SimplexTuple>;

struct PriorSpec {
  enum class Kind {
    haar_pure,
    hilbert_schmidt,
    simplex_dirichlet,
    product_dirichlet,
    grid,
    explicit_points,
  };

  Kind kind;
  std::uint64_t seed = 0;
  int dim = 0;        // n for quantum kinds
  int resolution = 0; // grid lattice points per axis
  std::vector<RVec> alphas;
  std::vector<std::pair<double, ParameterPoint>> points; // explicit

  void validate() const;
  const char* kind_name() const;

  static PriorSpec from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct SeedProvenance {
  std::string generator = "splitmix64";
  std::uint64_t seed = 0;
  std::string prior_kind;
};

class ParticleEnsemble {
 public:
  ParticleEnsemble(std::shared_ptr<const std::vector<ParameterPoint>> points,
                   RVec log_weights, SeedProvenance provenance, bool exact);

  std::size_t size() const { return points_->size(); }
  const std::vector<ParameterPoint>& points() const { return *points_; }
  std::shared_ptr<const std::vector<ParameterPoint>> shared_points() const { return points_; }
  const RVec& log_weights() const { return log_weights_; }
  const RVec& normalized_weights() const { return norm_weights_; }
  const SeedProvenance& provenance() const { return provenance_; }
  // True for deterministic quadrature ensembles (grid, explicit); their
  // predictive values carry no Monte Carlo error.
  bool exact() const { return exact_; }

  double effective_sample_size() const;

 private:
  std::shared_ptr<const std::vector<ParameterPoint>> points_;
  RVec log_weights_;
  RVec norm_weights_;
  SeedProvenance provenance_;
  bool exact_;
};

ParticleEnsemble sample_prior(const PriorSpec& spec, std::size_t count);

struct EnsembleSummary {
  double ess = 0.0;
  std::optional<DensityMatrix> mean_state;
  std::optional<double> mean_purity;
  std::optional<SimplexTuple> mean_etas;
};

EnsembleSummary ensemble_statistics(const ParticleEnsemble& e);

// Systematic resampling with its own substream; returns an equal-weight
// ensemble over the selected points.
ParticleEnsemble systematic_resample(const ParticleEnsemble& e, std::uint64_t seed);

} // namespace exq
