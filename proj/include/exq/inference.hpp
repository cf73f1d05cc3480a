#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exq/sampling.hpp"

namespace exq {

// Named measurements available to records. GPT-backed entries serve quantum
// (and custom) parameter points; categorical entries carry an outcome count
// only and serve product-of-simplices points, which hold one probability
// vector per categorical entry in registration order.
class MeasurementRegistry {
 public:
  struct Entry {
    std::string id;
    std::optional<GptMeasurement> gpt;
    int outcome_count = 0;
    int categorical_index = -1; // position among categorical entries
  };

  void add_gpt(std::string id, GptMeasurement m);
  void add_categorical(std::string id, int outcome_count);

  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  const Entry& at(const std::string& id) const;
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  int categorical_count() const { return categorical_count_; }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
  int categorical_count_ = 0;
};

struct RecordStep {
  std::string measurement_id;
  int outcome_index = 0;
};

struct ExperimentRecord {
  std::vector<RecordStep> steps;

  std::size_t size() const { return steps.size(); }
  // Checks that every step resolves and its outcome index is in range.
  void validate(const MeasurementRegistry& registry) const;
};

struct PredictiveResult {
  double log_probability = 0.0;
  double mc_std_error = 0.0;
  std::size_t particle_count = 0;
  bool exact = false;

  double probability() const;
};

// Log-likelihood of a record at a fixed parameter point; steps are
// conditionally independent given the point. Returns -inf when any step has
// probability zero at the point.
double likelihood(const ParameterPoint& point, const ExperimentRecord& record,
                  const MeasurementRegistry& registry);

PredictiveResult predictive(const ParticleEnsemble& ensemble, const ExperimentRecord& record,
                            const MeasurementRegistry& registry, int threads = 1);

ParticleEnsemble posterior_update(const ParticleEnsemble& ensemble,
                                  const ExperimentRecord& record,
                                  const MeasurementRegistry& registry, int threads = 1);

// Closed-form predictive for Dirichlet priors: a product over measurement
// kinds of Dirichlet-multinomial sequence probabilities.
double dirichlet_multinomial_log_predictive(const PriorSpec& prior,
                                            const ExperimentRecord& record,
                                            const MeasurementRegistry& registry);

struct PartialExchResult {
  PredictiveResult mc;
  std::optional<double> closed_form_log; // present for Dirichlet priors
};

// Mixture-of-products predictive over a product-of-simplices prior. For
// Dirichlet priors the closed form is evaluated alongside the Monte Carlo
// estimate.
PartialExchResult partial_exch_predictive(const PriorSpec& prior, std::size_t count,
                                          const ExperimentRecord& record,
                                          const MeasurementRegistry& registry,
                                          int threads = 1);

struct ExchangeabilityReport {
  bool kind_preserving = false;
  double log_probability = 0.0;
  double log_probability_permuted = 0.0;
  double abs_log_difference = 0.0;
  // Equality observed even though the permutation mixes measurement kinds.
  bool stronger_than_required = false;
};

// permutation[i] gives the original position of the step placed at i.
// When the permutation preserves measurement kinds the two predictive values
// are required to agree within tol::exchange.
ExchangeabilityReport exchangeability_check(const ExperimentRecord& record,
                                            const std::vector<std::size_t>& permutation,
                                            const ParticleEnsemble& ensemble,
                                            const MeasurementRegistry& registry,
                                            int threads = 1);

// Outcome-probability tuple (eta_M) of a state under every GPT-backed
// measurement in the registry.
std::vector<std::pair<std::string, RVec>> eta_components(const DensityMatrix& rho,
                                                         const MeasurementRegistry& registry,
                                                         const HermitianBasis& basis);

} // namespace exq
