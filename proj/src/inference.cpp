#include "exq/inference.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "exq/error.hpp"
#include "exq/numeric.hpp"
#include "exq/tolerances.hpp"

namespace exq {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void MeasurementRegistry::add_gpt(std::string id, GptMeasurement m) {
  if (contains(id)) {
    throw Error(ErrorCode::bad_spec, "duplicate measurement id \"" + id + "\"");
  }
  Entry e;
  e.id = id;
  e.outcome_count = m.outcome_count();
  e.gpt = std::move(m);
  index_[std::move(id)] = entries_.size();
  entries_.push_back(std::move(e));
}

void MeasurementRegistry::add_categorical(std::string id, int outcome_count) {
  if (contains(id)) {
    throw Error(ErrorCode::bad_spec, "duplicate measurement id \"" + id + "\"");
  }
  if (outcome_count < 1) {
    throw Error(ErrorCode::bad_spec, "categorical measurement needs >= 1 outcomes");
  }
  Entry e;
  e.id = id;
  e.outcome_count = outcome_count;
  e.categorical_index = categorical_count_++;
  index_[std::move(id)] = entries_.size();
  entries_.push_back(std::move(e));
}

const MeasurementRegistry::Entry& MeasurementRegistry::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::unknown_measurement, "unknown measurement id \"" + id + "\"");
  }
  return entries_[it->second];
}

void ExperimentRecord::validate(const MeasurementRegistry& registry) const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& entry = registry.at(steps[i].measurement_id);
    if (steps[i].outcome_index < 0 || steps[i].outcome_index >= entry.outcome_count) {
      std::ostringstream os;
      os << "record step " << i << ": outcome " << steps[i].outcome_index
         << " out of range for \"" << steps[i].measurement_id << "\" ("
         << entry.outcome_count << " outcomes)";
      throw Error(ErrorCode::bad_spec, os.str());
    }
  }
}

double PredictiveResult::probability() const { return std::exp(log_probability); }

namespace {

struct ResolvedStep {
  const GptMeasurement* gpt = nullptr;
  int categorical_index = -1;
  int outcome = 0;
};

std::vector<ResolvedStep> resolve_steps(const ExperimentRecord& record,
                                        const MeasurementRegistry& registry) {
  record.validate(registry);
  std::vector<ResolvedStep> resolved;
  resolved.reserve(record.steps.size());
  for (const auto& step : record.steps) {
    const auto& entry = registry.at(step.measurement_id);
    ResolvedStep r;
    r.gpt = entry.gpt ? &*entry.gpt : nullptr;
    r.categorical_index = entry.categorical_index;
    r.outcome = step.outcome_index;
    resolved.push_back(r);
  }
  return resolved;
}

double log_likelihood_resolved(const ParameterPoint& point,
                               const std::vector<ResolvedStep>& steps,
                               const MeasurementRegistry& registry) {
  KahanSum acc;
  if (const auto* q = std::get_if<QuantumPoint>(&point)) {
    for (const auto& step : steps) {
      if (step.gpt == nullptr) {
        throw Error(ErrorCode::model_mismatch,
                    "categorical measurement cannot be evaluated at a quantum point");
      }
      const double p =
          vector_probability(step.gpt->effects[static_cast<std::size_t>(step.outcome)],
                             q->coords);
      if (p <= 0.0) return kNegInf;
      acc.add(std::log(p));
    }
  } else {
    const auto& tuple = std::get<SimplexTuple>(point);
    if (static_cast<int>(tuple.size()) != registry.categorical_count()) {
      throw Error(ErrorCode::model_mismatch,
                  "simplex tuple arity does not match the categorical registry");
    }
    for (const auto& step : steps) {
      if (step.categorical_index < 0) {
        throw Error(ErrorCode::model_mismatch,
                    "GPT measurement cannot be evaluated at a simplex point");
      }
      const RVec& eta = tuple[static_cast<std::size_t>(step.categorical_index)];
      if (step.outcome >= eta.size()) {
        throw Error(ErrorCode::bad_spec, "outcome index exceeds simplex component length");
      }
      const double p = eta[step.outcome];
      if (p <= 0.0) return kNegInf;
      acc.add(std::log(p));
    }
  }
  return acc.value();
}

// Per-particle log-likelihoods, evaluated in parallel chunks. The output
// array is indexed by particle, so downstream reductions are independent of
// the thread count.
std::vector<double> likelihood_array(const ParticleEnsemble& ensemble,
                                     const std::vector<ResolvedStep>& steps,
                                     const MeasurementRegistry& registry, int threads) {
  const std::size_t n = ensemble.size();
  std::vector<double> out(n);
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      out[k] = log_likelihood_resolved(ensemble.points()[k], steps, registry);
    }
  };
  if (threads <= 1 || n < 1024) {
    worker(0, n);
  } else {
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

} // namespace

double likelihood(const ParameterPoint& point, const ExperimentRecord& record,
                  const MeasurementRegistry& registry) {
  return log_likelihood_resolved(point, resolve_steps(record, registry), registry);
}

PredictiveResult predictive(const ParticleEnsemble& ensemble, const ExperimentRecord& record,
                            const MeasurementRegistry& registry, int threads) {
  const auto steps = resolve_steps(record, registry);
  const auto ll = likelihood_array(ensemble, steps, registry, threads);
  const std::size_t n = ensemble.size();

  const double lse_w = logsumexp(
      {ensemble.log_weights().data(), static_cast<std::size_t>(ensemble.log_weights().size())});

  // log p = LSE_k( log w_k + ll_k ), max-shifted, pairwise sum.
  std::vector<double> combined(n);
  double shift = kNegInf;
  for (std::size_t k = 0; k < n; ++k) {
    combined[k] = (ensemble.log_weights()[static_cast<Eigen::Index>(k)] - lse_w) + ll[k];
    shift = std::max(shift, combined[k]);
  }

  PredictiveResult result;
  result.particle_count = n;
  result.exact = ensemble.exact();
  if (!std::isfinite(shift)) {
    result.log_probability = kNegInf;
    result.mc_std_error = 0.0;
    return result;
  }

  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k) {
    terms[k] = std::exp(combined[k] - shift);
  }
  const double total = pairwise_sum(terms);
  result.log_probability = shift + std::log(total);

  if (!ensemble.exact()) {
    // Self-normalized importance-sampling variance: sum_k (w_k L_k - w_k mu)^2
    // rescaled by mu; evaluated through the log to survive small mu.
    std::vector<double> sq(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double a = std::exp(combined[k] - result.log_probability); // w_k L_k / mu
      const double w = ensemble.normalized_weights()[static_cast<Eigen::Index>(k)];
      sq[k] = (a - w) * (a - w);
    }
    result.mc_std_error = result.probability() * std::sqrt(pairwise_sum(sq));
  }
  return result;
}

ParticleEnsemble posterior_update(const ParticleEnsemble& ensemble,
                                  const ExperimentRecord& record,
                                  const MeasurementRegistry& registry, int threads) {
  const auto steps = resolve_steps(record, registry);
  const auto ll = likelihood_array(ensemble, steps, registry, threads);
  RVec lw = ensemble.log_weights();
  bool any_finite = false;
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    lw[static_cast<Eigen::Index>(k)] += ll[k];
    any_finite = any_finite || std::isfinite(lw[static_cast<Eigen::Index>(k)]);
  }
  if (!any_finite) {
    throw Error(ErrorCode::all_weights_zero,
                "every particle assigns probability zero to the record");
  }
  const double lse = logsumexp({lw.data(), static_cast<std::size_t>(lw.size())});
  lw.array() -= lse;
  return ParticleEnsemble(ensemble.shared_points(), std::move(lw), ensemble.provenance(),
                          ensemble.exact());
}

double dirichlet_multinomial_log_predictive(const PriorSpec& prior,
                                            const ExperimentRecord& record,
                                            const MeasurementRegistry& registry) {
  if (prior.kind != PriorSpec::Kind::simplex_dirichlet &&
      prior.kind != PriorSpec::Kind::product_dirichlet) {
    throw Error(ErrorCode::bad_spec, "closed form requires a Dirichlet prior");
  }
  if (static_cast<int>(prior.alphas.size()) != registry.categorical_count()) {
    throw Error(ErrorCode::bad_spec,
                "Dirichlet prior arity does not match the categorical registry");
  }
  record.validate(registry);

  // Outcome counts per categorical measurement kind.
  std::vector<std::vector<long>> counts;
  for (const auto& entry : registry.entries()) {
    if (entry.categorical_index >= 0) {
      const auto& alpha = prior.alphas[static_cast<std::size_t>(entry.categorical_index)];
      if (alpha.size() != entry.outcome_count) {
        throw Error(ErrorCode::bad_spec,
                    "alpha length does not match outcome count of \"" + entry.id + "\"");
      }
      counts.emplace_back(static_cast<std::size_t>(entry.outcome_count), 0L);
    }
  }
  for (const auto& step : record.steps) {
    const auto& entry = registry.at(step.measurement_id);
    if (entry.categorical_index < 0) {
      throw Error(ErrorCode::model_mismatch,
                  "closed form requires categorical measurements only");
    }
    ++counts[static_cast<std::size_t>(entry.categorical_index)]
            [static_cast<std::size_t>(step.outcome_index)];
  }

  double total = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const RVec& alpha = prior.alphas[c];
    const double a_sum = alpha.sum();
    long n_c = 0;
    for (long x : counts[c]) n_c += x;
    total += std::lgamma(a_sum) - std::lgamma(a_sum + static_cast<double>(n_c));
    for (Eigen::Index j = 0; j < alpha.size(); ++j) {
      total += std::lgamma(alpha[j] + static_cast<double>(counts[c][static_cast<std::size_t>(j)])) -
               std::lgamma(alpha[j]);
    }
  }
  return total;
}

PartialExchResult partial_exch_predictive(const PriorSpec& prior, std::size_t count,
                                          const ExperimentRecord& record,
                                          const MeasurementRegistry& registry, int threads) {
  const bool dirichlet = prior.kind == PriorSpec::Kind::simplex_dirichlet ||
                         prior.kind == PriorSpec::Kind::product_dirichlet;
  if (!dirichlet && prior.kind != PriorSpec::Kind::explicit_points) {
    throw Error(ErrorCode::bad_spec,
                "partial-exchangeable predictive needs a product-of-simplices prior");
  }
  PartialExchResult result;
  const ParticleEnsemble ensemble = sample_prior(prior, count);
  result.mc = predictive(ensemble, record, registry, threads);
  if (dirichlet) {
    result.closed_form_log = dirichlet_multinomial_log_predictive(prior, record, registry);
  }
  return result;
}

ExchangeabilityReport exchangeability_check(const ExperimentRecord& record,
                                            const std::vector<std::size_t>& permutation,
                                            const ParticleEnsemble& ensemble,
                                            const MeasurementRegistry& registry,
                                            int threads) {
  const std::size_t n = record.size();
  if (permutation.size() != n) {
    throw Error(ErrorCode::bad_permutation, "permutation length does not match record");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t p : permutation) {
    if (p >= n || seen[p]) {
      throw Error(ErrorCode::bad_permutation, "not a permutation of the record steps");
    }
    seen[p] = true;
  }

  ExchangeabilityReport report;
  report.kind_preserving = true;
  ExperimentRecord permuted;
  permuted.steps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    permuted.steps.push_back(record.steps[permutation[i]]);
    if (permuted.steps[i].measurement_id != record.steps[i].measurement_id) {
      report.kind_preserving = false;
    }
  }

  const PredictiveResult base = predictive(ensemble, record, registry, threads);
  const PredictiveResult perm = predictive(ensemble, permuted, registry, threads);
  report.log_probability = base.log_probability;
  report.log_probability_permuted = perm.log_probability;
  if (base.log_probability == perm.log_probability) {
    report.abs_log_difference = 0.0; // covers the both -inf case
  } else {
    report.abs_log_difference = std::abs(base.log_probability - perm.log_probability);
  }

  const bool equal = report.abs_log_difference <= tol::exchange;
  if (report.kind_preserving && !equal) {
    std::ostringstream os;
    os << "within-kind permutation changed the predictive by "
       << report.abs_log_difference;
    throw Error(ErrorCode::check_failed, os.str(), report.abs_log_difference);
  }
  report.stronger_than_required = !report.kind_preserving && equal;
  return report;
}

std::vector<std::pair<std::string, RVec>> eta_components(const DensityMatrix& rho,
                                                         const MeasurementRegistry& registry,
                                                         const HermitianBasis& basis) {
  const GptState s = embed_state(rho, basis);
  std::vector<std::pair<std::string, RVec>> out;
  for (const auto& entry : registry.entries()) {
    if (entry.gpt) {
      out.emplace_back(entry.id, gpt_outcome_distribution(*entry.gpt, s));
    }
  }
  return out;
}

} // namespace exq
