#include "exq/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "exq/error.hpp"
#include "exq/rng.hpp"
#include "exq/tolerances.hpp"

namespace exq::scenario {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& message, const std::string& pointer) {
  throw Error(ErrorCode::schema_violation, message + " (at " + pointer + ")", pointer);
}

const json& field(const json& j, const char* key, const std::string& ptr) {
  if (!j.is_object() || !j.contains(key)) {
    schema_error(std::string("missing field \"") + key + "\"", ptr);
  }
  return j.at(key);
}

std::string str_field(const json& j, const char* key, const std::string& ptr) {
  const json& v = field(j, key, ptr);
  if (!v.is_string()) schema_error(std::string("field \"") + key + "\" must be a string", ptr);
  return v.get<std::string>();
}

long long int_field(const json& j, const char* key, const std::string& ptr) {
  const json& v = field(j, key, ptr);
  if (!v.is_number_integer()) {
    schema_error(std::string("field \"") + key + "\" must be an integer", ptr);
  }
  return v.get<long long>();
}

RVec real_vector(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) schema_error("expected a nonempty numeric array", ptr);
  RVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) schema_error("expected a numeric array", ptr);
    v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  }
  return v;
}

RMat real_matrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) schema_error("expected a nonempty array of rows", ptr);
  const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
  if (cols == 0) schema_error("matrix rows must be nonempty arrays", ptr);
  RMat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j.at(r).is_array() || j.at(r).size() != cols) {
      schema_error("matrix rows must have equal lengths", ptr);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j.at(r).at(c).get<double>();
    }
  }
  return m;
}

std::vector<double> to_std(const RVec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Parses and (in logging mode) tabulates a scenario. Structural problems
// always throw with a JSON pointer; numerical invariant violations become
// table rows when a log is attached and throw otherwise.
class Parser {
 public:
  Parser(const ojson& config, ValidationReport* log) : config_(config), log_(log) {}

  Scenario parse() {
    out_.config = config_;
    if (!config_.is_object()) schema_error("config must be a JSON object", "");
    const std::string schema = str_field(config_, "schema", "");
    if (schema != kSchemaId) {
      schema_error("unsupported schema \"" + schema + "\", expected \"" +
                       std::string(kSchemaId) + "\"",
                   "/schema");
    }
    parse_system();
    parse_measurements();
    parse_prior();
    parse_particle_count();
    parse_records();
    parse_queries();
    if (log_ == nullptr && !usable_) {
      throw Error(ErrorCode::internal, "scenario parse left an unusable state");
    }
    return std::move(out_);
  }

  bool usable() const { return usable_; }

 private:
  const ojson& config_;
  ValidationReport* log_;
  Scenario out_;
  bool usable_ = true;
  bool prior_ok_ = true;
  std::set<std::string> failed_ids_;

  // Records one numerical check. In strict mode a failure throws immediately.
  bool check(const std::string& object, const std::string& name, bool pass,
             double magnitude, ErrorCode code, const std::string& message) {
    if (log_ != nullptr) {
      log_->rows.push_back(CheckRow{object, name, pass, magnitude, pass ? "" : message});
      if (!pass) log_->ok = false;
    }
    if (!pass) {
      usable_ = false;
      if (log_ == nullptr) throw Error(code, object + ": " + message, magnitude);
    }
    return pass;
  }

  void parse_system() {
    const json& sys = field(config_, "system", "");
    const std::string kind = str_field(sys, "kind", "/system");
    if (kind == "quantum") {
      const long long n = int_field(sys, "n", "/system");
      if (n < 2) schema_error("quantum system needs n >= 2", "/system/n");
      out_.system.kind = GptSystem::Kind::quantum;
      out_.system.size = static_cast<int>(n);
      out_.basis = HermitianBasis::standard(static_cast<int>(n));
    } else if (kind == "classical") {
      const long long k = int_field(sys, "k", "/system");
      if (k < 2) schema_error("classical system needs k >= 2", "/system/k");
      out_.system = classical_system(static_cast<int>(k));
      out_.registry.add_gpt("fine", out_.system.measurements.front());
    } else if (kind == "custom") {
      out_.system.kind = GptSystem::Kind::custom;
      const json& states = field(sys, "extremal_states", "/system");
      if (!states.is_array() || states.empty()) {
        schema_error("custom system needs extremal_states", "/system/extremal_states");
      }
      for (std::size_t i = 0; i < states.size(); ++i) {
        out_.system.extremal_states.push_back(
            GptState{real_vector(states.at(i), "/system/extremal_states/" + std::to_string(i))});
      }
      const int d = out_.system.extremal_states.front().dim_real();
      for (const auto& s : out_.system.extremal_states) {
        if (s.dim_real() != d) {
          schema_error("extremal states must have equal lengths", "/system/extremal_states");
        }
      }
      out_.system.size = d;
    } else {
      schema_error("unknown system kind \"" + kind + "\"", "/system/kind");
    }
  }

  int quantum_dim() const {
    return out_.system.kind == GptSystem::Kind::quantum ? out_.system.size : 0;
  }

  CMat parse_state_matrix(const json& j, const std::string& ptr) {
    try {
      return state_spec_from_json(j);
    } catch (const Error& e) {
      schema_error(e.what(), ptr);
    }
  }

  void parse_measurements() {
    if (!config_.contains("measurements")) return;
    const json& ms = config_.at("measurements");
    if (!ms.is_array()) schema_error("measurements must be an array", "/measurements");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string ptr = "/measurements/" + std::to_string(i);
      const json& m = ms.at(i);
      const std::string id = str_field(m, "id", ptr);
      if (out_.registry.contains(id) || failed_ids_.count(id)) {
        schema_error("duplicate measurement id \"" + id + "\"", ptr + "/id");
      }
      const std::string kind = str_field(m, "kind", ptr);
      if (kind == "povm") {
        parse_povm(id, m, ptr);
      } else if (kind == "projective") {
        parse_projective(id, m, ptr);
      } else if (kind == "gpt") {
        parse_gpt(id, m, ptr);
      } else if (kind == "mixture") {
        parse_mixture(id, m, ptr);
      } else if (kind == "dither") {
        parse_dither(id, m, ptr);
      } else if (kind == "categorical") {
        const long long k = int_field(m, "outcomes", ptr);
        if (k < 1) schema_error("categorical needs outcomes >= 1", ptr + "/outcomes");
        out_.registry.add_categorical(id, static_cast<int>(k));
      } else {
        schema_error("unknown measurement kind \"" + kind + "\"", ptr + "/kind");
      }
    }
  }

  void require_quantum(const std::string& ptr) {
    if (out_.system.kind != GptSystem::Kind::quantum) {
      schema_error("matrix-valued measurements need a quantum system", ptr);
    }
  }

  void parse_povm(const std::string& id, const json& m, const std::string& ptr) {
    require_quantum(ptr);
    const json& effs = field(m, "effects", ptr);
    if (!effs.is_array() || effs.empty()) schema_error("effects must be nonempty", ptr + "/effects");
    const std::string object = "measurement:" + id;
    std::vector<CMat> raw;
    for (std::size_t k = 0; k < effs.size(); ++k) {
      CMat e = parse_state_matrix(effs.at(k), ptr + "/effects/" + std::to_string(k));
      if (e.rows() != quantum_dim()) {
        schema_error("effect dimension does not match the system", ptr + "/effects/" + std::to_string(k));
      }
      raw.push_back(std::move(e));
    }
    double herm = 0.0, min_ev = 0.0, max_ev = 1.0;
    CMat sum = CMat::Zero(quantum_dim(), quantum_dim());
    for (const auto& e : raw) {
      herm = std::max(herm, hermiticity_violation(e));
      const RVec ev = hermitian_eigenvalues((e + e.adjoint()) / 2.0);
      min_ev = std::min(min_ev, ev.minCoeff());
      max_ev = std::max(max_ev, ev.maxCoeff());
      sum += e;
    }
    const double sum_dev = (sum - CMat::Identity(quantum_dim(), quantum_dim())).cwiseAbs().maxCoeff();
    bool ok = check(object, "hermitian", herm <= tol::hermitian, herm,
                    ErrorCode::not_hermitian, "effect is not Hermitian");
    ok &= check(object, "effect_spectrum", min_ev >= -tol::psd && max_ev <= 1.0 + tol::effect_upper,
                std::max(-min_ev, max_ev - 1.0), ErrorCode::not_positive,
                "effect spectrum leaves [0, 1]");
    ok &= check(object, "povm_sum_identity", sum_dev <= tol::povm_sum, sum_dev,
                ErrorCode::check_failed, "effects do not sum to the identity");
    if (!ok) {
      failed_ids_.insert(id);
      return;
    }
    std::vector<Effect> effects;
    for (auto& e : raw) effects.emplace_back(std::move(e));
    std::vector<std::string> labels;
    if (m.contains("outcome_labels")) {
      for (const auto& l : m.at("outcome_labels")) labels.push_back(l.get<std::string>());
    }
    Povm povm(id, std::move(effects), std::move(labels));
    out_.registry.add_gpt(id, embed_povm(povm, *out_.basis));
  }

  void parse_projective(const std::string& id, const json& m, const std::string& ptr) {
    require_quantum(ptr);
    const json& vecs = field(m, "vectors", ptr);
    if (!vecs.is_array() || vecs.empty()) schema_error("vectors must be nonempty", ptr + "/vectors");
    const std::string object = "measurement:" + id;
    std::vector<CVec> raw;
    for (std::size_t k = 0; k < vecs.size(); ++k) {
      CVec v;
      try {
        v = cvec_from_json(vecs.at(k));
      } catch (const Error& e) {
        schema_error(e.what(), ptr + "/vectors/" + std::to_string(k));
      }
      if (v.size() != quantum_dim()) {
        schema_error("vector dimension does not match the system",
                     ptr + "/vectors/" + std::to_string(k));
      }
      raw.push_back(std::move(v));
    }
    if (static_cast<int>(raw.size()) != quantum_dim()) {
      schema_error("projective measurement needs exactly n vectors", ptr + "/vectors");
    }
    double norm_dev = 0.0, ortho_dev = 0.0;
    for (std::size_t a = 0; a < raw.size(); ++a) {
      norm_dev = std::max(norm_dev, std::abs(raw[a].squaredNorm() - 1.0));
      for (std::size_t b = a + 1; b < raw.size(); ++b) {
        ortho_dev = std::max(ortho_dev, std::abs(raw[a].dot(raw[b])));
      }
    }
    bool ok = check(object, "unit_norm", norm_dev <= tol::pure_norm, norm_dev,
                    ErrorCode::numeric_range, "vector is not normalized");
    ok &= check(object, "orthonormal", ortho_dev <= tol::orthonormal, ortho_dev,
                ErrorCode::not_orthonormal, "vectors are not orthogonal");
    if (!ok) {
      failed_ids_.insert(id);
      return;
    }
    std::vector<PureState> states;
    for (auto& v : raw) states.emplace_back(std::move(v));
    out_.registry.add_gpt(id, embed_povm(projective_measurement(states, id), *out_.basis));
  }

  void parse_gpt(const std::string& id, const json& m, const std::string& ptr) {
    if (out_.system.kind == GptSystem::Kind::quantum) {
      schema_error("raw GPT effects are for classical/custom systems", ptr);
    }
    const json& effs = field(m, "effects", ptr);
    if (!effs.is_array() || effs.empty()) schema_error("effects must be nonempty", ptr + "/effects");
    GptMeasurement gm;
    gm.label = id;
    const int d = out_.system.extremal_states.front().dim_real();
    for (std::size_t k = 0; k < effs.size(); ++k) {
      RVec coords = real_vector(effs.at(k), ptr + "/effects/" + std::to_string(k));
      if (coords.size() != d) {
        schema_error("effect length does not match the system", ptr + "/effects/" + std::to_string(k));
      }
      gm.effects.push_back(GptEffect{std::move(coords)});
      gm.outcome_labels.push_back(std::to_string(k));
    }
    // Behavioral validation on the system's generating set.
    double min_p = 0.0, sum_dev = 0.0;
    for (const auto& s : out_.system.extremal_states) {
      double sum = 0.0;
      for (const auto& e : gm.effects) {
        const double p = e.coords.dot(s.coords);
        min_p = std::min(min_p, p);
        sum += p;
      }
      sum_dev = std::max(sum_dev, std::abs(sum - 1.0));
    }
    const std::string object = "measurement:" + id;
    bool ok = check(object, "nonnegative_on_extremals", min_p >= -tol::distribution_sum, -min_p,
                    ErrorCode::check_failed, "negative probability on an extremal state");
    ok &= check(object, "normalized_on_extremals", sum_dev <= tol::distribution_sum, sum_dev,
                ErrorCode::check_failed, "outcome probabilities do not sum to 1 on extremals");
    if (!ok) {
      failed_ids_.insert(id);
      return;
    }
    out_.registry.add_gpt(id, std::move(gm));
  }

  const GptMeasurement* base_measurement(const std::string& of, const std::string& object,
                                         const std::string& ptr) {
    if (failed_ids_.count(of)) {
      check(object, "base_measurement_valid", false, 0.0, ErrorCode::check_failed,
            "base measurement \"" + of + "\" failed validation");
      return nullptr;
    }
    if (!out_.registry.contains(of)) {
      schema_error("unknown measurement id \"" + of + "\"", ptr);
    }
    const auto& entry = out_.registry.at(of);
    if (!entry.gpt) {
      schema_error("measurement \"" + of + "\" is categorical and cannot be combined", ptr);
    }
    return &*entry.gpt;
  }

  void parse_mixture(const std::string& id, const json& m, const std::string& ptr) {
    const json& of = field(m, "of", ptr);
    if (!of.is_array() || of.size() != 2) {
      schema_error("mixture needs \"of\": [id, id]", ptr + "/of");
    }
    const std::string object = "measurement:" + id;
    const GptMeasurement* m1 =
        base_measurement(of.at(0).get<std::string>(), object, ptr + "/of/0");
    const GptMeasurement* m2 =
        base_measurement(of.at(1).get<std::string>(), object, ptr + "/of/1");
    RVec w = real_vector(field(m, "weights", ptr), ptr + "/weights");
    const double sum_dev = std::abs(w.sum() - 1.0);
    bool ok = check(object, "weights_normalized",
                    w.size() == 2 && w.minCoeff() >= -tol::weights && sum_dev <= tol::weights,
                    sum_dev, ErrorCode::bad_weights, "mixture weights are not a 2-distribution");
    if (!ok || m1 == nullptr || m2 == nullptr) {
      failed_ids_.insert(id);
      return;
    }
    GptMeasurement mixed = mix_measurements(*m1, *m2, MixtureWeights(std::move(w)));
    mixed.label = id;
    out_.registry.add_gpt(id, std::move(mixed));
  }

  void parse_dither(const std::string& id, const json& m, const std::string& ptr) {
    const std::string object = "measurement:" + id;
    const GptMeasurement* base =
        base_measurement(str_field(m, "of", ptr), object, ptr + "/of");
    RMat q = real_matrix(field(m, "matrix", ptr), ptr + "/matrix");
    double col_dev = 0.0;
    for (int c = 0; c < q.cols(); ++c) col_dev = std::max(col_dev, std::abs(q.col(c).sum() - 1.0));
    bool ok = check(object, "column_stochastic",
                    q.minCoeff() >= -tol::stochastic && col_dev <= tol::stochastic,
                    std::max(col_dev, -q.minCoeff()), ErrorCode::bad_weights,
                    "dither matrix is not column-stochastic");
    if (base != nullptr) {
      ok &= check(object, "dither_shape", static_cast<int>(q.cols()) == base->outcome_count(),
                  std::abs(static_cast<double>(q.cols()) - base->outcome_count()),
                  ErrorCode::shape_mismatch, "dither columns do not match base outcomes");
    }
    if (!ok || base == nullptr) {
      failed_ids_.insert(id);
      return;
    }
    GptMeasurement dithered = dither_measurement(*base, DitherMatrix(std::move(q)));
    dithered.label = id;
    out_.registry.add_gpt(id, std::move(dithered));
  }

  void parse_prior() {
    const json& p = field(config_, "prior", "");
    try {
      out_.prior = PriorSpec::from_json(p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::schema_violation || e.code() == ErrorCode::bad_spec ||
          e.code() == ErrorCode::unsupported_grid || log_ == nullptr) {
        if (e.code() == ErrorCode::schema_violation) schema_error(e.what(), "/prior");
        throw;
      }
      // Numerical failure inside an explicit point (e.g. invalid state).
      check("prior", error_code_name(e.code()), false, e.magnitude(), e.code(), e.what());
      prior_ok_ = false;
      return;
    }
    validate_prior_consistency();
  }

  bool prior_is_quantum() const {
    switch (out_.prior.kind) {
      case PriorSpec::Kind::haar_pure:
      case PriorSpec::Kind::hilbert_schmidt:
      case PriorSpec::Kind::grid:
        return true;
      case PriorSpec::Kind::explicit_points:
        return std::holds_alternative<QuantumPoint>(out_.prior.points.front().second);
      default:
        return false;
    }
  }

  void validate_prior_consistency() {
    if (prior_is_quantum()) {
      if (out_.system.kind != GptSystem::Kind::quantum) {
        schema_error("quantum prior requires a quantum system", "/prior");
      }
      const int n = out_.system.size;
      if (out_.prior.kind == PriorSpec::Kind::explicit_points) {
        for (const auto& [w, pt] : out_.prior.points) {
          (void)w;
          if (std::get<QuantumPoint>(pt).rho.dim() != n) {
            schema_error("explicit state dimension does not match the system", "/prior/points");
          }
        }
      } else if (out_.prior.dim != n) {
        schema_error("prior n does not match the system", "/prior/n");
      }
      return;
    }

    // Product-of-simplices prior: components line up with the categorical
    // measurements in registration order.
    const int kinds = out_.registry.categorical_count();
    if (kinds == 0) {
      schema_error("simplex prior needs at least one categorical measurement", "/prior");
    }
    std::vector<int> outcome_counts;
    for (const auto& entry : out_.registry.entries()) {
      if (entry.categorical_index >= 0) outcome_counts.push_back(entry.outcome_count);
    }
    if (out_.prior.kind == PriorSpec::Kind::explicit_points) {
      for (const auto& [w, pt] : out_.prior.points) {
        (void)w;
        const auto& etas = std::get<SimplexTuple>(pt);
        if (static_cast<int>(etas.size()) != kinds) {
          schema_error("explicit etas arity does not match categorical measurements",
                       "/prior/points");
        }
        for (int c = 0; c < kinds; ++c) {
          const RVec& eta = etas[static_cast<std::size_t>(c)];
          if (eta.size() != outcome_counts[static_cast<std::size_t>(c)]) {
            schema_error("eta length does not match measurement outcomes", "/prior/points");
          }
          const double dev = std::abs(eta.sum() - 1.0);
          check("prior", "eta_simplex", eta.minCoeff() >= -tol::weights && dev <= tol::weights,
                std::max(dev, -eta.minCoeff()), ErrorCode::bad_weights,
                "explicit eta is not a probability vector");
        }
      }
      return;
    }
    if (static_cast<int>(out_.prior.alphas.size()) != kinds) {
      schema_error("prior alphas arity does not match categorical measurements", "/prior");
    }
    for (int c = 0; c < kinds; ++c) {
      if (out_.prior.alphas[static_cast<std::size_t>(c)].size() !=
          outcome_counts[static_cast<std::size_t>(c)]) {
        schema_error("alpha length does not match measurement outcomes", "/prior");
      }
    }
  }

  void parse_particle_count() {
    const long long n = int_field(config_, "particle_count", "");
    if (n < 1) schema_error("particle_count must be >= 1", "/particle_count");
    out_.particle_count = static_cast<std::size_t>(n);
  }

  void parse_records() {
    if (!config_.contains("records")) return;
    const json& rs = config_.at("records");
    if (!rs.is_object()) schema_error("records must be an object of name -> record", "/records");
    for (const auto& [name, body] : rs.items()) {
      const std::string ptr = "/records/" + name;
      const json& steps = field(body, "steps", ptr);
      if (!steps.is_array()) schema_error("steps must be an array", ptr + "/steps");
      ExperimentRecord record;
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string sptr = ptr + "/steps/" + std::to_string(i);
        const json& s = steps.at(i);
        if (!s.is_array() || s.size() != 2 || !s.at(0).is_string() || !s.at(1).is_number_integer()) {
          schema_error("each step must be [measurement_id, outcome_index]", sptr);
        }
        RecordStep step{s.at(0).get<std::string>(), s.at(1).get<int>()};
        if (failed_ids_.count(step.measurement_id)) continue; // reported already
        if (!out_.registry.contains(step.measurement_id)) {
          schema_error("unknown measurement id \"" + step.measurement_id + "\"", sptr);
        }
        const auto& entry = out_.registry.at(step.measurement_id);
        if (step.outcome_index < 0 || step.outcome_index >= entry.outcome_count) {
          schema_error("outcome index out of range for \"" + step.measurement_id + "\"", sptr);
        }
        if (prior_ok_) {
          const bool quantum_model = prior_is_quantum();
          if (quantum_model && !entry.gpt) {
            schema_error("record uses categorical measurement \"" + step.measurement_id +
                             "\" under a quantum prior",
                         sptr);
          }
          if (!quantum_model && entry.categorical_index < 0) {
            schema_error("record uses non-categorical measurement \"" + step.measurement_id +
                             "\" under a simplex prior",
                         sptr);
          }
        }
        record.steps.push_back(std::move(step));
      }
      out_.records.emplace(name, std::move(record));
    }
  }

  void parse_queries() {
    if (!config_.contains("queries")) return;
    const json& qs = config_.at("queries");
    if (!qs.is_array()) schema_error("queries must be an array", "/queries");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string ptr = "/queries/" + std::to_string(i);
      const json& q = qs.at(i);
      const std::string type = str_field(q, "type", ptr);
      if (type == "predictive" || type == "posterior" || type == "exchangeability_check") {
        const std::string record = str_field(q, "record", ptr);
        if (!out_.records.count(record)) {
          schema_error("unknown record \"" + record + "\"", ptr + "/record");
        }
        if (type == "exchangeability_check") {
          const json& perm = field(q, "permutation", ptr);
          if (!perm.is_array() || perm.size() != out_.records.at(record).size()) {
            schema_error("permutation must list every step index", ptr + "/permutation");
          }
        }
      } else if (type == "distinguishability") {
        parse_state_matrix(field(q, "a", ptr), ptr + "/a");
        parse_state_matrix(field(q, "b", ptr), ptr + "/b");
      } else if (type == "embed_diagnostics") {
        if (out_.system.kind != GptSystem::Kind::quantum) {
          schema_error("embed_diagnostics needs a quantum system", ptr);
        }
        parse_state_matrix(field(q, "state", ptr), ptr + "/state");
      } else {
        schema_error("unknown query type \"" + type + "\"", ptr + "/type");
      }
      out_.queries.push_back(q);
    }
  }
};

ojson load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot read config file \"" + path + "\"");
  }
  ojson parsed = ojson::parse(in, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::schema_violation, "config file \"" + path + "\" is not valid JSON");
  }
  return parsed;
}

} // namespace

Scenario load_file(const std::string& path) {
  const ojson config = load_json_file(path);
  Parser parser(config, nullptr);
  return parser.parse();
}

Scenario load_string(const std::string& text) {
  ojson parsed = ojson::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    throw Error(ErrorCode::schema_violation, "config text is not valid JSON");
  }
  Parser parser(parsed, nullptr);
  return parser.parse();
}

ValidationReport validate_config(const ojson& config) {
  ValidationReport report;
  Parser parser(config, &report);
  parser.parse();
  return report;
}

ValidationReport validate_file(const std::string& path) {
  return validate_config(load_json_file(path));
}

std::string ValidationReport::text() const {
  std::ostringstream os;
  os << std::left << std::setw(32) << "object" << std::setw(28) << "check"
     << std::setw(8) << "status" << "magnitude\n";
  for (const auto& row : rows) {
    os << std::left << std::setw(32) << row.object << std::setw(28) << row.check
       << std::setw(8) << (row.pass ? "pass" : "FAIL") << std::scientific
       << std::setprecision(3) << row.magnitude;
    os.unsetf(std::ios::floatfield);
    if (!row.note.empty()) os << "  " << row.note;
    os << "\n";
  }
  os << (ok ? "all checks passed" : "validation FAILED") << "\n";
  return os.str();
}

ojson ValidationReport::to_json() const {
  ojson rows_json = ojson::array();
  for (const auto& row : rows) {
    rows_json.push_back(ojson{{"object", row.object},
                              {"check", row.check},
                              {"pass", row.pass},
                              {"magnitude", row.magnitude},
                              {"note", row.note}});
  }
  return ojson{{"schema", kSchemaId}, {"ok", ok}, {"checks", std::move(rows_json)}};
}

ojson tolerance_table() {
  return ojson{
      {"hermitian", tol::hermitian},
      {"trace_one", tol::trace_one},
      {"psd", tol::psd},
      {"povm_sum", tol::povm_sum},
      {"prob_clamp", tol::prob_clamp},
      {"distribution_sum", tol::distribution_sum},
      {"weights", tol::weights},
      {"stochastic", tol::stochastic},
      {"exchange", tol::exchange},
      {"marginal", tol::marginal},
  };
}

namespace {

class Runner {
 public:
  Runner(const Scenario& sc, const RunOptions& opt) : sc_(sc), opt_(opt) {}

  ojson run() {
    ojson report;
    report["schema"] = kSchemaId;
    report["tool"] = ojson{{"name", "exchangeq"}, {"version", kToolVersion}};
    report["provenance"] = provenance();
    ojson queries = ojson::array();
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < sc_.queries.size(); ++i) {
      queries.push_back(run_query(i));
    }
    report["queries"] = std::move(queries);
    report["timing_ms"] = elapsed_ms(t0);
    return report;
  }

 private:
  const Scenario& sc_;
  const RunOptions& opt_;
  std::optional<ParticleEnsemble> ensemble_;

  static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }

  const ParticleEnsemble& ensemble() {
    if (!ensemble_) ensemble_ = sample_prior(sc_.prior, sc_.particle_count);
    return *ensemble_;
  }

  bool prior_is_dirichlet() const {
    return sc_.prior.kind == PriorSpec::Kind::simplex_dirichlet ||
           sc_.prior.kind == PriorSpec::Kind::product_dirichlet;
  }

  ojson provenance() const {
    return ojson{
        {"prior", sc_.prior.to_json()},
        {"particle_count", sc_.particle_count},
        {"rng", "splitmix64"},
        {"tolerances", tolerance_table()},
    };
  }

  ojson predictive_json(const PredictiveResult& r) const {
    ojson out{
        {"log_probability", r.log_probability},
        {"probability", r.probability()},
        {"kind", r.exact ? "exact" : "monte_carlo"},
        {"mc_std_error", r.mc_std_error},
        {"particle_count", r.particle_count},
    };
    return out;
  }

  ojson run_query(std::size_t index) {
    const ojson& q = sc_.queries[index];
    const std::string type = q.at("type").get<std::string>();
    ojson entry;
    entry["type"] = type;
    entry["inputs"] = q;
    const auto t0 = std::chrono::steady_clock::now();
    if (type == "predictive") {
      entry["result"] = run_predictive(q);
    } else if (type == "posterior") {
      entry["result"] = run_posterior(q, index);
    } else if (type == "distinguishability") {
      entry["result"] = run_distinguishability(q);
    } else if (type == "exchangeability_check") {
      entry["result"] = run_exchangeability(q);
    } else {
      entry["result"] = run_embed_diagnostics(q);
    }
    entry["timing_ms"] = elapsed_ms(t0);
    return entry;
  }

  ojson run_predictive(const ojson& q) {
    const auto& record = sc_.records.at(q.at("record").get<std::string>());
    const PredictiveResult r = predictive(ensemble(), record, sc_.registry, opt_.threads);
    ojson out = predictive_json(r);
    out["prior_ess"] = ensemble().effective_sample_size();
    if (prior_is_dirichlet()) {
      const double closed = dirichlet_multinomial_log_predictive(sc_.prior, record, sc_.registry);
      out["closed_form_log_probability"] = closed;
      out["closed_form_probability"] = std::exp(closed);
      const double diff = std::abs(r.probability() - std::exp(closed));
      out["abs_probability_difference"] = diff;
      out["within_3_mc_std_errors"] = diff <= 3.0 * r.mc_std_error;
    }
    return out;
  }

  ojson run_posterior(const ojson& q, std::size_t query_index) {
    const auto& record = sc_.records.at(q.at("record").get<std::string>());
    const PredictiveResult evidence = predictive(ensemble(), record, sc_.registry, opt_.threads);
    ParticleEnsemble post = posterior_update(ensemble(), record, sc_.registry, opt_.threads);

    ojson out;
    out["log_evidence"] = evidence.log_probability;
    out["evidence_mc_std_error"] = evidence.mc_std_error;
    out["kind"] = post.exact() ? "exact" : "monte_carlo";
    out["ess_prior"] = ensemble().effective_sample_size();
    out["ess_posterior"] = post.effective_sample_size();

    bool resampled = false;
    if (q.contains("resample")) {
      const double fraction = q.at("resample").at("ess_fraction").get<double>();
      if (post.effective_sample_size() < fraction * static_cast<double>(post.size())) {
        // Dedicated substream: hash of the prior seed, offset by query index.
        const std::uint64_t seed = mix64(sc_.prior.seed ^ 0xA5C3B7E1D2F09864ull) + query_index;
        post = systematic_resample(post, seed);
        resampled = true;
        out["resample_seed"] = seed;
      }
    }
    out["resampled"] = resampled;

    const EnsembleSummary summary = ensemble_statistics(post);
    if (summary.mean_state) {
      out["mean_state"] = matrix_to_json(summary.mean_state->matrix());
      out["mean_purity"] = *summary.mean_purity;
    }
    if (summary.mean_etas) {
      ojson etas = ojson::array();
      for (const auto& eta : *summary.mean_etas) etas.push_back(to_std(eta));
      out["mean_etas"] = std::move(etas);
    }
    return out;
  }

  ojson run_distinguishability(const ojson& q) {
    const DensityMatrix a(state_spec_from_json(q.at("a")));
    const DensityMatrix b(state_spec_from_json(q.at("b")));
    const DistinguishabilityResult r = perfectly_distinguishable(a, b);
    ojson out{{"distinguishable", r.distinguishable}, {"overlap_trace", r.overlap}};
    out["witness"] = r.witness ? povm_to_json(*r.witness) : ojson(nullptr);
    return out;
  }

  ojson run_exchangeability(const ojson& q) {
    const auto& record = sc_.records.at(q.at("record").get<std::string>());
    std::vector<std::size_t> perm;
    for (const auto& p : q.at("permutation")) perm.push_back(p.get<std::size_t>());
    const ExchangeabilityReport r =
        exchangeability_check(record, perm, ensemble(), sc_.registry, opt_.threads);
    return ojson{
        {"kind_preserving", r.kind_preserving},
        {"log_probability", r.log_probability},
        {"log_probability_permuted", r.log_probability_permuted},
        {"abs_log_difference", r.abs_log_difference},
        {"stronger_than_required", r.stronger_than_required},
    };
  }

  ojson run_embed_diagnostics(const ojson& q) {
    const DensityMatrix rho(state_spec_from_json(q.at("state")));
    if (rho.dim() != sc_.system.size) {
      throw Error(ErrorCode::dimension_mismatch,
                  "diagnostic state dimension does not match the system");
    }
    const GptState s = embed_state(rho, *sc_.basis);
    ojson etas;
    for (const auto& [id, eta] : eta_components(rho, sc_.registry, *sc_.basis)) {
      etas[id] = to_std(eta);
    }
    return ojson{
        {"coords", to_std(s.coords)},
        {"purity", rho.purity()},
        {"etas", std::move(etas)},
    };
  }
};

} // namespace

ojson run(const Scenario& scenario, const RunOptions& options) {
  Runner runner(scenario, options);
  return runner.run();
}

void write_report(const ojson& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot write report file \"" + path + "\"");
  }
  out << report.dump(2) << "\n";
}

} // namespace exq::scenario
