#include "exq/complex_matrix.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "exq/error.hpp"

namespace exq {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

ojson matrix_to_json(const CMat& m) {
  ojson entries = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      entries.push_back({m(r, c).real(), m(r, c).imag()});
    }
  }
  return ojson{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

CMat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw Error(ErrorCode::schema_violation,
                "matrix must be an object with \"dim\" and \"entries\"");
  }
  const long long n = j.at("dim").get<long long>();
  if (n < 1) {
    throw Error(ErrorCode::schema_violation, "matrix dim must be >= 1");
  }
  const auto& entries = j.at("entries");
  if (!entries.is_array() || static_cast<long long>(entries.size()) != n * n) {
    throw Error(ErrorCode::schema_violation,
                "matrix entries must hold exactly dim^2 [re, im] pairs");
  }
  CMat m(n, n);
  for (long long i = 0; i < n * n; ++i) {
    const auto& e = entries.at(i);
    if (!e.is_array() || e.size() != 2) {
      throw Error(ErrorCode::schema_violation,
                  "matrix entry must be a two-element [re, im] array");
    }
    m(i / n, i % n) = std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>());
  }
  return m;
}

ojson cvec_to_json(const CVec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back({v[i].real(), v[i].imag()});
  }
  return a;
}

CVec cvec_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::schema_violation, "vector must be a nonempty array");
  }
  CVec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j.at(i);
    if (!e.is_array() || e.size() != 2) {
      throw Error(ErrorCode::schema_violation,
                  "vector entry must be a two-element [re, im] array");
    }
    v[static_cast<Eigen::Index>(i)] =
        std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>());
  }
  return v;
}

namespace {

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  return parts;
}

int parse_index(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::schema_violation, "bad numeric field in matrix key \"" + key + "\"");
  }
}

CMat pauli(char which) {
  CMat m = CMat::Zero(2, 2);
  const std::complex<double> i(0.0, 1.0);
  switch (which) {
    case 'i': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'x': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'y': m(0, 1) = -i; m(1, 0) = i; break;
    case 'z': m(0, 0) = 1; m(1, 1) = -1; break;
    default:
      throw Error(ErrorCode::schema_violation, std::string("unknown pauli key: ") + which);
  }
  return m;
}

} // namespace

CMat named_matrix(const std::string& key) {
  const auto parts = split_key(key);
  if (parts.empty()) {
    throw Error(ErrorCode::schema_violation, "empty matrix key");
  }
  const std::string& family = parts[0];

  if (family == "pauli" && parts.size() == 2 && parts[1].size() == 1) {
    return pauli(parts[1][0]);
  }
  if (family == "identity" && parts.size() == 2) {
    const int n = parse_index(parts[1], key);
    if (n < 1) throw Error(ErrorCode::schema_violation, "identity dim must be >= 1");
    return CMat::Identity(n, n);
  }
  if (family == "proj" && parts.size() == 3) {
    const int n = parse_index(parts[1], key);
    const int k = parse_index(parts[2], key);
    if (n < 1 || k < 0 || k >= n) {
      throw Error(ErrorCode::schema_violation, "proj index out of range in \"" + key + "\"");
    }
    CMat m = CMat::Zero(n, n);
    m(k, k) = 1;
    return m;
  }
  if (family == "gellmann" && parts.size() == 4) {
    const int n = parse_index(parts[1], key);
    const int j = parse_index(parts[2], key);
    const int k = parse_index(parts[3], key);
    if (n < 2) throw Error(ErrorCode::schema_violation, "gellmann dim must be >= 2");
    CMat m = CMat::Zero(n, n);
    const std::complex<double> i(0.0, 1.0);
    if (j >= 1 && k >= 1 && j < k && k <= n) {
      m(j - 1, k - 1) = 1;
      m(k - 1, j - 1) = 1;
      return m;
    }
    if (j >= 1 && k >= 1 && k < j && j <= n) {
      m(k - 1, j - 1) = -i;
      m(j - 1, k - 1) = i;
      return m;
    }
    if (j == k && j >= 1 && j <= n - 1) {
      const double scale = std::sqrt(2.0 / (j * (j + 1.0)));
      for (int a = 0; a < j; ++a) m(a, a) = scale;
      m(j, j) = -scale * j;
      return m;
    }
    throw Error(ErrorCode::schema_violation, "gellmann indices out of range in \"" + key + "\"");
  }
  throw Error(ErrorCode::schema_violation, "unknown matrix key \"" + key + "\"");
}

CMat state_spec_from_json(const json& j) {
  if (j.is_string()) return named_matrix(j.get<std::string>());
  if (j.is_object() && j.contains("pure")) {
    const CVec psi = cvec_from_json(j.at("pure"));
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-12) {
      throw Error(ErrorCode::schema_violation, "pure-state amplitudes are not normalized");
    }
    return psi * psi.adjoint();
  }
  return matrix_from_json(j);
}

double hermiticity_violation(const CMat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "Ok";
    case ErrorCode::not_hermitian: return "NotHermitian";
    case ErrorCode::trace_not_one: return "TraceNotOne";
    case ErrorCode::not_positive: return "NotPositive";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::not_orthonormal: return "NotOrthonormal";
    case ErrorCode::bad_weights: return "BadWeights";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::system_mismatch: return "SystemMismatch";
    case ErrorCode::numeric_range: return "NumericRange";
    case ErrorCode::check_failed: return "CheckFailed";
    case ErrorCode::unsupported_grid: return "UnsupportedGrid";
    case ErrorCode::bad_spec: return "BadSpec";
    case ErrorCode::unknown_measurement: return "UnknownMeasurement";
    case ErrorCode::bad_permutation: return "BadPermutation";
    case ErrorCode::all_weights_zero: return "AllWeightsZero";
    case ErrorCode::model_mismatch: return "ModelMismatch";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::internal: return "Internal";
  }
  return "Unknown";
}

int cli_exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok:
      return 0;
    case ErrorCode::schema_violation:
    case ErrorCode::io_error:
    case ErrorCode::bad_spec:
    case ErrorCode::unsupported_grid:
    case ErrorCode::model_mismatch:
      return 2;
    case ErrorCode::not_hermitian:
    case ErrorCode::trace_not_one:
    case ErrorCode::not_positive:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::length_mismatch:
    case ErrorCode::not_orthonormal:
    case ErrorCode::bad_weights:
    case ErrorCode::shape_mismatch:
    case ErrorCode::system_mismatch:
    case ErrorCode::numeric_range:
    case ErrorCode::check_failed:
      return 3;
    case ErrorCode::unknown_measurement:
    case ErrorCode::bad_permutation:
    case ErrorCode::all_weights_zero:
      return 4;
    case ErrorCode::internal:
      return 5;
  }
  return 5;
}

} // namespace exq
