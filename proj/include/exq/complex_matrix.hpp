#pragma once

#include <string>
#include <Eigen/Dense>
#include <json.hpp>

namespace exq {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// JSON form: {"dim": n, "entries": [[re, im], ...]} row-major, n^2 entries.
nlohmann::ordered_json matrix_to_json(const CMat& m);
CMat matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json cvec_to_json(const CVec& v);
CVec cvec_from_json(const nlohmann::json& j);

// Matrix constructors addressable by string key:
//   "identity:<n>"          identity
//   "pauli:i|x|y|z"         2x2 Pauli matrices
//   "proj:<n>:<k>"          computational-basis projector |k><k|, 0-based
//   "gellmann:<n>:<j>:<k>"  generalized Gell-Mann matrix, 1-based indices:
//                           j < k symmetric, j > k antisymmetric (pair k < j),
//                           j == k in 1..n-1 diagonal. Hilbert-Schmidt norm
//                           sqrt(2) (the conventional normalization).
CMat named_matrix(const std::string& key);

// State spec accepted in configs: a key string, a matrix object, or
// {"pure": [[re, im], ...]} for |psi><psi| of normalized amplitudes.
CMat state_spec_from_json(const nlohmann::json& j);

double hermiticity_violation(const CMat& m);

} // namespace exq
