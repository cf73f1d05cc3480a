#pragma once

// Central tolerance table. Every constructor and operation validates against
// these constants; nothing in the library carries its own ad-hoc epsilons.

namespace exq::tol {

inline constexpr double hermitian = 1e-10;        // max |A_ab - conj(A_ba)|
inline constexpr double trace_one = 1e-10;        // |tr rho - 1|
inline constexpr double psd = 1e-9;               // min eigenvalue >= -psd
inline constexpr double effect_upper = 1e-9;      // max eigenvalue <= 1 + effect_upper
inline constexpr double povm_sum = 1e-9;          // entrywise |sum E_i - I|
inline constexpr double pure_norm = 1e-12;        // | ||psi||^2 - 1 |
inline constexpr double kraus_sum = 1e-9;         // entrywise |sum K^dag K - I|
inline constexpr double orthonormal = 1e-10;      // |<psi_i|psi_j> - delta_ij|
inline constexpr double prob_clamp = 1e-9;        // clamping window around [0, 1]
inline constexpr double distribution_sum = 1e-10; // |sum p_i - 1|

inline constexpr double basis_orthonormal = 1e-10; // |tr(B_a B_b) - delta_ab|
inline constexpr double basis_traceless = 1e-10;   // |tr B_a|, a > 0
inline constexpr double embed_imag = 1e-12;        // imaginary residue of tr(B_a A)
inline constexpr double embed_round_trip = 1e-12;  // unembed(embed(A)) vs A
inline constexpr double quantum_norm_coord = 1e-10;

inline constexpr double support_overlap = 1e-10;  // tr(rho1 rho2) for orthogonality
inline constexpr double support_projector = 1e-8; // ||P1 P2||_max
inline constexpr double support_rank = 1e-9;      // eigenvalue cut for the support
inline constexpr double witness_prob = 1e-9;      // witness outcomes vs {0, 1}

inline constexpr double weights = 1e-12;          // |sum q_i - 1|, q_i >= -weights
inline constexpr double stochastic = 1e-12;       // column sums of a dither matrix

inline constexpr double ensemble_weights = 1e-10; // normalized particle weights
inline constexpr double explicit_weights = 1e-12;

inline constexpr double exchange = 1e-12;         // permuted-record predictive equality
inline constexpr double marginal = 1e-10;         // law-of-total-probability closure

} // namespace exq::tol
