#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "exq/error.hpp"
#include "exq/hilbert.hpp"
#include "support/test_util.hpp"

using namespace exq;
using namespace exq::testutil;

namespace {

CMat diag2(double a, double b) {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

} // namespace

TEST_CASE("validate_density accepts legal states and names violations") {
  CHECK_NOTHROW(validate_density(diag2(0.5, 0.5)));
  CHECK_NOTHROW(validate_density(diag2(1.0, 0.0)));

  CHECK(code_of([] { validate_density(diag2(0.6, 0.6)); }) == ErrorCode::trace_not_one);

  CMat skew = diag2(0.5, 0.5);
  skew(0, 1) = std::complex<double>(0.0, 0.2);
  skew(1, 0) = std::complex<double>(0.0, 0.2); // conj would be -0.2i
  CHECK(code_of([&] { validate_density(skew); }) == ErrorCode::not_hermitian);

  CHECK(code_of([] { validate_density(diag2(1.2, -0.2)); }) == ErrorCode::not_positive);

  // violation magnitude is reported
  try {
    validate_density(diag2(0.6, 0.6));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.magnitude() == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("trace_probability on reference states") {
  const DensityMatrix mixed(diag2(0.5, 0.5));
  const Effect e0(basis_state(2, 0).projector());
  CHECK(trace_probability(e0, mixed) == doctest::Approx(0.5).epsilon(1e-14));

  const Effect unit(CMat::Identity(2, 2));
  CHECK(trace_probability(unit, mixed) == doctest::Approx(1.0).epsilon(1e-14));

  // |<+x|+z>|^2 computed directly as the oracle
  const PureState px = plus_x();
  const PureState pz = basis_state(2, 0);
  const double oracle = std::norm(px.amplitudes().dot(pz.amplitudes()));
  const Effect ex(px.projector());
  const DensityMatrix rz(pz.projector());
  CHECK(trace_probability(ex, rz) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(oracle == doctest::Approx(0.5).epsilon(1e-14));

  const DensityMatrix big(CMat::Identity(3, 3) / 3.0);
  CHECK(code_of([&] { trace_probability(e0, big); }) == ErrorCode::dimension_mismatch);
}

TEST_CASE("outcome_distribution on reference measurements") {
  const Povm z = z_measurement();
  const DensityMatrix mixed(diag2(0.5, 0.5));
  RVec p = outcome_distribution(z, mixed);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-14));

  const DensityMatrix up(basis_state(2, 0).projector());
  p = outcome_distribution(z, up);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("trine POVM is uniform on the maximally mixed state") {
  // 2/3 |phi_k><phi_k| at Bloch angles 0, 2pi/3, 4pi/3 in the x-z plane
  std::vector<Effect> effects;
  std::vector<CMat> projectors;
  for (int k = 0; k < 3; ++k) {
    const double theta = k * M_PI / 3.0; // half of the Bloch angle
    CVec v(2);
    v[0] = std::cos(theta);
    v[1] = std::sin(theta);
    projectors.push_back(v * v.adjoint());
    effects.emplace_back(projectors.back() * (2.0 / 3.0));
  }
  const Povm trine("trine", std::move(effects));
  const DensityMatrix mixed(diag2(0.5, 0.5));
  const RVec p = outcome_distribution(trine, mixed);
  for (int k = 0; k < 3; ++k) {
    // oracle: direct trace of (2/3) P_k (I/2)
    const double direct = (projectors[k] * mixed.matrix()).trace().real() * 2.0 / 3.0;
    CHECK(p[k] == doctest::Approx(direct).epsilon(1e-14));
    CHECK(p[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("born_probability basics and conjugate symmetry") {
  const PureState up = basis_state(2, 0);
  const PureState down = basis_state(2, 1);
  CHECK(born_probability(up, up) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(born_probability(up, down) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(born_probability(plus_x(), up) == doctest::Approx(0.5).epsilon(1e-14));

  SplitMix64 rng = SplitMix64::substream(7771, 0);
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    const PureState a = random_pure(rng, n);
    const PureState b = random_pure(rng, n);
    CHECK(std::abs(born_probability(a, b) - born_probability(b, a)) <= 1e-15);
  }
}

TEST_CASE("born rule equals the trace formula with rank-1 projectors") {
  SplitMix64 rng = SplitMix64::substream(7772, 0);
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    const PureState a = random_pure(rng, n);
    const PureState b = random_pure(rng, n);
    const Effect ea(a.projector());
    const DensityMatrix rb(b.projector());
    CHECK(std::abs(born_probability(a, b) - trace_probability(ea, rb)) <= 1e-12);
  }
}

TEST_CASE("expectation_value") {
  const Povm z = z_measurement();
  RVec lambda(2);
  lambda << 1.0, -1.0;

  const DensityMatrix mixed(diag2(0.5, 0.5));
  CHECK(expectation_value(lambda, z, mixed) == doctest::Approx(0.0).epsilon(1e-14));

  const DensityMatrix up(basis_state(2, 0).projector());
  CHECK(expectation_value(lambda, z, up) == doctest::Approx(1.0).epsilon(1e-14));

  RVec bad(3);
  bad << 1, 2, 3;
  CHECK(code_of([&] { expectation_value(bad, z, mixed); }) == ErrorCode::length_mismatch);

  // lambda = (2, 3): recompute from the distribution
  SplitMix64 rng = SplitMix64::substream(7773, 0);
  RVec two_three(2);
  two_three << 2.0, 3.0;
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix rho = random_density(rng, 2);
    const Povm povm = random_povm(rng, 2, 2);
    const RVec p = outcome_distribution(povm, rho);
    CHECK(expectation_value(two_three, povm, rho) ==
          doctest::Approx(2.0 * p[0] + 3.0 * p[1]).epsilon(1e-12));
  }

  // projective case agrees with <psi| A |psi>
  for (int i = 0; i < 50; ++i) {
    const PureState psi = random_pure(rng, 2);
    const DensityMatrix rho(psi.projector());
    const CMat a = 1.0 * z.effects()[0].matrix() - 1.0 * z.effects()[1].matrix();
    const double direct = (psi.amplitudes().adjoint() * a * psi.amplitudes())(0).real();
    CHECK(std::abs(expectation_value(lambda, z, rho) - direct) <= 1e-10);
  }
}

TEST_CASE("apply_transformation") {
  const DensityMatrix up(basis_state(2, 0).projector());

  SUBCASE("identity channel") {
    const Transformation id("id", {CMat::Identity(2, 2)});
    const DensityMatrix out = apply_transformation(id, up);
    CHECK((out.matrix() - up.matrix()).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SUBCASE("Pauli-X flips the basis state") {
    const Transformation x("x", {named_matrix("pauli:x")});
    const DensityMatrix out = apply_transformation(x, up);
    const CMat expected = basis_state(2, 1).projector(); // direct conjugation oracle
    CHECK((out.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("full depolarization sends everything to I/2") {
    std::vector<CMat> kraus = {
        named_matrix("pauli:i") / 2.0,
        named_matrix("pauli:x") / 2.0,
        named_matrix("pauli:y") / 2.0,
        named_matrix("pauli:z") / 2.0,
    };
    const Transformation dep("depolarize", std::move(kraus));
    SplitMix64 rng = SplitMix64::substream(7774, 0);
    for (int i = 0; i < 20; ++i) {
      const DensityMatrix rho = random_density(rng, 2);
      // oracle: explicit Kraus sum
      CMat direct = CMat::Zero(2, 2);
      for (const auto& k : dep.kraus_ops()) direct += k * rho.matrix() * k.adjoint();
      const DensityMatrix out = apply_transformation(dep, rho);
      CHECK((out.matrix() - direct).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((out.matrix() - CMat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("trace and positivity preserved over random channels") {
    SplitMix64 rng = SplitMix64::substream(7775, 0);
    for (int i = 0; i < 1000; ++i) {
      const int n = 2 + static_cast<int>(rng.next_u64() % 2);
      const DensityMatrix rho = random_density(rng, n);
      const Transformation t = random_channel(rng, n, 2 + static_cast<int>(rng.next_u64() % 3));
      const DensityMatrix out = apply_transformation(t, rho);
      CHECK(std::abs(out.matrix().trace().real() - 1.0) <= 1e-10);
      CHECK(hermitian_eigenvalues(out.matrix()).minCoeff() >= -1e-9);
    }
  }

  SUBCASE("composition equals the composed Kraus set") {
    SplitMix64 rng = SplitMix64::substream(7776, 0);
    for (int i = 0; i < 100; ++i) {
      const DensityMatrix rho = random_density(rng, 2);
      const Transformation t1 = random_channel(rng, 2, 2, "t1");
      const Transformation t2 = random_channel(rng, 2, 2, "t2");
      std::vector<CMat> composed;
      for (const auto& k2 : t2.kraus_ops()) {
        for (const auto& k1 : t1.kraus_ops()) composed.push_back(k2 * k1);
      }
      const Transformation both("t2t1", std::move(composed));
      const CMat a = apply_transformation(t2, apply_transformation(t1, rho)).matrix();
      const CMat b = apply_transformation(both, rho).matrix();
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("projective_measurement") {
  const PureState z_states[] = {basis_state(2, 0), basis_state(2, 1)};
  const Povm z = projective_measurement(z_states, "z");
  CHECK(z.outcome_count() == 2);
  CHECK((z.effects()[0].matrix() - basis_state(2, 0).projector()).cwiseAbs().maxCoeff() <= 1e-15);

  const PureState x_states[] = {plus_x(), minus_x()};
  CHECK_NOTHROW(projective_measurement(x_states, "x"));

  const PureState repeated[] = {basis_state(2, 0), basis_state(2, 0)};
  CHECK(code_of([&] { projective_measurement(repeated); }) == ErrorCode::not_orthonormal);
}

TEST_CASE("POVM construction rejects bad inputs") {
  std::vector<Effect> effects;
  effects.emplace_back(diag2(0.5, 0.5));
  CHECK(code_of([&] { Povm("broken", effects); }) == ErrorCode::check_failed);

  std::vector<Effect> good;
  good.emplace_back(diag2(1.0, 0.0));
  good.emplace_back(diag2(0.0, 1.0));
  CHECK(code_of([&] { Povm("dup", good, {"a", "a"}); }) == ErrorCode::bad_spec);
}

TEST_CASE("named matrix keys") {
  CHECK((named_matrix("pauli:z") - diag2(1.0, -1.0)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((named_matrix("proj:3:1") * named_matrix("proj:3:1") - named_matrix("proj:3:1"))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  // gellmann:2:* reproduce the Paulis
  CHECK((named_matrix("gellmann:2:1:2") - named_matrix("pauli:x")).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((named_matrix("gellmann:2:2:1") - named_matrix("pauli:y")).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((named_matrix("gellmann:2:1:1") - named_matrix("pauli:z")).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(code_of([] { named_matrix("gellmann:3:9:9"); }) == ErrorCode::schema_violation);
}

TEST_CASE("probability clamp window") {
  CHECK(clamp_probability(-0.5e-9) == 0.0);
  CHECK(clamp_probability(1.0 + 0.5e-9) == 1.0);
  CHECK(code_of([] { clamp_probability(-1e-6); }) == ErrorCode::numeric_range);
  CHECK(code_of([] { clamp_probability(1.0 + 1e-6); }) == ErrorCode::numeric_range);
}
