#include <catch2/catch_amalgamated.hpp>

#include "flycat/netstates.hpp"
#include "flycat/qcore.hpp"

using namespace flycat;

namespace {

// Uniform even-parity superposition on 3 qubits.
PureState xi_plus() {
  Vector v = Vector::Zero(8);
  for (std::size_t s : {0, 3, 5, 6}) v(s) = 0.5;
  return PureState(3, std::move(v));
}

}  // namespace

TEST_CASE("apply_pauli identity leaves any state unchanged") {
  RandomSource rng(11);
  const PureState psi = haar_state(3, rng);
  const PureState out = apply_pauli(psi, PauliString::identity(3));
  REQUIRE((out.amplitudes() - psi.amplitudes()).norm() == 0.0);
}

TEST_CASE("apply_pauli involution: X applied twice is identity") {
  RandomSource rng(12);
  const PureState psi = haar_state(3, rng);
  const PauliString x1 = PauliString::from_label("XII");
  const PureState out = apply_pauli(apply_pauli(psi, x1), x1);
  REQUIRE((out.amplitudes() - psi.amplitudes()).norm() < 1e-15);
}

TEST_CASE("gauge equivalence: Z2Z3 then Z1Z2Z3 equals Z1 on even parity") {
  // On the span where Z1Z2Z3 acts as +1 (even parity), Z2Z3 acts as Z1.
  const PureState psi = xi_plus();
  const PureState via_gauge = apply_pauli(
      apply_pauli(psi, PauliString::from_label("IZZ")),
      PauliString::from_label("ZZZ"));
  const PureState direct = apply_pauli(psi, PauliString::from_label("ZII"));
  REQUIRE((via_gauge.amplitudes() - direct.amplitudes()).norm() < 1e-15);
}

TEST_CASE("(PQ)^2 = +-I for every pair of strings on up to 3 qubits") {
  for (int n = 1; n <= 3; ++n) {
    const std::size_t total = 1;
    std::size_t count = 1;
    for (int q = 0; q < n; ++q) count *= 4;
    (void)total;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = 0; b < count; ++b) {
        auto decode = [&](std::size_t code) {
          std::vector<PauliOp> ops(n);
          for (int q = 0; q < n; ++q)
            ops[q] = static_cast<PauliOp>((code >> (2 * q)) & 3);
          return PauliString(std::move(ops));
        };
        const Matrix pq =
            decode(a).to_matrix() * decode(b).to_matrix();
        const Matrix sq = pq * pq;
        const cx lead = sq(0, 0);
        REQUIRE(std::abs(std::abs(lead) - 1.0) < 1e-12);
        const auto d = sq.rows();
        REQUIRE((sq - lead * Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <
                1e-12);
      }
  }
}

TEST_CASE("apply_pauli preserves trace and Hermiticity on density matrices") {
  RandomSource rng(13);
  const DensityMatrix rho = DensityMatrix::pure(haar_state(2, rng));
  const DensityMatrix out = apply_pauli(rho, PauliString::from_label("YX"));
  REQUIRE(std::abs(out.entries().trace().real() - 1.0) < 1e-12);
  REQUIRE((out.entries() - out.entries().adjoint()).cwiseAbs().maxCoeff() <
          1e-12);
  REQUIRE(out.min_eigenvalue() > -1e-9);
}

TEST_CASE("bell_measure on a Bell eigenstate is deterministic") {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const PureState phi_plus(2, std::move(v));
  RandomSource rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const auto [label, post] = bell_measure(phi_plus, 0, 1, rng);
    REQUIRE(label == BellLabel::PhiPlus);
    REQUIRE(std::abs(std::abs(inner(post, phi_plus)) - 1.0) < 1e-12);
  }
}

TEST_CASE("bell_measure branch probabilities sum to 1") {
  RandomSource rng(22);
  for (int rep = 0; rep < 25; ++rep) {
    const PureState psi = haar_state(4, rng);
    const auto p = bell_probabilities(psi, 1, 3);
    REQUIRE(p[0] + p[1] + p[2] + p[3] == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("bell_measure frequencies match Born weights, Haar 4-qubit") {
  RandomSource rng(23);
  const PureState psi = haar_state(4, rng);
  const auto p = bell_probabilities(psi, 0, 2);
  const std::size_t shots = 10000;
  std::array<std::size_t, 4> counts{};
  for (std::size_t k = 0; k < shots; ++k) {
    RandomSource r = rng.stream(k);
    ++counts[static_cast<int>(bell_measure(psi, 0, 2, r).first)];
  }
  for (int b = 0; b < 4; ++b) {
    const double phat = static_cast<double>(counts[b]) / shots;
    const double se = std::sqrt(p[b] * (1.0 - p[b]) / shots);
    REQUIRE(std::abs(phat - p[b]) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("fidelity of a pure state with itself is 1") {
  RandomSource rng(31);
  const PureState psi = haar_state(3, rng);
  REQUIRE(fidelity(DensityMatrix::pure(psi), psi) ==
          Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("fidelity of the maximally mixed 6-qubit state with |T> is 1/64") {
  REQUIRE(fidelity(DensityMatrix::maximally_mixed(6), tetra_target()) ==
          Catch::Approx(1.0 / 64.0).margin(1e-15));
}

TEST_CASE("haar_two_qubit is normalized and has uniform basis weights") {
  RandomSource rng(41);
  const std::size_t draws = 100000;
  double sum00 = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    RandomSource r = rng.stream(k);
    const PureState psi = haar_two_qubit(r);
    REQUIRE(std::abs(psi.amplitudes().squaredNorm() - 1.0) < 1e-12);
    sum00 += std::norm(psi.amplitude(0));
  }
  // E|<00|psi>|^2 = 1/4; Var = d-dependent, bounded by 1/16 per draw.
  const double mean = sum00 / draws;
  const double se = 0.25 / std::sqrt(static_cast<double>(draws));
  REQUIRE(std::abs(mean - 0.25) < 3.0 * se);
}

TEST_CASE("mean fidelity between independent Haar draws is 1/4") {
  RandomSource rng(42);
  const std::size_t draws = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    RandomSource r = rng.stream(k);
    const double f = fidelity(haar_two_qubit(r), haar_two_qubit(r));
    sum += f;
    sumsq += f * f;
  }
  const double mean = sum / draws;
  const double se = std::sqrt(
      std::max(sumsq / draws - mean * mean, 0.0) / draws);
  REQUIRE(std::abs(mean - 0.25) < 3.0 * se);
}

TEST_CASE("partial trace of a product state recovers the factors") {
  RandomSource rng(51);
  const PureState a = haar_state(2, rng);
  const PureState b = haar_state(2, rng);
  const DensityMatrix joint = DensityMatrix::pure(tensor(a, b));
  const std::array<int, 2> front = {0, 1}, back = {2, 3};
  const DensityMatrix ra = partial_trace(joint, front);
  const DensityMatrix rb = partial_trace(joint, back);
  REQUIRE((ra.entries() - DensityMatrix::pure(a).entries())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  REQUIRE((rb.entries() - DensityMatrix::pure(b).entries())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("contract violations throw") {
  RandomSource rng(61);
  const PureState psi = haar_state(2, rng);
  REQUIRE_THROWS_AS(apply_pauli(psi, PauliString::from_label("XXX")),
                    contract_error);
  Vector bad = Vector::Zero(4);
  bad(0) = 2.0;
  REQUIRE_THROWS_AS(PureState(2, bad), contract_error);
  REQUIRE_THROWS_AS(DensityMatrix(2, Matrix::Identity(4, 4)),
                    contract_error);  // trace 4
}
