#pragma once

// Controlled teleportation of a two-qubit state through the tetrahedron
// state. Alice holds message qubits (A1, A2) plus tetrahedron qubits 1, 2;
// Bob holds 3, 4; Charlie holds 5, 6. Register layout (qubit 0 = MSB):
// [A1, A2, t1, t2, t3, t4, t5, t6] -> Bob at (4, 5), Charlie at (6, 7).

#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include "flycat/netstates.hpp"
#include "flycat/parallel.hpp"
#include "flycat/qcore.hpp"

namespace flycat {

// Bell-basis coefficients of the message:
// |phi> = a|Phi+> + b|Psi+> + c|Psi-> + d|Phi->.
struct TwoQubitMessage {
  std::array<cx, 4> coeff;

  explicit TwoQubitMessage(std::array<cx, 4> c) : coeff(c) {
    double norm2 = 0.0;
    for (const auto& v : coeff) norm2 += std::norm(v);
    require(std::abs(norm2 - 1.0) < kStateTol,
            "TwoQubitMessage: coefficients not normalized");
  }

  static TwoQubitMessage haar(RandomSource& rng) {
    std::array<cx, 4> c;
    double norm2 = 0.0;
    for (auto& v : c) {
      v = cx(rng.normal(), rng.normal());
      norm2 += std::norm(v);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : c) v *= inv;
    return TwoQubitMessage(c);
  }

  static TwoQubitMessage from_state(const PureState& psi) {
    require(psi.num_qubits() == 2, "TwoQubitMessage: need a 2-qubit state");
    std::array<cx, 4> c;
    for (int b = 0; b < 4; ++b) {
      const auto basis = detail::bell_basis_coeffs(static_cast<BellLabel>(b));
      cx overlap = 0.0;
      for (int i = 0; i < 4; ++i)
        overlap += std::conj(basis[i]) * psi.amplitude(i);
      c[b] = overlap;
    }
    return TwoQubitMessage(c);
  }

  PureState to_state() const {
    Vector v = Vector::Zero(4);
    for (int b = 0; b < 4; ++b) {
      const auto basis = detail::bell_basis_coeffs(static_cast<BellLabel>(b));
      for (int i = 0; i < 4; ++i) v(i) += coeff[b] * basis[i];
    }
    return PureState(2, std::move(v));
  }
};

struct TeleportOutcome {
  std::array<BellLabel, 2> alice_outcomes;
  // (Z outcome on tetra qubit 5 as a bit, X outcome on qubit 6 as +-1);
  // present only when Charlie cooperates.
  std::optional<std::pair<int, int>> charlie_outcomes;
  DensityMatrix bob_state;
  double fidelity;
};

namespace detail {

// Bob's correction for one Alice Bell outcome, acting on `qubit`.
inline PureState apply_alice_correction(const PureState& psi, BellLabel out,
                                        int qubit) {
  switch (out) {
    case BellLabel::PhiPlus:
      return psi;
    case BellLabel::PsiPlus:
      return apply_pauli(psi, PauliString::single(8, qubit, PauliOp::X));
    case BellLabel::PhiMinus:
      return apply_pauli(psi, PauliString::single(8, qubit, PauliOp::Z));
    case BellLabel::PsiMinus: {
      PureState t =
          apply_pauli(psi, PauliString::single(8, qubit, PauliOp::X));
      return apply_pauli(t, PauliString::single(8, qubit, PauliOp::Z));
    }
  }
  return psi;
}

// Bob's correction for Charlie's (Z, X) outcomes, acting on qubits (4, 5).
inline PureState apply_charlie_correction(const PureState& psi, int z_bit,
                                          int x_sign) {
  PureState out = psi;
  static const std::array<int, 2> bob = {4, 5};
  if (z_bit == 1)
    out = apply_pauli(out, PauliString::on_qubits(8, bob, PauliOp::X));
  if (x_sign < 0)
    out = apply_pauli(out, PauliString::on_qubits(8, bob, PauliOp::Z));
  return out;
}

// Projects `qubit` onto computational value `bit`.
inline std::pair<double, PureState> project_qubit(const PureState& psi,
                                                  int qubit, int bit) {
  const int n = psi.num_qubits();
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  Vector v = psi.amplitudes();
  double w = 0.0;
  for (std::size_t s = 0; s < psi.dim(); ++s) {
    const bool hit = ((s & mask) != 0) == (bit == 1);
    if (hit)
      w += std::norm(v(static_cast<Eigen::Index>(s)));
    else
      v(static_cast<Eigen::Index>(s)) = 0.0;
  }
  if (w <= 0.0) return {0.0, psi};
  v /= std::sqrt(w);
  return {w, PureState(n, std::move(v))};
}

}  // namespace detail

// One fully specified branch of the protocol: Alice's two Bell outcomes and,
// if cooperating, Charlie's (Z bit, X sign). Returns the branch probability
// together with the outcome; zero-probability branches return probability 0.
inline std::pair<double, TeleportOutcome> teleport_branch(
    const TwoQubitMessage& msg, BellLabel alice1, BellLabel alice2,
    std::optional<std::pair<int, int>> charlie) {
  PureState state = tensor(msg.to_state(), tetra_target());
  double prob = 1.0;

  auto [p1, s1] = bell_project(state, 0, 2, alice1);
  if (p1 <= 0.0) return {0.0, TeleportOutcome{{alice1, alice2}, charlie,
                                              DensityMatrix::maximally_mixed(2),
                                              0.0}};
  prob *= p1;
  auto [p2, s2] = bell_project(s1, 1, 3, alice2);
  if (p2 <= 0.0) return {0.0, TeleportOutcome{{alice1, alice2}, charlie,
                                              DensityMatrix::maximally_mixed(2),
                                              0.0}};
  prob *= p2;
  state = detail::apply_alice_correction(s2, alice1, 4);
  state = detail::apply_alice_correction(state, alice2, 5);

  if (charlie) {
    const auto [z_bit, x_sign] = *charlie;
    auto [pz, sz] = detail::project_qubit(state, 6, z_bit);
    if (pz <= 0.0) return {0.0, TeleportOutcome{{alice1, alice2}, charlie,
                                                DensityMatrix::maximally_mixed(2),
                                                0.0}};
    prob *= pz;
    // X measurement: rotate qubit 7 with H, project, rotate back.
    PureState rotated = apply_hadamard(sz, 7);
    auto [px, sx] = detail::project_qubit(rotated, 7, x_sign > 0 ? 0 : 1);
    if (px <= 0.0) return {0.0, TeleportOutcome{{alice1, alice2}, charlie,
                                                DensityMatrix::maximally_mixed(2),
                                                0.0}};
    prob *= px;
    state = detail::apply_charlie_correction(apply_hadamard(sx, 7), z_bit,
                                             x_sign);
  }

  static const std::array<int, 2> bob = {4, 5};
  DensityMatrix bob_state = partial_trace(state, bob);
  const double f = fidelity(bob_state, msg.to_state());
  return {prob,
          TeleportOutcome{{alice1, alice2}, charlie, std::move(bob_state), f}};
}

// Born-samples the protocol. With cooperation the fidelity is 1 on every
// branch; without it Bob's state is the Bell-diagonal dephased message.
inline TeleportOutcome run_teleport(const TwoQubitMessage& msg, bool cooperate,
                                    RandomSource& rng) {
  PureState state = tensor(msg.to_state(), tetra_target());
  auto [a1, s1] = bell_measure(state, 0, 2, rng);
  auto [a2, s2] = bell_measure(s1, 1, 3, rng);
  std::optional<std::pair<int, int>> charlie;
  if (cooperate) {
    // Sample Charlie's outcomes from the post-correction state.
    PureState corrected = detail::apply_alice_correction(s2, a1, 4);
    corrected = detail::apply_alice_correction(corrected, a2, 5);
    const double pz1 = detail::project_qubit(corrected, 6, 1).first;
    const int z_bit = rng.uniform() < pz1 ? 1 : 0;
    PureState after_z = detail::project_qubit(corrected, 6, z_bit).second;
    const double px_minus =
        detail::project_qubit(apply_hadamard(after_z, 7), 7, 1).first;
    const int x_sign = rng.uniform() < px_minus ? -1 : +1;
    charlie = std::make_pair(z_bit, x_sign);
  }
  return teleport_branch(msg, a1, a2, charlie).second;
}

struct HaarAverageResult {
  double mean_fidelity;
  double standard_error;
  double control_power;  // 1 - mean_fidelity
  std::size_t samples;
};

// Haar-averaged no-cooperation fidelity (expected 2/5), with Alice's
// outcomes Born-sampled per draw.
inline HaarAverageResult average_fidelity(std::size_t samples,
                                          const RandomSource& rng,
                                          int threads = 1) {
  require(samples >= 10000, "average_fidelity: need at least 1e4 samples");
  struct Partial {
    double sum = 0.0, sumsq = 0.0;
  };
  auto chunk = [&](std::size_t lo, std::size_t hi) {
    Partial p;
    for (std::size_t k = lo; k < hi; ++k) {
      RandomSource r = rng.stream(k);
      const TwoQubitMessage msg = TwoQubitMessage::haar(r);
      const double f = run_teleport(msg, false, r).fidelity;
      p.sum += f;
      p.sumsq += f * f;
    }
    return p;
  };
  const auto partials = map_chunks<Partial>(samples, 2048, threads, chunk);
  Partial total;
  for (const auto& p : partials) {
    total.sum += p.sum;
    total.sumsq += p.sumsq;
  }
  const double n = static_cast<double>(samples);
  const double mean = total.sum / n;
  const double var = std::max(total.sumsq / n - mean * mean, 0.0);
  return {mean, std::sqrt(var / n), 1.0 - mean, samples};
}

}  // namespace flycat
