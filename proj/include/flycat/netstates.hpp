#pragma once

// Protocol layer built on flying-cat checks: GHZ preparation, tetrahedron
// state preparation and syndrome decoding, and witness estimation.
//
// Tetrahedron code data (qubits 0-based; the six register qubits sit on the
// edges of a tetrahedron, stabilizers on faces (Z) and vertices (X)):
//   S1 = Z0 Z2 Z4   S2 = Z0 Z3 Z5   S3 = Z1 Z3 Z4
//   S4 = X0 X2 X5   S5 = X0 X3 X4   S6 = X1 X2 X4

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "flycat/montecarlo.hpp"
#include "flycat/paritycheck.hpp"
#include "flycat/qcore.hpp"

namespace flycat {

inline constexpr std::array<std::array<int, 3>, 3> kTetraZTriples = {
    {{0, 2, 4}, {0, 3, 5}, {1, 3, 4}}};
inline constexpr std::array<std::array<int, 3>, 3> kTetraXTriples = {
    {{0, 2, 5}, {0, 3, 4}, {1, 2, 4}}};

// Row j-1: syndrome identifying a single-qubit error on qubit j-1.
// Columns 0..2 hold (sigma_1..sigma_3), the Z-stabilizer syndrome of an X
// error; columns 3..5 hold (sigma_4..sigma_6), the X-stabilizer syndrome of
// a Z error (the dual table, validated by anticommutation in the tests).
using TetraSyndromeTable = std::array<std::array<int, 6>, 6>;
inline constexpr TetraSyndromeTable kTetraSyndromeTable = {{
    {-1, -1, +1, -1, -1, +1},
    {+1, +1, -1, +1, +1, -1},
    {-1, +1, +1, -1, +1, -1},
    {+1, -1, -1, +1, -1, +1},
    {-1, +1, -1, +1, -1, -1},
    {+1, -1, +1, -1, +1, +1},
}};

// Six signed stabilizer outcomes, sigma[i] = outcome of S_{i+1}.
struct TetraSyndrome {
  std::array<int, 6> sigma{+1, +1, +1, +1, +1, +1};
};

namespace detail {

// Pauli-support masks with bit q <-> qubit q (independent of amplitude
// index order).
inline constexpr std::array<std::uint8_t, 3> kZStabMask = {
    0b010101, 0b101001, 0b011010};
inline constexpr std::array<std::uint8_t, 3> kXStabMask = {
    0b100101, 0b011001, 0b010110};

// 3-bit syndrome (bit i set <=> sigma_{i+1} = -1) of an X-error support
// mask against the Z stabilizers, or of a Z-error mask against X.
inline int syndrome_bits(std::uint8_t error_mask,
                         const std::array<std::uint8_t, 3>& stabs) {
  int s = 0;
  for (int i = 0; i < 3; ++i)
    if (std::popcount(static_cast<unsigned>(error_mask & stabs[i])) & 1)
      s |= 1 << i;
  return s;
}

// Correction support mask for each 3-bit syndrome, derived from the
// syndrome table (so a corrupted table corrupts the decoder, which the
// selfcheck canary relies on). half = 0: X corrections from columns 0..2,
// half = 1: Z corrections from columns 3..5.
inline std::array<std::uint8_t, 8> correction_masks(
    const TetraSyndromeTable& table, int half) {
  std::array<std::uint8_t, 8> corr{};
  corr[0] = 0;
  corr[7] = 0b000011;  // all -1: pair (qubits 0, 1), fixed for determinism
  for (int j = 0; j < 6; ++j) {
    int bits = 0;
    for (int i = 0; i < 3; ++i)
      if (table[j][3 * half + i] < 0) bits |= 1 << i;
    corr[bits] = static_cast<std::uint8_t>(1u << j);
  }
  return corr;
}

// Membership table of the 8-element group generated by the given supports.
inline std::array<bool, 64> span_membership(
    const std::array<std::uint8_t, 3>& gens) {
  std::array<bool, 64> in{};
  std::vector<std::uint8_t> elems = {0};
  for (auto g : gens) {
    const auto copy = elems;
    for (auto e : copy) elems.push_back(e ^ g);
  }
  for (auto e : elems) in[e] = true;
  return in;
}

// Qubit-support mask -> amplitude-index bit mask (qubit 0 is the MSB).
inline std::size_t index_mask(std::uint8_t qubit_mask, int n) {
  std::size_t m = 0;
  for (int q = 0; q < n; ++q)
    if (qubit_mask & (1u << q)) m |= std::size_t{1} << (n - 1 - q);
  return m;
}

inline PauliString mask_to_pauli(std::uint8_t x_mask, std::uint8_t z_mask,
                                 int n) {
  std::vector<PauliOp> ops(n, PauliOp::I);
  for (int q = 0; q < n; ++q) {
    const bool x = x_mask & (1u << q), z = z_mask & (1u << q);
    ops[q] = x && z ? PauliOp::Y : x ? PauliOp::X : z ? PauliOp::Z
                                                      : PauliOp::I;
  }
  return PauliString(std::move(ops));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// GHZ preparation (weight-2 checks on qubits (0,1) and (1,2))

struct GhzErrorModel {
  double p12, p23;  // loss-induced Z error on the second qubit of each pair
  double q12, q23;  // measurement (inference) error per check
  double p_paper;   // composite error probability, as printed
};

inline GhzErrorModel ghz_error_model(double alpha, double eta12,
                                     double eta23) {
  require(alpha >= 0.0 && eta12 >= 0.0 && eta12 < 1.0 && eta23 >= 0.0 &&
              eta23 < 1.0,
          "ghz_error_model: bad parameters");
  GhzErrorModel m{};
  m.p12 = 0.5 * (1.0 - std::exp(-2.0 * eta12 * alpha * alpha));
  m.p23 = 0.5 * (1.0 - std::exp(-2.0 * eta23 * alpha * alpha));
  m.q12 = 0.5 * std::erfc(std::sqrt(2.0) * (1.0 - eta12) * alpha);
  m.q23 = 0.5 * std::erfc(std::sqrt(2.0) * (1.0 - eta23) * alpha);
  // Composite kept verbatim (note the + on the q12*q23 term); branch
  // enumeration gives 1 - (1-q12)(1-q23)[(1-p12)(1-p23) + p12*p23], which
  // differs at second order.
  m.p_paper = m.p12 + m.p23 - m.p12 * m.p23 + m.q12 + m.q23 + m.q12 * m.q23;
  return m;
}

namespace detail {

inline std::pair<double, PureState> project_pauli_eigenspace(
    const PureState& psi, const PauliString& s, int outcome) {
  const PureState sp = apply_pauli(psi, s);
  Vector v = 0.5 * (psi.amplitudes() +
                    static_cast<double>(outcome) * sp.amplitudes());
  const double w = v.squaredNorm();
  if (w <= 1e-300) return {0.0, psi};
  v /= std::sqrt(w);
  return {w, PureState(psi.num_qubits(), std::move(v))};
}

// X correction for GHZ syndrome (m1, m2): -+ -> X0, +- -> X2, -- -> X1.
inline PauliString ghz_correction(int m1, int m2) {
  if (m1 > 0 && m2 > 0) return PauliString::identity(3);
  if (m1 < 0 && m2 > 0) return PauliString::single(3, 0, PauliOp::X);
  if (m1 > 0 && m2 < 0) return PauliString::single(3, 2, PauliOp::X);
  return PauliString::single(3, 1, PauliOp::X);
}

}  // namespace detail

inline PureState ghz_target() {
  Vector v = Vector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return PureState(3, std::move(v));
}

struct GhzExactResult {
  DensityMatrix state;
  double fidelity;
  GhzErrorModel model;
};

// Averages every (outcome, Z-error, inference-flip) branch of the two
// weight-2 checks into the exact mixed state.
inline GhzExactResult prepare_ghz_exact(double alpha, double eta12,
                                        double eta23) {
  const GhzErrorModel model = ghz_error_model(alpha, eta12, eta23);
  const PauliString z1z2 = PauliString::from_label("ZZI");
  const PauliString z2z3 = PauliString::from_label("IZZ");
  const PureState start = PureState::plus_state(3);
  Matrix rho = Matrix::Zero(8, 8);

  for (int m1 : {+1, -1}) {
    const auto [w1, s1] = detail::project_pauli_eigenspace(start, z1z2, m1);
    if (w1 <= 0.0) continue;
    for (int e1 : {0, 1}) {
      const double we1 = e1 ? model.p12 : 1.0 - model.p12;
      const PureState t1 =
          e1 ? apply_pauli(s1, PauliString::single(3, 1, PauliOp::Z)) : s1;
      for (int f1 : {0, 1}) {
        const double wf1 = f1 ? model.q12 : 1.0 - model.q12;
        const int m1_inferred = f1 ? -m1 : m1;
        for (int m2 : {+1, -1}) {
          const auto [w2, s2] =
              detail::project_pauli_eigenspace(t1, z2z3, m2);
          if (w2 <= 0.0) continue;
          for (int e2 : {0, 1}) {
            const double we2 = e2 ? model.p23 : 1.0 - model.p23;
            const PureState t2 =
                e2 ? apply_pauli(s2, PauliString::single(3, 2, PauliOp::Z))
                   : s2;
            for (int f2 : {0, 1}) {
              const double wf2 = f2 ? model.q23 : 1.0 - model.q23;
              const int m2_inferred = f2 ? -m2 : m2;
              const PureState fin = apply_pauli(
                  t2, detail::ghz_correction(m1_inferred, m2_inferred));
              const double w = w1 * we1 * wf1 * w2 * we2 * wf2;
              rho += w * fin.amplitudes() * fin.amplitudes().adjoint();
            }
          }
        }
      }
    }
  }
  DensityMatrix dm(3, std::move(rho));
  const double f = fidelity(dm, ghz_target());
  return {std::move(dm), f, model};
}

struct GhzSampleResult {
  PureState state;
  std::array<int, 2> inferred_outcomes;
  GhzErrorModel model;
};

inline GhzSampleResult prepare_ghz_sampled(double alpha, double eta12,
                                           double eta23, RandomSource& rng) {
  const GhzErrorModel model = ghz_error_model(alpha, eta12, eta23);
  PureState state = PureState::plus_state(3);
  std::array<int, 2> inferred{};
  const std::array<PauliString, 2> checks = {PauliString::from_label("ZZI"),
                                             PauliString::from_label("IZZ")};
  for (int c = 0; c < 2; ++c) {
    const auto [w_plus, plus_state] =
        detail::project_pauli_eigenspace(state, checks[c], +1);
    const int m = rng.uniform() < w_plus ? +1 : -1;
    state = m > 0 ? plus_state
                  : detail::project_pauli_eigenspace(state, checks[c], -1)
                        .second;
    const double p_err = c == 0 ? model.p12 : model.p23;
    const double q_err = c == 0 ? model.q12 : model.q23;
    if (rng.bernoulli(p_err))
      state = apply_pauli(state,
                          PauliString::single(3, c == 0 ? 1 : 2, PauliOp::Z));
    inferred[c] = rng.bernoulli(q_err) ? -m : m;
  }
  state = apply_pauli(state, detail::ghz_correction(inferred[0], inferred[1]));
  return {std::move(state), inferred, model};
}

// ---------------------------------------------------------------------------
// Tetrahedron state

// |T> = (1/2) sum_beta |beta>_{01} |beta>_{23} |beta>_{45} over the four
// Bell states; the unique joint +1 eigenstate of S1..S6.
inline const PureState& tetra_target() {
  static const PureState t = [] {
    Vector v = Vector::Zero(64);
    for (int b = 0; b < 4; ++b) {
      const auto pair = detail::bell_basis_coeffs(static_cast<BellLabel>(b));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            v((i << 4) | (j << 2) | k) +=
                0.5 * pair[i] * pair[j] * pair[k];
    }
    return PureState(6, std::move(v));
  }();
  return t;
}

inline PauliString tetra_stabilizer(int i) {
  require(i >= 1 && i <= 6, "tetra_stabilizer: index in 1..6");
  if (i <= 3)
    return PauliString::on_qubits(
        6, std::span<const int>(kTetraZTriples[i - 1]), PauliOp::Z);
  return PauliString::on_qubits(
      6, std::span<const int>(kTetraXTriples[i - 4]), PauliOp::X);
}

// Correction for the given error kind from the relevant syndrome half:
// all +1 -> identity; a table row -> that single qubit; all -1 -> the
// (0, 1) pair. kind X consumes sigma_1..3, kind Z consumes sigma_4..6.
inline PauliString tetra_decode_with_table(const TetraSyndrome& syndrome,
                                           PauliOp kind,
                                           const TetraSyndromeTable& table) {
  require(kind == PauliOp::X || kind == PauliOp::Z,
          "tetra_decode: kind must be X or Z");
  const int half = kind == PauliOp::X ? 0 : 1;
  int bits = 0;
  for (int i = 0; i < 3; ++i) {
    const int s = syndrome.sigma[3 * half + i];
    require(s == +1 || s == -1, "tetra_decode: syndrome entries must be +-1");
    if (s < 0) bits |= 1 << i;
  }
  const auto corr = detail::correction_masks(table, half);
  // All 8 syndrome patterns are covered: 6 table rows + trivial + all -1.
  std::vector<int> qubits;
  for (int q = 0; q < 6; ++q)
    if (corr[bits] & (1u << q)) qubits.push_back(q);
  return PauliString::on_qubits(6, qubits, kind);
}

inline PauliString tetra_decode(const TetraSyndrome& syndrome, PauliOp kind) {
  return tetra_decode_with_table(syndrome, kind, kTetraSyndromeTable);
}

// Six check configs over uniform per-segment loss: first the three X-basis
// checks (S4..S6), then the three Z-basis checks (S1..S3).
inline std::array<ParityCheckConfig, 6> tetra_uniform_configs(double alpha,
                                                              double eta) {
  const LossProfile seg = LossProfile::uniform(3, eta);
  return {ParityCheckConfig(alpha, seg, CheckBasis::X),
          ParityCheckConfig(alpha, seg, CheckBasis::X),
          ParityCheckConfig(alpha, seg, CheckBasis::X),
          ParityCheckConfig(alpha, seg, CheckBasis::Z),
          ParityCheckConfig(alpha, seg, CheckBasis::Z),
          ParityCheckConfig(alpha, seg, CheckBasis::Z)};
}

namespace detail {
inline void validate_tetra_configs(
    const std::array<ParityCheckConfig, 6>& cfgs) {
  for (int i = 0; i < 6; ++i) {
    require(cfgs[i].weight() == 3, "tetra_prepare: checks must be weight 3");
    require(cfgs[i].basis == (i < 3 ? CheckBasis::X : CheckBasis::Z),
            "tetra_prepare: need three X-basis then three Z-basis configs");
  }
}

// Tail-error options of one check on stabilizer triple t: (weight, support
// mask over qubits). E1 hits t[1], t[2]; E2 hits t[2].
inline std::array<std::pair<double, std::uint8_t>, 4> tail_error_options(
    const std::array<int, 3>& t, double p1, double p2) {
  const std::uint8_t b1 = static_cast<std::uint8_t>(1u << t[1]);
  const std::uint8_t b2 = static_cast<std::uint8_t>(1u << t[2]);
  return {{{(1.0 - p1) * (1.0 - p2), 0},
           {p1 * (1.0 - p2), static_cast<std::uint8_t>(b1 | b2)},
           {(1.0 - p1) * p2, b2},
           {p1 * p2, b1}}};
}

// Distribution over the XOR of one tail-error mask per check in `triples`.
inline std::array<double, 64> convolve_tail_errors(
    const std::array<std::array<int, 3>, 3>& triples,
    const std::array<const ErrorBudget*, 3>& budgets) {
  std::array<double, 64> dist{};
  dist[0] = 1.0;
  for (int c = 0; c < 3; ++c) {
    std::array<double, 64> next{};
    for (const auto& [w, mask] :
         tail_error_options(triples[c], budgets[c]->p1, budgets[c]->p2)) {
      if (w <= 0.0) continue;
      for (int m = 0; m < 64; ++m)
        if (dist[m] > 0.0) next[m ^ mask] += dist[m] * w;
    }
    dist = next;
  }
  return dist;
}
}  // namespace detail

struct TetraExactResult {
  DensityMatrix state;
  double fidelity;
  std::array<ErrorBudget, 6> budgets;  // per check, in cfg order
};

// Exact branch average of the preparation pipeline from |+>^6: measure
// S4..S6 (X basis) then S1..S3 (Z basis) as flying-cat checks with
// Bernoulli tail errors and inference flips, then decode and correct.
//
// Every branch lands on (X_x Z_z)|T> for some supports (x, z), and the
// X-type bookkeeping (X-round tail errors, Z-round outcomes and flips, X
// corrections) is independent of the Z-type bookkeeping, so the branch sum
// factorizes into two 64-entry weight tables. Cross-checked against a dense
// branch-enumeration oracle and the sampled mode in the tests.
inline TetraExactResult tetra_prepare_exact(
    const std::array<ParityCheckConfig, 6>& cfgs) {
  detail::validate_tetra_configs(cfgs);
  std::array<ErrorBudget, 6> budgets;
  for (int i = 0; i < 6; ++i)
    budgets[i] = error_budget(cfgs[i].alpha, cfgs[i].losses);

  const auto cx_corr =
      detail::correction_masks(kTetraSyndromeTable, /*half=*/0);
  const auto cz_corr =
      detail::correction_masks(kTetraSyndromeTable, /*half=*/1);

  // X-part: X-round tail errors xi, uniform Z-round outcomes, Z-round
  // inference flips, and the two X corrections (observed and ideal).
  const auto xi_dist = detail::convolve_tail_errors(
      kTetraXTriples, {&budgets[0], &budgets[1], &budgets[2]});
  std::array<double, 64> weight_x{};
  for (int xi = 0; xi < 64; ++xi) {
    if (xi_dist[xi] <= 0.0) continue;
    const int s_xi = detail::syndrome_bits(static_cast<std::uint8_t>(xi),
                                           detail::kZStabMask);
    for (int outcome = 0; outcome < 8; ++outcome) {
      const int tau = outcome ^ s_xi;
      for (int flips = 0; flips < 8; ++flips) {
        double wf = 1.0;
        for (int i = 0; i < 3; ++i)
          wf *= (flips >> i & 1) ? budgets[3 + i].pM
                                 : 1.0 - budgets[3 + i].pM;
        if (wf <= 0.0) continue;
        const int observed = outcome ^ flips;
        weight_x[cx_corr[observed] ^ xi ^ cx_corr[tau]] +=
            xi_dist[xi] * 0.125 * wf;
      }
    }
  }

  // Z-part: Z-round tail errors zeta and X-round inference flips (the true
  // X-round syndrome is identically +1 from |+>^6).
  const auto zeta_dist = detail::convolve_tail_errors(
      kTetraZTriples, {&budgets[3], &budgets[4], &budgets[5]});
  std::array<double, 64> weight_z{};
  for (int zeta = 0; zeta < 64; ++zeta) {
    if (zeta_dist[zeta] <= 0.0) continue;
    for (int flips = 0; flips < 8; ++flips) {
      double wf = 1.0;
      for (int i = 0; i < 3; ++i)
        wf *= (flips >> i & 1) ? budgets[i].pM : 1.0 - budgets[i].pM;
      if (wf <= 0.0) continue;
      weight_z[cz_corr[flips] ^ zeta] += zeta_dist[zeta] * wf;
    }
  }

  // Assemble rho = sum_{x,z} Wx(x) Wz(z) (X_x Z_z)|T><T|(X_x Z_z)^dag and
  // F = (sum over trivial-syndrome x) * (sum over trivial-syndrome z).
  const PureState& target = tetra_target();
  const auto ker_x = detail::span_membership(detail::kXStabMask);
  const auto ker_z = detail::span_membership(detail::kZStabMask);
  Matrix rho = Matrix::Zero(64, 64);
  double fx = 0.0, fz = 0.0;
  for (int x = 0; x < 64; ++x)
    if (ker_x[x]) fx += weight_x[x];
  for (int z = 0; z < 64; ++z)
    if (ker_z[z]) fz += weight_z[z];
  for (int x = 0; x < 64; ++x) {
    if (weight_x[x] <= 1e-300) continue;
    const std::size_t flip =
        detail::index_mask(static_cast<std::uint8_t>(x), 6);
    for (int z = 0; z < 64; ++z) {
      const double w = weight_x[x] * weight_z[z];
      if (w <= 1e-300) continue;
      const std::size_t zmask =
          detail::index_mask(static_cast<std::uint8_t>(z), 6);
      Vector v(64);
      for (std::size_t s = 0; s < 64; ++s) {
        const double sign = (std::popcount(s & zmask) & 1) ? -1.0 : 1.0;
        v(static_cast<Eigen::Index>(s ^ flip)) = sign * target.amplitude(s);
      }
      rho += w * v * v.adjoint();
    }
  }
  return {DensityMatrix(6, std::move(rho)), fx * fz, budgets};
}

struct TetraSampleResult {
  PureState state;
  TetraSyndrome inferred;  // sigma_1..sigma_6 as decoded from
  TetraSyndrome actual;    // the true projection outcomes
};

// One dense stochastic run of the preparation pipeline.
inline TetraSampleResult tetra_prepare_sampled(
    const std::array<ParityCheckConfig, 6>& cfgs, RandomSource& rng) {
  detail::validate_tetra_configs(cfgs);
  PureState state = PureState::plus_state(6);
  TetraSyndrome inferred, actual;
  // Check order: S4, S5, S6 (cfgs 0..2), then S1, S2, S3 (cfgs 3..5).
  for (int c = 0; c < 6; ++c) {
    const int stab_index = c < 3 ? 4 + c : c - 2;  // 1-based S index
    const PauliString stab = tetra_stabilizer(stab_index);
    const ErrorBudget budget = error_budget(cfgs[c].alpha, cfgs[c].losses);
    const auto [w_plus, plus_state] =
        detail::project_pauli_eigenspace(state, stab, +1);
    const int outcome = rng.uniform() < w_plus ? +1 : -1;
    state = outcome > 0
                ? plus_state
                : detail::project_pauli_eigenspace(state, stab, -1).second;
    const auto& triple = c < 3 ? kTetraXTriples[c] : kTetraZTriples[c - 3];
    const PauliOp kind = c < 3 ? PauliOp::X : PauliOp::Z;
    if (rng.bernoulli(budget.p1)) {
      const std::array<int, 2> tail = {triple[1], triple[2]};
      state = apply_pauli(state, PauliString::on_qubits(6, tail, kind));
    }
    if (rng.bernoulli(budget.p2))
      state = apply_pauli(state, PauliString::single(6, triple[2], kind));
    const int seen = rng.bernoulli(budget.pM) ? -outcome : outcome;
    actual.sigma[stab_index - 1] = outcome;
    inferred.sigma[stab_index - 1] = seen;
  }
  state = apply_pauli(state, tetra_decode(inferred, PauliOp::Z));
  state = apply_pauli(state, tetra_decode(inferred, PauliOp::X));
  return {std::move(state), inferred, actual};
}

// ---------------------------------------------------------------------------
// Entanglement witness

struct WitnessEstimate {
  double value;           // <W>
  double fidelity;        // 1/2 - <W>; exact for mixtures of Pauli.|T> up
                          // to second order, a lower bound in general
  double standard_error;  // 0 for the exact evaluation
};

namespace detail {
inline const Matrix& tetra_projector(bool z_half) {
  static const std::array<Matrix, 2> proj = [] {
    std::array<Matrix, 2> out;
    for (int half = 0; half < 2; ++half) {
      Matrix p = Matrix::Identity(64, 64);
      for (int i = 0; i < 3; ++i) {
        const PauliString s = tetra_stabilizer(half == 0 ? i + 1 : i + 4);
        p = p * 0.5 * (Matrix::Identity(64, 64) + s.to_matrix());
      }
      out[half] = p;
    }
    return out;
  }();
  return proj[z_half ? 0 : 1];
}
}  // namespace detail

// <W> = 3/2 - <prod_{i=1..3}(1+S_i)/2> - <prod_{i=4..6}(1+S_i)/2>.
inline WitnessEstimate witness_expectation(const DensityMatrix& rho) {
  require(rho.num_qubits() == 6, "witness_expectation: 6-qubit state");
  const double pz =
      (detail::tetra_projector(true) * rho.entries()).trace().real();
  const double px =
      (detail::tetra_projector(false) * rho.entries()).trace().real();
  const double w = 1.5 - pz - px;
  return {w, 0.5 - w, 0.0};
}

// Two-setting estimate: both projector terms are diagonal in their own
// all-Z / all-X product setting, so single-qubit measurement samples
// suffice.
inline WitnessEstimate witness_sampled(const DensityMatrix& rho,
                                       std::size_t shots_per_setting,
                                       RandomSource& rng) {
  require(rho.num_qubits() == 6, "witness_sampled: 6-qubit state");
  require(shots_per_setting >= 2, "witness_sampled: need >= 2 shots");
  auto setting_mean = [&](bool z_setting) {
    const Matrix frame =
        z_setting ? rho.entries()
                  : Matrix(hadamard_all_matrix(6) * rho.entries() *
                           hadamard_all_matrix(6));
    std::array<double, 64> cum{};
    double total = 0.0;
    for (int s = 0; s < 64; ++s) {
      total += std::max(frame(s, s).real(), 0.0);
      cum[s] = total;
    }
    const auto& stabs =
        z_setting ? detail::kZStabMask : detail::kXStabMask;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < shots_per_setting; ++k) {
      const double u = rng.uniform() * total;
      int s = 0;
      while (s < 63 && cum[s] <= u) ++s;
      // Qubit q of index s is bit (5 - q); syndrome masks use bit q.
      std::uint8_t qmask = 0;
      for (int q = 0; q < 6; ++q)
        if (s >> (5 - q) & 1) qmask |= 1u << q;
      if (detail::syndrome_bits(qmask, stabs) == 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(shots_per_setting);
  };
  const double mz = setting_mean(true);
  const double mx = setting_mean(false);
  const double n = static_cast<double>(shots_per_setting);
  const double var = mz * (1.0 - mz) / n + mx * (1.0 - mx) / n;
  const double w = 1.5 - mz - mx;
  return {w, 0.5 - w, std::sqrt(var)};
}

// Leading-order model of the prepared-state witness: at least one inference
// error across the six checks, plus uncorrected loss errors from the last
// (Z-basis) round.
inline double witness_noisy_model(double pM, double p1, double p2) {
  require(pM >= 0 && pM <= 1 && p1 >= 0 && p1 <= 1 && p2 >= 0 && p2 <= 1,
          "witness_noisy_model: probabilities in [0,1]");
  return -0.5 + (1.0 - std::pow(1.0 - pM, 6)) + 3.0 * (p1 + p2);
}

// Exhaustive decoder check used by the selfcheck suite: every combination
// of X and Z error patterns must decode back to |T> (4096 cases).
inline bool tetra_decoder_exhaustive(const TetraSyndromeTable& table,
                                     double tol = 1e-9) {
  const PureState& target = tetra_target();
  for (int x = 0; x < 64; ++x)
    for (int z = 0; z < 64; ++z) {
      PureState err = apply_pauli(
          target, detail::mask_to_pauli(static_cast<std::uint8_t>(x),
                                        static_cast<std::uint8_t>(z), 6));
      TetraSyndrome syn;
      for (int i = 0; i < 6; ++i) {
        const double e =
            expectation(err, tetra_stabilizer(i + 1)).real();
        syn.sigma[i] = e >= 0.0 ? +1 : -1;
      }
      err = apply_pauli(err, tetra_decode_with_table(syn, PauliOp::X, table));
      err = apply_pauli(err, tetra_decode_with_table(syn, PauliOp::Z, table));
      if (fidelity(err, target) < 1.0 - tol) return false;
    }
  return true;
}

}  // namespace flycat
