#pragma once

// Flying-cat parity-check channel: exact lossy evolution of the qubit-field
// state, its dephasing decomposition, homodyne inference (conditional and
// thresholded post-states, soft decisions), and error-budget optimization.

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "flycat/errors.hpp"
#include "flycat/field.hpp"
#include "flycat/parallel.hpp"
#include "flycat/qcore.hpp"
#include "flycat/quadrature.hpp"
#include "flycat/rng.hpp"

namespace flycat {

enum class CheckBasis { Z, X };

// One multi-qubit parity check: field amplitude, per-segment losses, basis.
// alpha = 0 is allowed (the pure-guessing limit, pM = 1/2).
struct ParityCheckConfig {
  double alpha;
  LossProfile losses;
  CheckBasis basis = CheckBasis::Z;

  ParityCheckConfig(double alpha_, LossProfile losses_,
                    CheckBasis basis_ = CheckBasis::Z)
      : alpha(alpha_), losses(std::move(losses_)), basis(basis_) {
    require(std::isfinite(alpha) && alpha >= 0.0,
            "ParityCheckConfig: alpha must be real and >= 0");
    require(losses.size() == 2 || losses.size() == 3,
            "ParityCheckConfig: check weight must be 2 or 3");
  }

  int weight() const { return losses.size(); }
};

namespace detail {
// Parity of the first k+1 qubits (qubits 0..k) of basis index s.
inline int prefix_parity(std::size_t s, int k, int n) {
  return std::popcount(s >> (n - 1 - k)) & 1;
}
// 0 for even sector, 1 for odd.
inline int sector_of(std::size_t s) { return std::popcount(s) & 1; }
}  // namespace detail

// Parity-block-resolved joint qubit-field state after a lossy check, prior
// to the homodyne measurement. block(a, b) with a, b in {0: even(+),
// 1: odd(-)} is the qubit operator multiplying |a*abar><b*abar| (sectors
// taken in the check basis).
class PreMeasurementState {
 public:
  PreMeasurementState(int n, CheckBasis basis, double abar,
                      std::array<std::array<Matrix, 2>, 2> blocks)
      : n_(n), basis_(basis), abar_(abar), blocks_(std::move(blocks)) {}

  int num_qubits() const { return n_; }
  CheckBasis basis() const { return basis_; }
  double abar() const { return abar_; }
  const Matrix& block(int a, int b) const { return blocks_.at(a).at(b); }

  // Weight of the sector (trace of a diagonal block); unchanged by loss.
  double parity_weight(int sector) const {
    return blocks_[sector][sector].trace().real();
  }

  // Invariants: unit total weight, block adjointness, sector support
  // (Z basis), within tol.
  void validate(double tol = kStateTol) const {
    require(std::abs(parity_weight(0) + parity_weight(1) - 1.0) < tol,
            "PreMeasurementState: weights do not sum to 1");
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        require((blocks_[a][b] - blocks_[b][a].adjoint())
                        .cwiseAbs()
                        .maxCoeff() < tol,
                "PreMeasurementState: blocks not mutually adjoint");
      }
    if (basis_ == CheckBasis::Z) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (std::size_t r = 0; r < dim_of(n_); ++r)
            for (std::size_t c = 0; c < dim_of(n_); ++c) {
              if (detail::sector_of(r) == a && detail::sector_of(c) == b)
                continue;
              require(std::abs(blocks_[a][b](r, c)) < tol,
                      "PreMeasurementState: support outside parity sector");
            }
    }
  }

 private:
  int n_;
  CheckBasis basis_;
  double abar_;
  std::array<std::array<Matrix, 2>, 2> blocks_;
};

// Exact channel: entry (s, s') acquires one factor exp(-2|alpha_k|^2) for
// every transit segment k on which the running parities of s and s' differ,
// and lands in the field block (sector(s), sector(s')). X-basis checks are
// the same channel conjugated by H^{\otimes n}.
inline PreMeasurementState run_check_exact(const DensityMatrix& rho_in,
                                           const ParityCheckConfig& cfg) {
  const int n = cfg.weight();
  require(rho_in.num_qubits() == n, "run_check_exact: weight mismatch");
  const bool xbasis = (cfg.basis == CheckBasis::X);
  const Matrix& h = hadamard_all_matrix(n);
  const Matrix work =
      xbasis ? Matrix(h * rho_in.entries() * h) : rho_in.entries();

  const PropagatedField prop = propagate_losses(cfg.alpha, cfg.losses);
  std::vector<double> dephase(n);
  for (int k = 0; k < n; ++k)
    dephase[k] = std::exp(-2.0 * std::norm(prop.leaked[k]));

  const auto d = static_cast<Eigen::Index>(dim_of(n));
  std::array<std::array<Matrix, 2>, 2> blocks;
  for (auto& row : blocks)
    for (auto& b : row) b = Matrix::Zero(d, d);

  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      double factor = 1.0;
      for (int k = 0; k < n; ++k)
        if (detail::prefix_parity(r, k, n) != detail::prefix_parity(c, k, n))
          factor *= dephase[k];
      blocks[detail::sector_of(r)][detail::sector_of(c)](r, c) =
          work(r, c) * factor;
    }

  if (xbasis)
    for (auto& row : blocks)
      for (auto& b : row) b = h * b * h;

  return PreMeasurementState(n, cfg.basis, prop.abar.real(),
                             std::move(blocks));
}

// One term of the loss-backaction channel: apply `error` with probability p.
struct DephasingTerm {
  double probability;
  PauliString error;
};

// The backaction decomposes into one dephasing channel per transit segment,
// p_k = (1 - exp(-2|alpha_k|^2))/2, with the error acting on every qubit
// *after* segment k (Z strings for Z-basis checks, X for X-basis). Loss
// after the last interaction causes no qubit error (identity term).
inline std::vector<DephasingTerm> dephasing_decomposition(
    const ParityCheckConfig& cfg) {
  const int n = cfg.weight();
  const PropagatedField prop = propagate_losses(cfg.alpha, cfg.losses);
  const PauliOp op =
      (cfg.basis == CheckBasis::Z) ? PauliOp::Z : PauliOp::X;
  std::vector<DephasingTerm> terms;
  terms.reserve(n);
  for (int k = 0; k < n; ++k) {
    std::vector<PauliOp> ops(n, PauliOp::I);
    for (int q = k + 1; q < n; ++q) ops[q] = op;
    terms.push_back({0.5 * (1.0 - std::exp(-2.0 * std::norm(prop.leaked[k]))),
                     PauliString(std::move(ops))});
  }
  return terms;
}

// State of the code qubits conditioned on homodyne outcome x, and the
// outcome density p(x).
inline std::pair<DensityMatrix, double> conditional_post_state(
    const PreMeasurementState& pre, double x) {
  const double g[2] = {homodyne_amplitude(x, pre.abar()),
                       homodyne_amplitude(x, -pre.abar())};
  const double px =
      pre.parity_weight(0) * g[0] * g[0] + pre.parity_weight(1) * g[1] * g[1];
  if (!(px >= 1e-300))
    throw numeric_error("conditional_post_state: x out of support");
  Matrix m = Matrix::Zero(pre.block(0, 0).rows(), pre.block(0, 0).cols());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m += pre.block(a, b) * (g[a] * g[b]);
  m /= px;
  return {DensityMatrix(pre.num_qubits(), std::move(m)), px};
}

// Thresholded (hard) inference: sign(x) is the parity estimate, with
// sign(0) = +. joint(i, t) is the probability of inferring parity i while
// the state has parity t (0: even, 1: odd).
struct ThresholdedInference {
  DensityMatrix rho_plus;
  double weight_plus;
  DensityMatrix rho_minus;
  double weight_minus;
  std::array<std::array<double, 2>, 2> joint;
  double p_measurement;  // joint(0,1) + joint(1,0) = erfc(sqrt(2) abar)/2
};

inline ThresholdedInference thresholded_inference(
    const PreMeasurementState& pre) {
  const double abar = pre.abar();
  const double span = std::sqrt(2.0) * abar + 10.0;
  // Kernel integrals K[a][b] = int g_a g_b dx over x > 0, by adaptive
  // Gauss-Kronrod (tolerance 1e-10); x < 0 follows by reflection symmetry.
  auto kernel = [&](int a, int b) {
    const double sa = a == 0 ? abar : -abar;
    const double sb = b == 0 ? abar : -abar;
    return integrate(
        [&](double x) {
          return homodyne_amplitude(x, sa) * homodyne_amplitude(x, sb);
        },
        0.0, span, 1e-10);
  };
  double plus_k[2][2], minus_k[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      plus_k[a][b] = kernel(a, b);
      minus_k[a][b] = 0.0;
    }
  // g_{-a}(-x) = g_a(x): integral over x<0 swaps both sector labels.
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) minus_k[a][b] = plus_k[1 - a][1 - b];

  const auto d = pre.block(0, 0).rows();
  Matrix raw_plus = Matrix::Zero(d, d), raw_minus = Matrix::Zero(d, d);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      raw_plus += pre.block(a, b) * plus_k[a][b];
      raw_minus += pre.block(a, b) * minus_k[a][b];
    }
  const double w_plus = raw_plus.trace().real();
  const double w_minus = raw_minus.trace().real();

  auto normalized = [&](const Matrix& raw, double w) {
    if (w > 1e-300) return DensityMatrix(pre.num_qubits(), raw / w);
    return DensityMatrix::maximally_mixed(pre.num_qubits());
  };

  ThresholdedInference out{normalized(raw_plus, w_plus), w_plus,
                           normalized(raw_minus, w_minus), w_minus,
                           {}, 0.0};
  out.joint[0][0] = pre.parity_weight(0) * plus_k[0][0];
  out.joint[0][1] = pre.parity_weight(1) * plus_k[1][1];
  out.joint[1][0] = pre.parity_weight(0) * minus_k[0][0];
  out.joint[1][1] = pre.parity_weight(1) * minus_k[1][1];
  out.p_measurement = out.joint[0][1] + out.joint[1][0];
  return out;
}

// Probabilities for one check: loss-induced qubit errors p1, p2, the
// measurement error pM, and their sum.
struct ErrorBudget {
  double p1 = 0.0;
  double p2 = 0.0;
  double pM = 0.0;
  double ptot = 0.0;
  // Large-alpha approximation of ptot as printed in its source:
  // exp(-2 a^2)/(2 a sqrt(2 pi)) + (1/2) sum_j eta_j a^2. Kept separate;
  // it carries a factor-2 mismatch on the loss term relative to the exact
  // p1 + p2 and drops O(p_i p_j) cross terms.
  double ptot_asymptotic = 0.0;
};

inline ErrorBudget error_budget(double alpha, const LossProfile& losses) {
  require(std::isfinite(alpha) && alpha >= 0.0,
          "error_budget: alpha must be >= 0");
  const int n = losses.size();
  require(n == 2 || n == 3, "error_budget: weight must be 2 or 3");
  const PropagatedField prop = propagate_losses(alpha, losses);
  ErrorBudget b;
  b.p1 = 0.5 * (1.0 - std::exp(-2.0 * std::norm(prop.leaked[0])));
  b.p2 = (n >= 3)
             ? 0.5 * (1.0 - std::exp(-2.0 * std::norm(prop.leaked[1])))
             : 0.0;
  b.pM = 0.5 * std::erfc(std::sqrt(2.0) * prop.abar.real());
  b.ptot = b.pM + b.p1 + b.p2;
  if (alpha > 0.0) {
    double loss_sum = 0.0;
    for (int k = 0; k + 1 < n; ++k) loss_sum += losses.eta(k);
    b.ptot_asymptotic =
        0.5 * std::exp(-2.0 * alpha * alpha) /
            (alpha * std::sqrt(2.0 * M_PI)) +
        0.5 * loss_sum * alpha * alpha;
  } else {
    b.ptot_asymptotic = std::numeric_limits<double>::infinity();
  }
  return b;
}

struct AlphaOptimum {
  double alpha_star;
  double ptot_star;
};

// Minimizes the exact ptot over alpha in [lo, hi] (Brent). The exact form is
// used, not the asymptote: optima can sit below alpha ~ 1 at high loss.
inline AlphaOptimum optimize_alpha(const LossProfile& losses, double lo = 0.05,
                                   double hi = 4.0) {
  require(!losses.all_zero(),
          "optimize_alpha: all losses zero, ptot decreases without bound");
  require(lo > 0.0 && hi > lo, "optimize_alpha: bad window");
  auto f = [&](double a) { return error_budget(a, losses).ptot; };
  const auto [x, fx] = boost::math::tools::brent_find_minima(
      f, lo, hi, std::numeric_limits<double>::digits - 6);
  const double margin = 1e-6 * (hi - lo);
  if (x < lo + margin || x > hi - margin)
    throw numeric_error("optimize_alpha: minimizer not interior");
  return {x, fx};
}

enum class DecisionMode { Soft, Hard };

struct RepeatedDecisionResult {
  double error_probability;
  double standard_error;
};

// Monte Carlo error probability for N repeated measurements of a fixed
// (even) parity, each with amplitude alpha0 attenuated by `losses`. Soft
// mode correlates the outcomes through the Gaussian likelihood product
// (equivalent to deciding on the sign of sum x_k); hard mode thresholds
// each outcome and takes a majority vote.
inline RepeatedDecisionResult repeated_decision(
    int n_meas, double alpha0, const LossProfile& losses, DecisionMode mode,
    std::size_t trials, const RandomSource& rng, int threads = 1) {
  require(n_meas >= 1, "repeated_decision: N must be >= 1");
  require(mode == DecisionMode::Soft || n_meas % 2 == 1,
          "repeated_decision: N must be odd for hard (majority) mode");
  require(trials >= 1, "repeated_decision: trials must be >= 1");
  const double abar = propagate_losses(alpha0, losses).abar.real();
  const double mean = std::sqrt(2.0) * abar;
  const double sigma = 1.0 / std::sqrt(2.0);

  auto chunk_errors = [&](std::size_t lo, std::size_t hi) {
    std::size_t errors = 0;
    for (std::size_t t = lo; t < hi; ++t) {
      RandomSource r = rng.stream(t);
      if (mode == DecisionMode::Soft) {
        double sum = 0.0;
        for (int k = 0; k < n_meas; ++k) sum += mean + sigma * r.normal();
        if (sum < 0.0) ++errors;  // sign(0) counts as +
      } else {
        int wrong_votes = 0;
        for (int k = 0; k < n_meas; ++k)
          if (mean + sigma * r.normal() < 0.0) ++wrong_votes;
        if (2 * wrong_votes > n_meas) ++errors;
      }
    }
    return errors;
  };
  const auto partials =
      map_chunks<std::size_t>(trials, 8192, threads, chunk_errors);
  std::size_t errors = 0;
  for (auto e : partials) errors += e;
  const double p = static_cast<double>(errors) / static_cast<double>(trials);
  return {p, std::sqrt(std::max(p * (1.0 - p), 1e-300) /
                       static_cast<double>(trials))};
}

// Reduces a tail hook error modulo the weight-3 gauge operator (Z1Z2Z3 or
// X1X2X3) whenever that lowers the weight: Z2Z3 -> Z1, X2X3 -> X1, Z3 stays.
inline PauliString hook_gauge_reduce(const PauliString& error) {
  require(error.size() == 3, "hook_gauge_reduce: weight-3 register expected");
  PauliOp kind = PauliOp::I;
  for (int q = 0; q < 3; ++q) {
    const PauliOp o = error.op(q);
    if (o == PauliOp::I) continue;
    require(o != PauliOp::Y, "hook_gauge_reduce: tail error must be X or Z");
    require(kind == PauliOp::I || kind == o,
            "hook_gauge_reduce: mixed-type string is not a tail hook error");
    kind = o;
  }
  if (kind == PauliOp::I) return error;
  const PauliString gauge(std::vector<PauliOp>(3, kind));
  const PauliString reduced = PauliString::multiply_up_to_phase(error, gauge);
  return reduced.weight() < error.weight() ? reduced : error;
}

}  // namespace flycat
