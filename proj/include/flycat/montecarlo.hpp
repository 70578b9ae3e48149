#pragma once

// Trajectory sampler: realizes each flying-cat check as stochastic Pauli
// errors (drawn from the dephasing decomposition) plus a sampled homodyne
// outcome, and a cross-validation harness against the exact channel.
//
// Trajectories are projective: the exponentially suppressed coherences
// between opposite-parity sectors (~e^{-2 abar^2} in the exact post-
// measurement state) are dropped. Same-sector entries, joint tables, and
// all fidelities are reproduced exactly up to sampling noise; the dropped
// cross-sector part is reported separately by mc_vs_exact, not asserted.

#include <array>
#include <cstdint>
#include <vector>

#include "flycat/parallel.hpp"
#include "flycat/paritycheck.hpp"
#include "flycat/qcore.hpp"

namespace flycat {

struct TrajectoryConfig {
  std::uint64_t seed = 0;
  std::size_t shots = 1;
  std::vector<ParityCheckConfig> checks;
};

struct TrajectoryRecord {
  std::vector<PauliString> applied_errors;  // one (possibly id) per check
  std::vector<double> homodyne_samples;
  std::vector<int> inferred_parities;  // +1 / -1
  std::vector<int> true_parities;      // sampled projection outcomes
  PureState final_state;
};

namespace detail {

// Projects psi onto the parity sector (in `basis`); sector 0 = even.
inline std::pair<double, PureState> project_parity(const PureState& psi,
                                                   CheckBasis basis,
                                                   int sector) {
  const PureState work =
      basis == CheckBasis::X ? apply_hadamard_all(psi) : psi;
  Vector v = work.amplitudes();
  double weight = 0.0;
  for (std::size_t s = 0; s < work.dim(); ++s) {
    if (sector_of(s) == sector)
      weight += std::norm(v(static_cast<Eigen::Index>(s)));
    else
      v(static_cast<Eigen::Index>(s)) = 0.0;
  }
  if (weight <= 0.0) return {0.0, psi};
  v /= std::sqrt(weight);
  PureState out(psi.num_qubits(), std::move(v));
  if (basis == CheckBasis::X) out = apply_hadamard_all(out);
  return {weight, std::move(out)};
}

}  // namespace detail

struct SampledCheckStep {
  PauliString applied_error;
  double homodyne_sample;
  int inferred_parity;
  int true_parity;
};

// One stochastic realization of a check: Born-samples the parity projection,
// draws each dephasing term Bernoulli-independently, then samples x from the
// Gaussian centered at (parity) * sqrt(2) * abar. abar keeps all loss
// factors, including the segment after the last qubit.
inline std::pair<SampledCheckStep, PureState> sample_check(
    const PureState& psi, const ParityCheckConfig& cfg, RandomSource& rng) {
  require(psi.num_qubits() == cfg.weight(), "sample_check: weight mismatch");
  const double w_even = detail::project_parity(psi, cfg.basis, 0).first;
  const int sector = rng.uniform() < w_even ? 0 : 1;
  PureState state = detail::project_parity(psi, cfg.basis, sector).second;

  PauliString applied = PauliString::identity(cfg.weight());
  for (const DephasingTerm& term : dephasing_decomposition(cfg)) {
    if (rng.bernoulli(term.probability) && !term.error.is_identity()) {
      state = apply_pauli(state, term.error);
      applied = PauliString::multiply_up_to_phase(applied, term.error);
    }
  }

  const double abar = propagate_losses(cfg.alpha, cfg.losses).abar.real();
  const double x = (sector == 0 ? 1.0 : -1.0) * std::sqrt(2.0) * abar +
                   rng.normal() / std::sqrt(2.0);
  SampledCheckStep step{std::move(applied), x, x >= 0.0 ? +1 : -1,
                        sector == 0 ? +1 : -1};
  return {std::move(step), std::move(state)};
}

// Runs the configured checks on `initial` with the substream for `shot` of
// cfg.seed. Fixed (seed, shot) gives a bit-identical record.
inline TrajectoryRecord run_trajectory(const PureState& initial,
                                       const TrajectoryConfig& cfg,
                                       std::size_t shot) {
  RandomSource rng = RandomSource(cfg.seed).stream(shot);
  TrajectoryRecord rec{{}, {}, {}, {}, initial};
  for (const auto& check : cfg.checks) {
    auto [step, next] = sample_check(rec.final_state, check, rng);
    rec.applied_errors.push_back(std::move(step.applied_error));
    rec.homodyne_samples.push_back(step.homodyne_sample);
    rec.inferred_parities.push_back(step.inferred_parity);
    rec.true_parities.push_back(step.true_parity);
    rec.final_state = std::move(next);
  }
  return rec;
}

// Comparison of sampled statistics against the exact engine.
struct McComparisonReport {
  std::size_t shots = 0;
  // Post-selected density matrices by inferred parity, empirical vs exact.
  std::array<Matrix, 2> empirical;  // [0] inferred +, [1] inferred -
  std::array<Matrix, 2> exact;
  std::array<double, 2> empirical_weight{};
  std::array<double, 2> exact_weight{};
  // Joint (inference, truth) table, empirical vs quadrature-exact.
  std::array<std::array<double, 2>, 2> joint_empirical{};
  std::array<std::array<double, 2>, 2> joint_exact{};
  // Statistical deviations (same-parity-sector entries and joint table).
  double max_abs_deviation = 0.0;
  double max_sigma = 0.0;
  double joint_max_sigma = 0.0;
  // Largest exact cross-sector coherence, absent from trajectories by
  // construction (bounded by e^{-2 abar^2}); informational.
  double cross_sector_residual = 0.0;
  bool failed_5sigma = false;

  double worst_sigma() const { return std::max(max_sigma, joint_max_sigma); }
};

// Samples `shots` single-check trajectories and compares post-selected
// states and the joint inference table against the exact channel.
// Statistical deviations beyond 5 sigma set failed_5sigma.
inline McComparisonReport mc_vs_exact(const ParityCheckConfig& cfg,
                                      const PureState& input,
                                      std::size_t shots, std::uint64_t seed,
                                      int threads = 1) {
  require(shots >= 10000, "mc_vs_exact: need at least 1e4 shots");
  const int n = input.num_qubits();
  const auto d = static_cast<Eigen::Index>(input.dim());

  struct Partial {
    std::array<Matrix, 2> sum;
    std::array<Eigen::MatrixXd, 2> sum_re2, sum_im2;
    std::array<std::size_t, 2> count{};
    std::array<std::array<std::size_t, 2>, 2> joint{};
  };
  TrajectoryConfig tcfg{seed, shots, {cfg}};

  // Accumulation happens in the check-basis frame, where trajectory states
  // are parity eigenstates and the dropped coherences occupy exactly the
  // cross-sector entries.
  auto run_chunk = [&](std::size_t lo, std::size_t hi) {
    Partial p;
    for (int k = 0; k < 2; ++k) {
      p.sum[k] = Matrix::Zero(d, d);
      p.sum_re2[k] = Eigen::MatrixXd::Zero(d, d);
      p.sum_im2[k] = Eigen::MatrixXd::Zero(d, d);
    }
    for (std::size_t shot = lo; shot < hi; ++shot) {
      const TrajectoryRecord rec = run_trajectory(input, tcfg, shot);
      const int inf = rec.inferred_parities[0] > 0 ? 0 : 1;
      const int tru = rec.true_parities[0] > 0 ? 0 : 1;
      const PureState framed = cfg.basis == CheckBasis::X
                                   ? apply_hadamard_all(rec.final_state)
                                   : rec.final_state;
      const Matrix proj =
          framed.amplitudes() * framed.amplitudes().adjoint();
      p.sum[inf] += proj;
      p.sum_re2[inf] += proj.real().cwiseProduct(proj.real());
      p.sum_im2[inf] += proj.imag().cwiseProduct(proj.imag());
      ++p.count[inf];
      ++p.joint[inf][tru];
    }
    return p;
  };

  auto partials = map_chunks<Partial>(shots, 4096, threads, run_chunk);
  Partial total = std::move(partials.front());
  for (std::size_t i = 1; i < partials.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      total.sum[k] += partials[i].sum[k];
      total.sum_re2[k] += partials[i].sum_re2[k];
      total.sum_im2[k] += partials[i].sum_im2[k];
      total.count[k] += partials[i].count[k];
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) total.joint[a][b] += partials[i].joint[a][b];
  }

  const ThresholdedInference exact =
      thresholded_inference(run_check_exact(DensityMatrix::pure(input), cfg));

  const Matrix& h = hadamard_all_matrix(n);
  auto to_basis_frame = [&](const Matrix& m) {
    return cfg.basis == CheckBasis::X ? Matrix(h * m * h) : m;
  };
  auto from_basis_frame = to_basis_frame;  // H^{\otimes n} is self-inverse

  McComparisonReport rep;
  rep.shots = shots;
  rep.exact = {exact.rho_plus.entries(), exact.rho_minus.entries()};
  rep.exact_weight = {exact.weight_plus, exact.weight_minus};
  const double n_shots = static_cast<double>(shots);
  for (int k = 0; k < 2; ++k) {
    const double nk = static_cast<double>(total.count[k]);
    rep.empirical_weight[k] = nk / n_shots;
    const Matrix emp_f =
        nk > 0 ? Matrix((total.sum[k] / nk).eval()) : Matrix::Zero(d, d);
    rep.empirical[k] = from_basis_frame(emp_f);
    if (nk < 2) continue;
    const Matrix ex_f = to_basis_frame(rep.exact[k]);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        if (detail::sector_of(static_cast<std::size_t>(r)) !=
            detail::sector_of(static_cast<std::size_t>(c))) {
          // Coherence dropped by the trajectory model; bounded by
          // e^{-2 abar^2}, reported but not scored statistically.
          rep.cross_sector_residual =
              std::max(rep.cross_sector_residual, std::abs(ex_f(r, c)));
          continue;
        }
        const cx mean = emp_f(r, c);
        const double var_re = std::max(
            total.sum_re2[k](r, c) / nk - mean.real() * mean.real(), 0.0);
        const double var_im = std::max(
            total.sum_im2[k](r, c) / nk - mean.imag() * mean.imag(), 0.0);
        const cx dev = mean - ex_f(r, c);
        const double se_re = std::sqrt(var_re / nk);
        const double se_im = std::sqrt(var_im / nk);
        rep.max_abs_deviation =
            std::max(rep.max_abs_deviation, std::abs(dev));
        if (se_re > 1e-12)
          rep.max_sigma =
              std::max(rep.max_sigma, std::abs(dev.real()) / se_re);
        else if (std::abs(dev.real()) > 1e-9)
          rep.max_sigma = std::max(rep.max_sigma, 1e9);
        if (se_im > 1e-12)
          rep.max_sigma =
              std::max(rep.max_sigma, std::abs(dev.imag()) / se_im);
        else if (std::abs(dev.imag()) > 1e-9)
          rep.max_sigma = std::max(rep.max_sigma, 1e9);
      }
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double phat = static_cast<double>(total.joint[a][b]) / n_shots;
      const double pexact = exact.joint[a][b];
      rep.joint_empirical[a][b] = phat;
      rep.joint_exact[a][b] = pexact;
      const double se =
          std::sqrt(std::max(pexact * (1.0 - pexact), 1e-300) / n_shots);
      rep.joint_max_sigma =
          std::max(rep.joint_max_sigma, std::abs(phat - pexact) / se);
    }
  rep.failed_5sigma = rep.worst_sigma() > 5.0;
  return rep;
}

}  // namespace flycat
