#include <catch2/catch_amalgamated.hpp>

#include "flycat/paritycheck.hpp"
#include "flycat/quadrature.hpp"

using namespace flycat;

namespace {

PureState xi_plus() {
  Vector v = Vector::Zero(8);
  for (std::size_t s : {0, 3, 5, 6}) v(s) = 0.5;
  return PureState(3, std::move(v));
}

PureState mixed_parity() {
  Vector v = Vector::Zero(8);
  v(0) = v(1) = 1.0 / std::sqrt(2.0);
  return PureState(3, std::move(v));
}

// Independent oracle for the exact channel: tensor one coherent label per
// loss mode, with the sign set by the running parity after each bounce,
// and trace the loss modes as general coherent overlaps. Works in the Z
// frame; entry (r, c) of the oracle block (a, b) is
//   rho(r, c) * prod_k <label_k(c) | label_k(r)>.
Matrix oracle_block(const Matrix& rho_z, double alpha,
                    const LossProfile& losses, int a, int b) {
  const int n = losses.size();
  const auto prop = propagate_losses(alpha, losses);
  const auto d = rho_z.rows();
  Matrix out = Matrix::Zero(d, d);
  auto prefix = [&](std::size_t s, int k) {
    return std::popcount(s >> (n - 1 - k)) & 1 ? -1.0 : 1.0;
  };
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      if ((std::popcount(static_cast<std::size_t>(r)) & 1) != a) continue;
      if ((std::popcount(static_cast<std::size_t>(c)) & 1) != b) continue;
      cx factor = 1.0;
      for (int k = 0; k < n; ++k)
        factor *= coherent_overlap(prefix(r, k) * prop.leaked[k],
                                   prefix(c, k) * prop.leaked[k]);
      out(r, c) = rho_z(r, c) * factor;
    }
  return out;
}

}  // namespace

TEST_CASE("lossless check is QND: blocks are the bare parity components") {
  RandomSource rng(101);
  const PureState psi = haar_state(3, rng);
  const ParityCheckConfig cfg(1.3, LossProfile::lossless(3));
  const PreMeasurementState pre =
      run_check_exact(DensityMatrix::pure(psi), cfg);
  pre.validate();
  REQUIRE(pre.abar() == Catch::Approx(1.3).margin(1e-15));
  // blocks[a][b] must equal the projected components of |psi><psi|.
  Matrix proj[2];
  for (int a = 0; a < 2; ++a) {
    Vector v = psi.amplitudes();
    for (std::size_t s = 0; s < 8; ++s)
      if ((std::popcount(s) & 1) != a) v(s) = 0.0;
    proj[a] = v * v.adjoint();
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Matrix expect = Matrix::Zero(8, 8);
      for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c)
          if ((std::popcount(r) & 1) == a && (std::popcount(c) & 1) == b)
            expect(r, c) = psi.amplitude(r) * std::conj(psi.amplitude(c));
      REQUIRE((pre.block(a, b) - expect).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("weight-3 even block matches the loss-mode tensoring oracle") {
  const ParityCheckConfig cfg(1.0, LossProfile::uniform(3, 0.02));
  const DensityMatrix rho = DensityMatrix::pure(xi_plus());
  const PreMeasurementState pre = run_check_exact(rho, cfg);
  pre.validate();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Matrix expect =
          oracle_block(rho.entries(), 1.0, cfg.losses, a, b);
      REQUIRE((pre.block(a, b) - expect).cwiseAbs().maxCoeff() < 1e-15);
    }
  // Spot values of the printed structure: (000, 011) decays with the
  // second leaked amplitude, (000, 101) with both.
  const double a1sq = 0.02, a2sq = 0.02 * 0.98;
  REQUIRE(pre.block(0, 0)(0, 3).real() ==
          Catch::Approx(0.25 * std::exp(-2.0 * a2sq)).epsilon(1e-13));
  REQUIRE(pre.block(0, 0)(0, 5).real() ==
          Catch::Approx(0.25 * std::exp(-2.0 * (a1sq + a2sq)))
              .epsilon(1e-13));
  REQUIRE(pre.block(0, 0)(0, 6).real() ==
          Catch::Approx(0.25 * std::exp(-2.0 * a1sq)).epsilon(1e-13));
}

TEST_CASE("mixed-parity input populates the off-diagonal blocks") {
  const ParityCheckConfig cfg(0.9, LossProfile::uniform(3, 0.03));
  const DensityMatrix rho = DensityMatrix::pure(mixed_parity());
  const PreMeasurementState pre = run_check_exact(rho, cfg);
  pre.validate();
  const Matrix expect = oracle_block(rho.entries(), 0.9, cfg.losses, 0, 1);
  REQUIRE((pre.block(0, 1) - expect).cwiseAbs().maxCoeff() < 1e-15);
  // (|000>, |001>) differ only in the final running parity: the coherence
  // survives with the third leaked amplitude's overlap.
  const double a3sq = 0.03 * 0.97 * 0.97 * 0.9 * 0.9;
  REQUIRE(pre.block(0, 1)(0, 1).real() ==
          Catch::Approx(0.5 * std::exp(-2.0 * a3sq)).epsilon(1e-12));
}

TEST_CASE("X-basis check equals the Hadamard-conjugated Z-basis check") {
  RandomSource rng(102);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = DensityMatrix::pure(haar_state(3, rng));
    std::vector<double> etas = {0.1 * rng.uniform(), 0.1 * rng.uniform(),
                                0.1 * rng.uniform()};
    const double alpha = 0.3 + rng.uniform();
    const PreMeasurementState prex = run_check_exact(
        rho, ParityCheckConfig(alpha, LossProfile(etas), CheckBasis::X));
    const Matrix& h = hadamard_all_matrix(3);
    const PreMeasurementState prez = run_check_exact(
        DensityMatrix(3, h * rho.entries() * h),
        ParityCheckConfig(alpha, LossProfile(etas), CheckBasis::Z));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        REQUIRE((prex.block(a, b) - h * prez.block(a, b) * h)
                    .cwiseAbs()
                    .maxCoeff() < 1e-12);
  }
}

TEST_CASE("loss never flips parity: block traces equal input weights") {
  RandomSource rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState psi = haar_state(3, rng);
    std::vector<double> etas = {rng.uniform() * 0.5, rng.uniform() * 0.5,
                                rng.uniform() * 0.5};
    const ParityCheckConfig cfg(0.2 + 2.0 * rng.uniform(),
                                LossProfile(etas));
    const PreMeasurementState pre =
        run_check_exact(DensityMatrix::pure(psi), cfg);
    double want[2] = {0.0, 0.0};
    for (std::size_t s = 0; s < 8; ++s)
      want[std::popcount(s) & 1] += std::norm(psi.amplitude(s));
    REQUIRE(pre.parity_weight(0) == Catch::Approx(want[0]).margin(1e-13));
    REQUIRE(pre.parity_weight(1) == Catch::Approx(want[1]).margin(1e-13));
  }
}

TEST_CASE("dephasing decomposition: probabilities and tail errors") {
  const ParityCheckConfig lossless(1.0, LossProfile::lossless(3));
  for (const auto& term : dephasing_decomposition(lossless))
    REQUIRE(term.probability == 0.0);

  const ParityCheckConfig cfg(1.0, LossProfile({0.01, 0.0, 0.0}));
  const auto terms = dephasing_decomposition(cfg);
  REQUIRE(terms.size() == 3);
  REQUIRE(terms[0].probability ==
          Catch::Approx(0.009900663346622374).epsilon(1e-14));
  REQUIRE(terms[0].error.label() == "IZZ");
  REQUIRE(terms[1].error.label() == "IIZ");
  REQUIRE(terms[2].error.is_identity());

  const ParityCheckConfig xcfg(1.0, LossProfile({0.01, 0.02, 0.0}),
                               CheckBasis::X);
  const auto xterms = dephasing_decomposition(xcfg);
  REQUIRE(xterms[0].error.label() == "IXX");
  REQUIRE(xterms[1].error.label() == "IIX");

  const ParityCheckConfig w2(1.0, LossProfile({0.02, 0.01}));
  const auto w2terms = dephasing_decomposition(w2);
  REQUIRE(w2terms.size() == 2);
  REQUIRE(w2terms[0].error.label() == "IZ");
  REQUIRE(w2terms[1].error.is_identity());
}

TEST_CASE("dephasing composition reproduces the exact diagonal blocks") {
  RandomSource rng(104);
  for (int trial = 0; trial < 30; ++trial) {
    const int weight = trial % 3 == 0 ? 2 : 3;
    std::vector<double> etas;
    for (int k = 0; k < weight; ++k) etas.push_back(0.1 * rng.uniform());
    const ParityCheckConfig cfg(0.2 + 1.8 * rng.uniform(),
                                LossProfile(etas),
                                trial % 2 ? CheckBasis::X : CheckBasis::Z);
    const DensityMatrix rho = DensityMatrix::pure(haar_state(weight, rng));
    const PreMeasurementState pre = run_check_exact(rho, cfg);

    Matrix composed = rho.entries();
    for (const auto& term : dephasing_decomposition(cfg)) {
      if (term.error.is_identity()) continue;
      const Matrix e = term.error.to_matrix();
      composed = (1.0 - term.probability) * composed +
                 term.probability * e * composed * e.adjoint();
    }
    const Matrix& h = hadamard_all_matrix(weight);
    const Matrix composed_f =
        cfg.basis == CheckBasis::X ? Matrix(h * composed * h) : composed;
    for (int a = 0; a < 2; ++a) {
      const Matrix block_f = cfg.basis == CheckBasis::X
                                 ? Matrix(h * pre.block(a, a) * h)
                                 : pre.block(a, a);
      for (std::size_t r = 0; r < dim_of(weight); ++r)
        for (std::size_t c = 0; c < dim_of(weight); ++c) {
          if ((std::popcount(r) & 1) != a || (std::popcount(c) & 1) != a)
            continue;
          REQUIRE(std::abs(block_f(r, c) - composed_f(r, c)) < 1e-12);
        }
    }
  }
}

TEST_CASE("outcome density integrates to 1") {
  const ParityCheckConfig cfg(1.0, LossProfile::uniform(3, 0.02));
  const PreMeasurementState pre =
      run_check_exact(DensityMatrix::pure(mixed_parity()), cfg);
  const double span = std::sqrt(2.0) * pre.abar() + 10.0;
  const double total = integrate(
      [&](double x) { return conditional_post_state(pre, x).second; },
      -span, span, 1e-10);
  REQUIRE(total == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("conditional state at the even peak is nearly all even parity") {
  const ParityCheckConfig cfg(1.0, LossProfile::lossless(3));
  const PreMeasurementState pre =
      run_check_exact(DensityMatrix::pure(xi_plus()), cfg);
  const auto [rho_x, px] =
      conditional_post_state(pre, std::sqrt(2.0) * pre.abar());
  REQUIRE(px > 0.0);
  REQUIRE(rho_x.min_eigenvalue() > -1e-9);
  double even_weight = 0.0;
  for (std::size_t s = 0; s < 8; ++s)
    if (!(std::popcount(s) & 1)) even_weight += rho_x.entries()(s, s).real();
  const double pm = 0.5 * std::erfc(std::sqrt(2.0) * pre.abar());
  REQUIRE(even_weight >= 1.0 - pm);
}

TEST_CASE("symmetric parity weights give a symmetric outcome density") {
  const ParityCheckConfig cfg(0.8, LossProfile::uniform(3, 0.05));
  const PreMeasurementState pre =
      run_check_exact(DensityMatrix::pure(mixed_parity()), cfg);
  for (double x : {0.1, 0.7, 1.9}) {
    REQUIRE(conditional_post_state(pre, x).second ==
            Catch::Approx(conditional_post_state(pre, -x).second)
                .epsilon(1e-12));
  }
}

TEST_CASE("far-out-of-support query is signalled") {
  const ParityCheckConfig cfg(1.0, LossProfile::lossless(3));
  const PreMeasurementState pre =
      run_check_exact(DensityMatrix::pure(xi_plus()), cfg);
  REQUIRE_THROWS_AS(conditional_post_state(pre, 60.0), numeric_error);
}

TEST_CASE("thresholded pM equals erfc(sqrt(2) abar)/2 by quadrature") {
  for (double abar : {0.1, 0.5, 1.0, 2.0}) {
    const ParityCheckConfig cfg(abar, LossProfile::lossless(3));
    const PreMeasurementState pre =
        run_check_exact(DensityMatrix::pure(mixed_parity()), cfg);
    const ThresholdedInference inf = thresholded_inference(pre);
    REQUIRE(std::abs(inf.p_measurement -
                     0.5 * std::erfc(std::sqrt(2.0) * abar)) < 1e-8);
  }
  // Frozen spot value at abar = 1.
  const ParityCheckConfig cfg(1.0, LossProfile::lossless(3));
  const ThresholdedInference inf = thresholded_inference(
      run_check_exact(DensityMatrix::pure(xi_plus()), cfg));
  REQUIRE(inf.p_measurement ==
          Catch::Approx(0.022750131948179195).epsilon(1e-8));
}

TEST_CASE("large amplitude suppresses the measurement error") {
  const ParityCheckConfig cfg(3.0, LossProfile::lossless(3));
  const ThresholdedInference inf = thresholded_inference(
      run_check_exact(DensityMatrix::pure(xi_plus()), cfg));
  REQUIRE(inf.p_measurement < 1e-8);
}

TEST_CASE("joint inference table is a probability table") {
  const ParityCheckConfig cfg(0.7, LossProfile::uniform(3, 0.04));
  const ThresholdedInference inf = thresholded_inference(
      run_check_exact(DensityMatrix::pure(mixed_parity()), cfg));
  const double total = inf.joint[0][0] + inf.joint[0][1] + inf.joint[1][0] +
                       inf.joint[1][1];
  REQUIRE(total == Catch::Approx(1.0).margin(1e-8));
  // P("+", -) = |c_-|^2 erfc(sqrt(2) abar)/2 with |c_-|^2 = 1/2 here.
  const double abar = propagate_losses(0.7, cfg.losses).abar.real();
  REQUIRE(inf.joint[0][1] ==
          Catch::Approx(0.25 * std::erfc(std::sqrt(2.0) * abar))
              .margin(1e-8));
  REQUIRE(inf.weight_plus + inf.weight_minus ==
          Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("post-measurement parity coherences are suppressed by e^{-2 abar^2}") {
  const ParityCheckConfig cfg(0.9, LossProfile::uniform(3, 0.02));
  const DensityMatrix rho = DensityMatrix::pure(mixed_parity());
  const PreMeasurementState pre = run_check_exact(rho, cfg);
  const ThresholdedInference inf = thresholded_inference(pre);
  const Matrix post = inf.rho_plus.entries() * inf.weight_plus +
                      inf.rho_minus.entries() * inf.weight_minus;
  const double bound = std::exp(-2.0 * pre.abar() * pre.abar());
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      if ((std::popcount(r) & 1) == (std::popcount(c) & 1)) continue;
      const double input_coh = std::abs(rho.entries()(r, c));
      REQUIRE(std::abs(post(r, c)) <= bound * input_coh + 1e-12);
    }
}

TEST_CASE("error budget: lossless and limiting values") {
  const ErrorBudget lossless = error_budget(1.0, LossProfile::lossless(3));
  REQUIRE(lossless.p1 == 0.0);
  REQUIRE(lossless.p2 == 0.0);
  REQUIRE(lossless.ptot == lossless.pM);

  const ErrorBudget b = error_budget(1.0, LossProfile::uniform(3, 0.01));
  REQUIRE(b.p1 == Catch::Approx(0.009900663346622374).epsilon(1e-14));
  REQUIRE(b.ptot == Catch::Approx(b.pM + b.p1 + b.p2).margin(1e-15));

  // alpha -> 0: pure guessing.
  const ErrorBudget zero = error_budget(0.0, LossProfile::uniform(3, 0.01));
  REQUIRE(zero.ptot == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("asymptotic budget form differs from the exact sum as evaluated") {
  // alpha = 1, eta = 0.01 per segment: the printed large-alpha form sits
  // 16.14% below the exact sum (its loss term carries a factor 1/2
  // relative to p1 + p2 at leading order).
  const ErrorBudget b = error_budget(1.0, LossProfile::uniform(3, 0.01));
  const double rel = std::abs(b.ptot_asymptotic - b.ptot) / b.ptot;
  REQUIRE(rel == Catch::Approx(0.161445797878545).epsilon(1e-9));
  REQUIRE(rel < 0.17);
}

TEST_CASE("optimize_alpha matches a 1e-4 grid search") {
  for (double eta : {0.005, 0.01, 0.02}) {
    const LossProfile losses = LossProfile::uniform(3, eta);
    const AlphaOptimum opt = optimize_alpha(losses, 0.05, 4.0);
    double best_a = 0.05, best_p = error_budget(0.05, losses).ptot;
    for (double a = 0.05; a <= 4.0; a += 1e-4) {
      const double p = error_budget(a, losses).ptot;
      if (p < best_p) {
        best_p = p;
        best_a = a;
      }
    }
    REQUIRE(std::abs(opt.alpha_star - best_a) < 1e-3);
    REQUIRE(opt.ptot_star <=
            error_budget(opt.alpha_star + 0.1, losses).ptot);
    REQUIRE(opt.ptot_star <=
            error_budget(opt.alpha_star - 0.1, losses).ptot);
  }
}

TEST_CASE("higher loss pulls the optimal amplitude down") {
  const AlphaOptimum lo = optimize_alpha(LossProfile::uniform(3, 0.005));
  const AlphaOptimum hi = optimize_alpha(LossProfile::uniform(3, 0.02));
  REQUIRE(hi.alpha_star < lo.alpha_star);
}

TEST_CASE("optimize_alpha rejects the lossless profile") {
  REQUIRE_THROWS_AS(optimize_alpha(LossProfile::lossless(3)),
                    contract_error);
}

TEST_CASE("repeated decision: N = 1 reproduces the single-shot error") {
  const LossProfile lossless = LossProfile::lossless(3);
  const double pm = 0.5 * std::erfc(std::sqrt(2.0) * 0.8);
  for (DecisionMode mode : {DecisionMode::Soft, DecisionMode::Hard}) {
    const auto res =
        repeated_decision(1, 0.8, lossless, mode, 200000, RandomSource(7));
    REQUIRE(std::abs(res.error_probability - pm) <
            3.0 * res.standard_error);
  }
}

TEST_CASE("soft decision over N shots equals one shot at sqrt(N) alpha") {
  const LossProfile lossless = LossProfile::lossless(3);
  const auto res = repeated_decision(4, 0.6, lossless, DecisionMode::Soft,
                                     200000, RandomSource(8));
  const double pm_equiv = 0.5 * std::erfc(std::sqrt(2.0) * 2.0 * 0.6);
  REQUIRE(std::abs(res.error_probability - pm_equiv) <
          3.0 * res.standard_error);
}

TEST_CASE("majority vote loses to the soft decision") {
  const LossProfile lossless = LossProfile::lossless(3);
  const auto soft = repeated_decision(9, 0.5, lossless, DecisionMode::Soft,
                                      1000000, RandomSource(9));
  const auto hard = repeated_decision(9, 0.5, lossless, DecisionMode::Hard,
                                      1000000, RandomSource(10));
  const double gap_se = std::hypot(soft.standard_error, hard.standard_error);
  REQUIRE(hard.error_probability - soft.error_probability > 3.0 * gap_se);
}

TEST_CASE("repeated decision is independent of thread count") {
  const LossProfile losses = LossProfile::uniform(3, 0.01);
  const auto serial = repeated_decision(3, 0.7, losses, DecisionMode::Hard,
                                        50000, RandomSource(11), 1);
  const auto parallel = repeated_decision(3, 0.7, losses, DecisionMode::Hard,
                                          50000, RandomSource(11), 4);
  REQUIRE(serial.error_probability == parallel.error_probability);
}

TEST_CASE("hard mode requires odd N") {
  REQUIRE_THROWS_AS(
      repeated_decision(4, 0.5, LossProfile::lossless(3),
                        DecisionMode::Hard, 10, RandomSource(1)),
      contract_error);
}

TEST_CASE("hook errors reduce modulo the gauge operator") {
  REQUIRE(hook_gauge_reduce(PauliString::from_label("IZZ")).label() == "ZII");
  REQUIRE(hook_gauge_reduce(PauliString::from_label("IIZ")).label() == "IIZ");
  REQUIRE(hook_gauge_reduce(PauliString::from_label("IXX")).label() == "XII");
  REQUIRE(hook_gauge_reduce(PauliString::from_label("III")).label() == "III");
  REQUIRE_THROWS_AS(hook_gauge_reduce(PauliString::from_label("IYZ")),
                    contract_error);
}
