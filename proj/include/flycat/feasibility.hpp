#pragma once

// Circuit-QED feasibility: dispersive reflection coefficient, entangling-
// operation infidelity (numeric overlap integral and closed form), qubit
// decoherence estimate, transmission/circulator loss budget, and the
// tetrahedron preparation-fidelity bound.
//
// All rates are stored as angular frequencies (rad/s). Linear-frequency
// ("/2pi", MHz) inputs are converted once at the construction boundary.

#include <cmath>
#include <complex>
#include <string>

#include "flycat/errors.hpp"
#include "flycat/quadrature.hpp"

namespace flycat {

struct CqedParams {
  double omega_c;    // cavity frequency (rad/s)
  double chi;        // dispersive shift (rad/s, signed)
  double kappa0;     // line coupling rate (rad/s)
  double kappa_int;  // internal loss rate (rad/s)
  double tau;        // pulse width (s)
  double T1;         // relaxation time (s)
  double T2star;     // inhomogeneous dephasing time (s)
  double alpha;      // field amplitude (real)

  void validate() const {
    require(omega_c > 0 && kappa0 > 0 && kappa_int >= 0 && tau > 0 &&
                T1 > 0 && T2star > 0 && alpha >= 0,
            "CqedParams: rates and times must be positive");
    require(chi != 0.0, "CqedParams: dispersive shift must be nonzero");
  }

  // Linear-frequency constructor: chi/2pi and kappas/2pi in MHz, tau in ns,
  // T1 and T2* in us. kappa0_mhz <= 0 selects the ideal tuning
  // kappa0 = 2|chi|.
  static CqedParams from_linear(double omega_c_ghz, double chi_mhz,
                                double kappa_int_mhz, double tau_ns,
                                double t1_us, double t2star_us, double alpha,
                                double kappa0_mhz = 0.0) {
    constexpr double two_pi = 2.0 * M_PI;
    CqedParams p{};
    p.omega_c = two_pi * omega_c_ghz * 1e9;
    p.chi = two_pi * chi_mhz * 1e6;
    p.kappa_int = two_pi * kappa_int_mhz * 1e6;
    p.kappa0 = kappa0_mhz > 0.0 ? two_pi * kappa0_mhz * 1e6
                                : 2.0 * std::abs(p.chi);
    p.tau = tau_ns * 1e-9;
    p.T1 = t1_us * 1e-6;
    p.T2star = t2star_us * 1e-6;
    p.alpha = alpha;
    p.validate();
    return p;
  }
};

// Qubit-state-dependent reflection coefficient
// R_s(w) = (2i[w - w_c - (-1)^s chi] + k0 - k_int) /
//          (2i[w - w_c - (-1)^s chi] - k0 - k_int).
inline std::complex<double> reflection_coefficient(double omega, int s,
                                                   const CqedParams& p) {
  require(s == 0 || s == 1, "reflection_coefficient: s must be 0 or 1");
  const std::complex<double> detuning(
      0.0, 2.0 * (omega - p.omega_c - (s ? -p.chi : p.chi)));
  return (detuning + (p.kappa0 - p.kappa_int)) /
         (detuning - (p.kappa0 + p.kappa_int));
}

struct InfidelityBudget {
  double eps_bandwidth_closed;  // alpha^2 / (2 tau^2 chi^2)
  double eps_internal_closed;   // alpha^2 kappa_int^2 / (4 chi^2)
  double eps_reflect_closed;    // sum of the two
  double eps_reflect_numeric;   // overlap integral, Gaussian waveform
  double eps_qubit;             // tau / T2*
  double eps_total;             // eps_qubit + eps_reflect_numeric
  bool decoherence_warning;     // tau / min(T1, T2*) > 0.2
};

// Entangling-operation infidelity at the ideal tuning |chi| = kappa0 / 2.
// The numeric term evaluates
//   1 - (1/2) sum_s exp(-alpha^2 Int (dw/2pi) |u(w)|^2 |i_s - R_s(w)|^2)
// with |u(w)|^2 = 2 sqrt(pi) tau exp(-(w - w_c)^2 tau^2) and the ideal
// phase i_s = sign(chi) (-1)^s i, by adaptive quadrature.
inline InfidelityBudget infidelity_budget(const CqedParams& p) {
  p.validate();
  require(std::abs(p.kappa0 - 2.0 * std::abs(p.chi)) <=
              1e-9 * p.kappa0,
          "infidelity_budget: requires the tuning kappa0 = 2|chi|");
  InfidelityBudget b{};
  const double a2 = p.alpha * p.alpha;
  b.eps_bandwidth_closed = a2 / (2.0 * p.tau * p.tau * p.chi * p.chi);
  b.eps_internal_closed =
      a2 * p.kappa_int * p.kappa_int / (4.0 * p.chi * p.chi);
  b.eps_reflect_closed = b.eps_bandwidth_closed + b.eps_internal_closed;

  const double sign = p.chi > 0 ? 1.0 : -1.0;
  double sum = 0.0;
  for (int s = 0; s < 2; ++s) {
    const std::complex<double> ideal(0.0, sign * (s ? -1.0 : 1.0));
    // Substitution y = (w - w_c) tau; the Gaussian weight is
    // (2 sqrt(pi))^{-1}... folded so that the weight integrates to 1.
    auto integrand = [&](double y) {
      const double w = p.omega_c + y / p.tau;
      const double weight = std::exp(-y * y) / std::sqrt(M_PI);
      return weight * std::norm(ideal - reflection_coefficient(w, s, p));
    };
    const double integral = integrate(integrand, -10.0, 10.0, 1e-10);
    sum += std::exp(-a2 * integral);
  }
  b.eps_reflect_numeric = 1.0 - 0.5 * sum;
  b.eps_qubit = p.tau / p.T2star;
  b.eps_total = b.eps_qubit + b.eps_reflect_numeric;
  b.decoherence_warning = p.tau / std::min(p.T1, p.T2star) > 0.2;
  return b;
}

struct TetraFidelityBound {
  double f_max;    // 1 - 18 eps, clamped at 0
  bool saturated;  // eps > 1/18
};

// Eighteen entangling operations enter one tetrahedron preparation.
inline TetraFidelityBound tetra_fidelity_bound(double eps) {
  require(eps >= 0.0, "tetra_fidelity_bound: eps must be >= 0");
  if (eps > 1.0 / 18.0) return {0.0, true};
  return {1.0 - 18.0 * eps, false};
}

struct LossBudget {
  double eta_trans;
  double eta_circ;
  double eta;      // eta_trans + eta_circ
  bool saturated;  // eta >= 1
};

// Known cable attenuations (dB/km).
inline double cable_attenuation_db_per_km(const std::string& material) {
  if (material == "NbTi") return 5.0;
  if (material == "Al") return 0.15;
  throw contract_error("loss_budget: unknown cable material '" + material +
                       "' (use NbTi, Al, or give dB/km directly)");
}

inline LossBudget loss_budget(double attenuation_db_per_km, double length_km,
                              int circulators,
                              double loss_per_circulator) {
  require(attenuation_db_per_km >= 0 && length_km >= 0,
          "loss_budget: attenuation and length must be >= 0");
  require(circulators >= 0 && loss_per_circulator >= 0 &&
              loss_per_circulator < 1,
          "loss_budget: bad circulator parameters");
  LossBudget b{};
  b.eta_trans =
      1.0 - std::pow(10.0, -attenuation_db_per_km * length_km / 10.0);
  b.eta_circ = loss_per_circulator * circulators;
  b.eta = b.eta_trans + b.eta_circ;
  b.saturated = b.eta >= 1.0;
  if (b.saturated) b.eta = 1.0;
  return b;
}

}  // namespace flycat
