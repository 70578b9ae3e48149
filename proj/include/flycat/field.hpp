#pragma once

// Coherent-state bookkeeping: overlaps, beam-splitter loss propagation, and
// homodyne position-representation amplitudes. No Fock-space machinery;
// coherent labels and Gaussian overlaps cover everything needed here.

#include <cmath>
#include <complex>
#include <vector>

#include "flycat/errors.hpp"

namespace flycat {

// Dimensionless field amplitude; |value|^2 is the mean photon number.
using CoherentAmplitude = std::complex<double>;

// Ordered beam-splitter reflectivities, one per transit segment of a check.
class LossProfile {
 public:
  explicit LossProfile(std::vector<double> etas) : etas_(std::move(etas)) {
    require(!etas_.empty(), "LossProfile: empty");
    for (double e : etas_)
      require(e >= 0.0 && e < 1.0, "LossProfile: eta outside [0, 1)");
  }

  static LossProfile uniform(int segments, double eta) {
    return LossProfile(std::vector<double>(segments, eta));
  }

  static LossProfile lossless(int segments) { return uniform(segments, 0.0); }

  int size() const { return static_cast<int>(etas_.size()); }
  double eta(int i) const { return etas_.at(i); }
  const std::vector<double>& etas() const { return etas_; }

  bool all_zero() const {
    for (double e : etas_)
      if (e > 0.0) return false;
    return true;
  }

 private:
  std::vector<double> etas_;
};

// <b|a> = exp(-|a|^2/2 - |b|^2/2 + conj(b) a)
inline std::complex<double> coherent_overlap(CoherentAmplitude a,
                                             CoherentAmplitude b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) +
                  std::conj(b) * a);
}

struct PropagatedField {
  CoherentAmplitude abar;               // surviving amplitude
  std::vector<CoherentAmplitude> leaked;  // amplitude lost at each segment
};

// abar = alpha * prod_i (1-eta_i)^{1/2},
// leaked[i] = alpha * eta_i^{1/2} * prod_{j<i} (1-eta_j)^{1/2}.
// Photon number is conserved: |abar|^2 + sum |leaked_i|^2 = |alpha|^2.
inline PropagatedField propagate_losses(CoherentAmplitude alpha,
                                        const LossProfile& losses) {
  PropagatedField out;
  out.leaked.reserve(losses.size());
  double survive = 1.0;  // prod_{j<i} (1 - eta_j)
  for (int i = 0; i < losses.size(); ++i) {
    out.leaked.push_back(alpha * std::sqrt(losses.eta(i) * survive));
    survive *= 1.0 - losses.eta(i);
  }
  out.abar = alpha * std::sqrt(survive);
  return out;
}

// <x|alpha> = pi^{-1/4} exp(-(x - sqrt(2) alpha)^2 / 2) for real alpha.
// A complex alpha must be rotated into the measured quadrature by the caller
// (local-oscillator phase); passing one here is a contract violation.
inline double homodyne_amplitude(double x, double alpha) {
  static const double kPiQuarter = std::pow(M_PI, -0.25);
  const double d = x - std::sqrt(2.0) * alpha;
  return kPiQuarter * std::exp(-0.5 * d * d);
}

inline double homodyne_amplitude(double x, CoherentAmplitude alpha) {
  require(std::abs(alpha.imag()) < 1e-12,
          "homodyne_amplitude: alpha must be real (rotate the phase "
          "reference first)");
  return homodyne_amplitude(x, alpha.real());
}

}  // namespace flycat
