#pragma once

// Adaptive Gauss-Kronrod wrapper with a single tolerance policy.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "flycat/errors.hpp"

namespace flycat {

// Integrates f over [a, b]; throws numeric_error (with the achieved error
// estimate in the message) if the adaptive scheme cannot reach `tol`.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::
      integrate(std::forward<F>(f), a, b, 15, 1e-12, &err);
  const double bound = tol * std::max(1.0, std::abs(v));
  if (!(err <= bound)) {
    throw numeric_error("quadrature did not converge: error estimate " +
                        std::to_string(err) + " > " + std::to_string(bound));
  }
  return v;
}

}  // namespace flycat
