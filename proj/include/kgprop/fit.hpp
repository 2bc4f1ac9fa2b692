#pragma once

#include <vector>

namespace kgprop {

/// Least-squares line through (log x, log y).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Every sample was zero to working precision; slope is meaningless.
  bool exact_zero = false;
  std::vector<double> x;
  std::vector<double> y;
};

/// Throws NumericalError for fewer than 3 points or non-positive abscissae.
/// Samples with y <= zero_tol are reported via `exact_zero` when all of them are.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                     double zero_tol = 0.0);

}  // namespace kgprop
