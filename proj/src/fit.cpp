#include "kgprop/fit.hpp"

#include <cmath>

#include "kgprop/types.hpp"

namespace kgprop {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double zero_tol) {
  if (x.size() != y.size()) throw NumericalError("fit_loglog: length mismatch");
  if (x.size() < 3) throw NumericalError("fit_loglog: need at least 3 points");
  LogLogFit fit;
  fit.x = x;
  fit.y = y;
  bool all_zero = true;
  for (double v : y) all_zero = all_zero && std::abs(v) <= zero_tol;
  if (all_zero) {
    fit.exact_zero = true;
    return fit;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw NumericalError("fit_loglog: abscissae must be positive");
    if (!(y[i] > 0.0)) throw NumericalError("fit_loglog: mixed zero and non-zero samples");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw NumericalError("fit_loglog: degenerate abscissae");
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  return fit;
}

}  // namespace kgprop
