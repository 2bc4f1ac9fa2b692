#pragma once

#include <utility>
#include <vector>

namespace kgprop {

/// Finite-difference weights for the `order`-th derivative at 0 from samples at
/// integer `offsets` (unit spacing).
std::vector<double> fd_weights(const std::vector<int>& offsets, int order);

/// Gauss-Legendre nodes and weights on [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b);

/// C∞ bump supported on (-1, 1): exp(1 - 1/(1 - s²)), equal to 1 at s = 0.
double smooth_bump(double s);
/// First and second derivatives of smooth_bump.
double smooth_bump_d1(double s);
double smooth_bump_d2(double s);

/// `order`-th time derivative of sampled rows by 7-point differences: central
/// inside, one-sided near the ends. `rows(n)` returns the sample at node n.
template <class Vec, class F>
std::vector<Vec> derivative_rows(int nodes, double dt, int order, F&& rows);

}  // namespace kgprop

#include "kgprop/numerics_impl.hpp"
