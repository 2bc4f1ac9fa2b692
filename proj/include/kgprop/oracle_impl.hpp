#pragma once

#include <algorithm>
#include <cmath>

#include "kgprop/numerics.hpp"

namespace kgprop {

template <class F>
SpacetimeFunction retarded_green_convolution(const SpatialGrid& g, const TimeGrid& tg,
                                             double mass, F&& f, double s0, double s1,
                                             double y0, double y1, int stride, int s_nodes,
                                             int y_nodes) {
  SpacetimeFunction u(g, tg);
  stride = std::max(stride, 1);
  const auto [sr, swr] = gauss_legendre(s_nodes, -1.0, 1.0);
  const auto [yr, ywr] = gauss_legendre(y_nodes, -1.0, 1.0);
  for (int n = 0; n < tg.nodes(); n += stride) {
    const double t = tg.time(n);
    const double s_hi = std::min(s1, t);
    if (s_hi <= s0) continue;
    const double sm = 0.5 * (s0 + s_hi), sh = 0.5 * (s_hi - s0);
    for (int j = 0; j < g.size(); ++j) {
      const double x = g.node(j);
      cplx acc = 0.0;
      for (int a = 0; a < s_nodes; ++a) {
        const double sa = sm + sh * sr[a];
        const double tau = t - sa;
        const double lo = std::max(x - tau, y0), hi = std::min(x + tau, y1);
        if (hi <= lo) continue;
        const double ym = 0.5 * (lo + hi), yh = 0.5 * (hi - lo);
        cplx inner = 0.0;
        for (int b = 0; b < y_nodes; ++b) {
          const double y = ym + yh * yr[b];
          inner += ywr[b] * yh * retarded_green_1d(tau, x - y, mass) * cplx(f(sa, y));
        }
        acc += swr[a] * sh * inner;
      }
      u.values(n, j) = acc;
    }
  }
  return u;
}

}  // namespace kgprop
