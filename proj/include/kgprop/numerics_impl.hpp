#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kgprop {

template <class Vec, class F>
std::vector<Vec> derivative_rows(int nodes, double dt, int order, F&& rows) {
  if (nodes < 7) throw std::invalid_argument("derivative_rows: need at least 7 nodes");
  std::vector<Vec> out;
  out.reserve(nodes);
  for (int n = 0; n < nodes; ++n) {
    const int start = std::clamp(n - 3, 0, nodes - 7);
    std::vector<int> offs(7);
    for (int j = 0; j < 7; ++j) offs[j] = start + j - n;
    const std::vector<double> w = fd_weights(offs, order);
    Vec acc = rows(start) * w[0];
    for (int j = 1; j < 7; ++j) acc += rows(start + j) * w[j];
    out.push_back(acc / std::pow(dt, order));
  }
  return out;
}

}  // namespace kgprop
