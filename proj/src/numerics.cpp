#include "kgprop/numerics.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace kgprop {

std::vector<double> fd_weights(const std::vector<int>& offsets, int order) {
  const int n = static_cast<int>(offsets.size());
  if (order >= n) throw std::invalid_argument("fd_weights: too few points for the order");
  // Moment conditions Σ w_j o_j^p = p! δ_{p,order}.
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int p = 0; p < n; ++p)
    for (int j = 0; j < n; ++j) A(p, j) = std::pow(static_cast<double>(offsets[j]), p);
  b[order] = std::tgamma(order + 1.0);
  const Eigen::VectorXd w = A.fullPivLu().solve(b);
  return {w.data(), w.data() + n};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
  // Golub-Welsch: eigenvalues of the Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(n), w(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    x[i] = mid + half * es.eigenvalues()[i];
    w[i] = 2.0 * v0 * v0 * half;
  }
  return {x, w};
}

double smooth_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double smooth_bump_d1(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return smooth_bump(s) * (-2.0 * s / (q * q));
}

double smooth_bump_d2(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  const double g = -2.0 * s / (q * q);
  // d/ds of -2s/q² = -2/q² - 8s²/q³.
  const double dg = -2.0 / (q * q) - 8.0 * s * s / (q * q * q);
  return smooth_bump(s) * (g * g + dg);
}

}  // namespace kgprop
