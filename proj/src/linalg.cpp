#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <random>
#include <vector>

#include "kgprop/linalg.hpp"

extern "C" void openblas_set_num_threads(int);

namespace kgprop {

DenseLU::DenseLU(CMat a) : lu_(std::move(a)) {
  const lapack_int n = static_cast<lapack_int>(lu_.rows());
  if (lu_.cols() != n) throw ShapeError("DenseLU: matrix is not square");
  const double anorm = lu_.cwiseAbs().colwise().sum().maxCoeff();
  std::vector<lapack_int> piv(n);
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, piv.data());
  if (info < 0) throw NumericalError("zgetrf: illegal argument");
  if (info > 0) throw NumericalError("dense system is singular to working precision");
  ipiv_.assign(piv.begin(), piv.end());
  double rc = 0.0;
  if (LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, lu_.data(), n, anorm, &rc) == 0) rcond_ = rc;
}

CVec DenseLU::solve(const CVec& b, bool adjoint) const {
  const lapack_int n = size();
  if (b.size() != n) throw ShapeError("DenseLU::solve: size mismatch");
  CVec x = b;
  std::vector<lapack_int> piv(ipiv_.begin(), ipiv_.end());
  const lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, adjoint ? 'C' : 'N', n, 1,
                                         lu_.data(), n, piv.data(), x.data(), n);
  if (info != 0) throw NumericalError("zgetrs failed");
  return x;
}

double DenseLU::sigma_min(int iterations, unsigned seed) const {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  CVec x(size());
  for (int i = 0; i < size(); ++i) x[i] = cplx(nd(rng), nd(rng));
  x.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    // (A^H A)⁻¹ x = A⁻¹ A^{-H} x.
    CVec y = solve(solve(x, true), false);
    lambda = y.norm();
    x = y / lambda;
  }
  return 1.0 / std::sqrt(lambda);
}

void set_thread_cap(int threads) {
  if (threads < 1) threads = 1;
  openblas_set_num_threads(threads);
  Eigen::setNbThreads(threads);
}

}  // namespace kgprop
