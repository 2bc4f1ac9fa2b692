#pragma once

#include <vector>

#include "kgprop/types.hpp"

namespace kgprop {

/// Pivoted LU of a dense complex matrix (LAPACK zgetrf).
class DenseLU {
 public:
  explicit DenseLU(CMat a);

  int size() const { return static_cast<int>(lu_.rows()); }
  /// Solves A x = b, or A^H x = b when `adjoint`.
  CVec solve(const CVec& b, bool adjoint = false) const;
  /// Reciprocal 1-norm condition number estimate (zgecon).
  double rcond() const { return rcond_; }
  /// σ_min(A) by inverse power iteration on (A^H A)⁻¹.
  double sigma_min(int iterations = 30, unsigned seed = 11) const;

 private:
  CMat lu_;
  std::vector<int> ipiv_;
  double rcond_ = 0.0;
};

/// Caps BLAS and Eigen threading (KGPROP_THREADS).
void set_thread_cap(int threads);

}  // namespace kgprop
