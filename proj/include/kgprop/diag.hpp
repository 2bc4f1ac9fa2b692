#pragma once

#include <vector>

#include "kgprop/system.hpp"

namespace kgprop {

/// ε(t) = ã(t)^{1/2}, positive square root for the (·|·)₀ pairing.
SpatialOp sqrt_a(const ReducedModel& model, double t);

/// Zeroth-order diagonalization of H(t):
///   T = 2^{-1/2}[[ε^{-1/2}, ε^{-1/2}], [ε^{1/2}, -ε^{1/2}]],  T⁻¹HT = diag(ε, -ε),
///   H^ad = Hd + Vad with Vad = i T⁻¹ ∂_t T.
struct DiagFrame {
  double t = 0.0;
  SpatialOp eps;
  SpatialOp eps_half;
  SpatialOp eps_mhalf;
  OperatorMatrix T;
  OperatorMatrix Tinv;
  OperatorMatrix Hd;
  OperatorMatrix Vad;
  double min_eigenvalue = 0.0;

  /// Hd + Vad.
  OperatorMatrix H_ad() const { return Hd + Vad; }
  /// ‖diag part of Vad‖ / ‖off-diagonal part‖ (Frobenius); 0 when Vad = 0.
  double diagonal_ratio() const;
};

/// ∂_t T is taken by 4th-order central differences with step `fd_step`;
/// static metrics get Vad = 0 exactly.
DiagFrame build_frame(const ReducedModel& model, double t, double fd_step = 1e-3);

/// T(t) and T⁻¹(t) only, without the remainder.
std::pair<OperatorMatrix, OperatorMatrix> frame_T(const ReducedModel& model, double t);

/// Probe sets for remainder_decay: 0 and 1 are disjoint sets of two-component
/// Gaussians; kExactNorm uses the exact weighted ℋ⁰ operator norm.
inline constexpr int kExactNorm = -1;

/// Log-log fit of ‖Vad(t)‖ against ⟨t⟩.
LogLogFit remainder_decay(const ReducedModel& model, const std::vector<double>& times,
                          int probe_set = kExactNorm);

/// ‖Vad(t)‖ measured as in remainder_decay.
double remainder_size(const ReducedModel& model, double t, int probe_set = kExactNorm);

}  // namespace kgprop
