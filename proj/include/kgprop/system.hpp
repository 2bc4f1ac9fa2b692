#pragma once

#include "kgprop/model.hpp"

namespace kgprop {

/// H(t) = [[0, 1], [ã(t), 0]] acting on (u, i⁻¹∂_t u) of the reduced problem.
OperatorMatrix H_of_t(const ReducedModel& model, double t);

/// Cauchy data (u(t), i⁻¹∂_t u(t)) at a grid time. Requires the carried ∂_t u.
TwoComponent rho(const SpacetimeFunction& u, double t);

/// π⁺ = [[1,0],[0,0]] for sign > 0, π⁻ = [[0,0],[0,1]] otherwise.
OperatorMatrix pi_pm(const SpatialGrid& g, int sign,
                     OperatorMatrix::Kind k = OperatorMatrix::Kind::ModeBlocks);
/// q^ad = diag(1, -1).
OperatorMatrix q_ad(const SpatialGrid& g, OperatorMatrix::Kind k = OperatorMatrix::Kind::ModeBlocks);
/// q_E = [[0,1],[1,0]].
OperatorMatrix q_E(const SpatialGrid& g, OperatorMatrix::Kind k = OperatorMatrix::Kind::ModeBlocks);

/// Spectral projection of [[0,1],[a,0]] onto ±a^{1/2}: ½[[1, ±a^{-1/2}], [±a^{1/2}, 1]].
/// Dense operators are decomposed with respect to `weight`.
OperatorMatrix c_spectral(int sign, const SpatialOp& a);
OperatorMatrix c_spectral(int sign, const SpatialOp& a, const RVec& weight);

/// √(‖f₀‖²_{H^m} + ‖f₁‖²_{H^m}).
double hnorm(const TwoComponent& f, double m);

/// (f|g)₀ = Σ_i dx Σ_j conj(f_i) g_i w_j on stacked nodal vectors.
cplx pair0(const CVec& f, const CVec& g, const RVec& weight, double dx);

/// (H f | q_E g)₀ - (q_E f | H g)₀ for nodal stacked f, g.
cplx charge_residual(const OperatorMatrix& H, const TwoComponent& f, const TwoComponent& g,
                     const RVec& weight);

}  // namespace kgprop
