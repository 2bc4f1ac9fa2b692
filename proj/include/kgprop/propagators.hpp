#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgprop/evolve.hpp"

namespace kgprop {

/// Right-hand side v of Pu = v with its temporal support.
struct SourceSpec {
  SpacetimeFunction v;
  double t0 = 0.0;
  double t1 = 0.0;
  std::string smoothness = "smooth";

  /// Samples f(t, x); the support [t0, t1] is declared by the caller.
  template <class F>
  static SourceSpec sample(const SpatialGrid& g, const TimeGrid& tg, F&& f, double t0, double t1,
                           std::string tag = "smooth") {
    return {SpacetimeFunction::sample(g, tg, std::forward<F>(f)), t0, t1, std::move(tag)};
  }
  /// Throws ConfigError if the support is not inside (T_min, T_max) by a margin.
  void validate() const;
};

/// ‖π⁺ w^ad(t)‖ for t < 0 and ‖π⁻ w^ad(t)‖ for t > 0 with fitted power laws.
struct BoundaryReport {
  std::vector<double> neg_times, pos_times;
  std::vector<double> plus_norms, minus_norms;
  double plus_exponent = 0.0, minus_exponent = 0.0;
  bool plus_zero = false, minus_zero = false;
  /// Largest ‖w^ad(t)‖ over the trajectory, for relative statements.
  double peak = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct PropagatorResult {
  PropagatorResult(std::string k, SpacetimeFunction field) : kind(std::move(k)), u(std::move(field)) {}

  std::string kind;
  /// u with carried ∂_t u.
  SpacetimeFunction u;
  /// ynorm(Pu - v)/ynorm(v) (absolute when v = 0).
  double residual_P = 0.0;
  double source_norm = 0.0;
  std::optional<BoundaryReport> bc;
  double tail_estimate = 0.0;
  int iterations = 0;
  std::vector<double> iteration_diffs;
  bool used_fallback = false;
};

struct PropagatorOptions {
  Integrator integrator = Integrator::Magnus4;
  double fd_step = 1e-3;
  double neumann_tol = 1e-11;
  int neumann_max = 60;
  bool dense_fallback = true;
  /// Largest 2N(Nt+1) for which the dense fallback is attempted.
  int dense_max_unknowns = 4500;
  double gamma = 0.75;
  bool compute_residual = true;
};

/// Stacked two-component trajectory: one vector per time node.
using Trajectory = std::vector<CVec>;

/// Shared machinery for one (model, time grid): evolutions, frames and the
/// Duhamel recursion. Heavy pieces are built lazily and reused.
///
/// Duhamel on the grid: w_{n+1} = S_n (w_n + i K_n) with
/// K_n ≈ ∫_{t_n}^{t_{n+1}} U(t_n, s) g(s) ds by the 4-node cubic rule
/// (dt/24)(-1, 13, 13, -1) on nodes n-1..n+2 (one-sided variants at the ends).
class PropagatorEngine {
 public:
  PropagatorEngine(ReducedModel model, TimeGrid tg, PropagatorOptions opt = {});

  const ReducedModel& model() const { return model_; }
  const SpatialGrid& grid() const { return model_.grid(); }
  const TimeGrid& time() const { return time_; }
  const PropagatorOptions& options() const { return opt_; }

  const Evolution& full_evolution() const;
  const Evolution& diag_evolution() const;
  /// Frame at node n (T, T⁻¹, Hd, Vad).
  const DiagFrame& frame(int n) const;
  bool has_remainder() const { return !model_.base().is_static(); }

  /// K_n for every interval, g given in `evo`'s basis.
  Trajectory interval_integrals(const Evolution& evo, const Trajectory& g) const;
  /// Solution of (D_t - G)w = g with w(T_min) = 0.
  Trajectory duhamel_forward(const Evolution& evo, const Trajectory& g) const;
  /// Solution of (D_t - G)w = g with w(T_max) = 0.
  Trajectory duhamel_backward(const Evolution& evo, const Trajectory& g) const;

  /// G^d_F: π⁺ part forward from T_min, π⁻ part backward from T_max (diag basis).
  /// `anti` swaps the roles of π⁺ and π⁻.
  Trajectory feynman_diag(const Trajectory& g, bool anti = false) const;
  /// G^ad_F by Neumann iteration w = G^d_F(g + Vad w), dense fallback on failure.
  Trajectory feynman_ad(const Trajectory& g, PropagatorResult* info = nullptr,
                        bool anti = false) const;
  /// Direct dense solve of the same discrete system as feynman_ad.
  Trajectory feynman_ad_dense(const Trajectory& g, bool anti = false,
                              double* sigma_min = nullptr) const;

  /// Source terms: g = -π₁*ṽ in the original frame (full basis) and
  /// T⁻¹g in the diagonal frame (diag basis).
  Trajectory source_original(const SpacetimeFunction& v) const;
  Trajectory source_diag(const SpacetimeFunction& v) const;

  /// u, ∂_t u from a trajectory of ρũ (original frame) or w^ad (diagonal frame).
  SpacetimeFunction from_original(const Trajectory& w, Basis b) const;
  SpacetimeFunction from_diag(const Trajectory& w) const;
  /// w^ad(t_n) = T⁻¹ ρ(R⁻¹ u)(t_n), nodal stacked.
  CVec ad_data(const SpacetimeFunction& u, int n) const;

  /// ℋ⁰ norm of a stacked vector in basis b.
  double basis_norm(const CVec& v, Basis b) const;

  /// ynorm(Pu - v)/ynorm(v).
  double residual(const SpacetimeFunction& u, const SpacetimeFunction& v) const;

 private:
  ReducedModel model_;
  TimeGrid time_;
  PropagatorOptions opt_;
  mutable std::unique_ptr<Evolution> full_;
  mutable std::unique_ptr<Evolution> diag_;
  mutable std::vector<std::optional<DiagFrame>> frames_;
};

/// Dense matrix of an operator in its own basis (mode blocks become diagonal blocks).
CMat basis_matrix(const OperatorMatrix& op);

/// Dense solve of the one-step system
///   w_{n+1} - S_n w_n - i S_n K_n[C w] = i S_n K_n[g],  n = 0..Nt-1,
///   bc_first · w_0 = 0,  bc_last · w_Nt = 0   (each N × 2N in evo's basis),
/// where C_n = coupling[n] (empty: no coupling). This is the discrete system the
/// Duhamel recursions solve, so it doubles as their oracle.
Trajectory solve_one_step_dense(const Evolution& evo, const Trajectory& g,
                                const std::vector<const OperatorMatrix*>& coupling,
                                const CMat& bc_first, const CMat& bc_last,
                                double* sigma_min = nullptr, double* rcond = nullptr);

PropagatorResult g_retarded(const PropagatorEngine& eng, const SourceSpec& src);
PropagatorResult g_advanced(const PropagatorEngine& eng, const SourceSpec& src);
/// G = G_ret - G_adv; residual_P is measured against 0 and scaled by ynorm(v).
PropagatorResult g_causal(const PropagatorEngine& eng, const SourceSpec& src);
/// G_F = -π₀ T G^ad_F T⁻¹ π₁*; boundary report attached.
PropagatorResult g_feynman(const PropagatorEngine& eng, const SourceSpec& src);
/// π⁺ ↔ π⁻ swapped Feynman construction.
PropagatorResult g_antifeynman(const PropagatorEngine& eng, const SourceSpec& src);

/// P u for u with carried ∂_t u: ∂_t²u (high-order differences of ∂_t u) + r∂_t u + a(t)u.
SpacetimeFunction apply_P(const ReducedModel& model, const SpacetimeFunction& u);

/// Log-spaced membership report on |t| ∈ [t_lo, t_hi] (grid nodes nearest to the samples).
/// `pass` iff both exponents are ≤ -(δ-1)/2 + slack (exact zeros pass).
BoundaryReport feynman_membership(const PropagatorEngine& eng, const SpacetimeFunction& u,
                                  double t_lo, double t_hi, int samples = 9,
                                  double slack = 0.0);

struct ScatteringData {
  explicit ScatteringData(const SpatialGrid& g)
      : at_tmax(TwoComponent::zeros(g)), extrapolated(TwoComponent::zeros(g)) {}

  /// U_out/in(0, ±T) w^ad(±T) at the largest radius.
  TwoComponent at_tmax;
  /// Richardson combination of the two largest radii assuming an O(T^{1-δ}) tail.
  TwoComponent extrapolated;
  std::vector<double> radii;
  std::vector<double> differences;
  double fitted_exponent = 0.0;
  bool exact = false;
  double tail_bound = 0.0;
};

/// ρ^ad_out (direction > 0) or ρ^ad_in (direction < 0) by Cook's method at radii
/// T_max, T_max/2, T_max/4, T_max/8 (rounded to grid nodes).
ScatteringData scattering_data(const PropagatorEngine& eng, const SpacetimeFunction& u,
                               int direction);

}  // namespace kgprop
