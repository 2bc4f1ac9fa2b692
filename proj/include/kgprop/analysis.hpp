#pragma once

#include <vector>

#include "kgprop/fit.hpp"
#include "kgprop/propagators.hpp"

namespace kgprop {

/// χ_ε(t) = ∫_{|t|}^∞ 1_{[1,2]}(εs) s^{-r} ds in closed form.
class CutoffFamily {
 public:
  /// Throws ConfigError ("analysis.r", "analysis.eps_list") outside r ∈ (0,1), ε > 0.
  CutoffFamily(double r, double epsilon);

  double r() const { return r_; }
  double epsilon() const { return eps_; }
  /// Outer edge of supp ∂_tχ_ε.
  double radius() const { return 2.0 / eps_; }

  double chi(double t) const;
  /// -sgn(t) 1_{[1/ε, 2/ε]}(|t|) |t|^{-r}; the closed interval is used at the kinks.
  double dchi(double t) const;

  RVec sample(const TimeGrid& tg) const;
  /// Exact cell averages (χ(t_{n+1}) - χ(t_n))/dt, one per step.
  RVec cell_derivative(const TimeGrid& tg) const;

 private:
  double r_;
  double eps_;
};

/// Diagonal-frame trajectory w^ad(t_n), nodal stacked.
Trajectory ad_trajectory(const PropagatorEngine& eng, const SpacetimeFunction& u);

struct PairingResult {
  /// ∫ (w | q^ad ∂_tχ_ε w)₀ dt.
  cplx value;
  /// ∫ ∂_tχ_ε (‖π⁺w‖² - ‖π⁻w‖²) dt.
  double decomposition = 0.0;
  /// Same integral restricted to the components a Feynman solution must shed:
  /// π⁺ on t < 0 and π⁻ on t > 0.
  double wrong_side = 0.0;
};

/// Cell-wise trapezoid: Σ_n (χ_{n+1} - χ_n) ½(f_n + f_{n+1}), so the kinks of
/// ∂_tχ_ε are integrated exactly. Requires 2/ε ≤ T_max.
PairingResult isozaki_pairing(const ReducedModel& model, const TimeGrid& tg, const Trajectory& w,
                              const CutoffFamily& fam);

/// Both sides of ∫ ∂_tχ (w|q^ad w)₀ dt = 2 ∫ χ Im(w | q^ad g)₀ dt for
/// (D_t - H^ad) w = g, on an analytic trajectory with c⁺_out = 1 and small
/// decaying π⁻ content. Composite Gauss-Legendre in t.
struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};
IdentityCheck isozaki_identity(const ReducedModel& model, const CutoffFamily& fam,
                               int nodes_per_panel = 10, double panel = 1.0);

struct IsozakiReport {
  double r = 0.0;
  double delta = 0.0;
  std::vector<double> eps;
  std::vector<double> feynman_pairing;
  std::vector<double> feynman_wrong_side;
  std::vector<double> control_pairing;
  /// max |Im I(ε)| / |I(ε)| and max |I - decomposition| / |I| over both runs.
  double max_imag = 0.0;
  double max_decomposition = 0.0;

  LogLogFit control_fit;
  LogLogFit feynman_fit;
  LogLogFit feynman_full_fit;
  /// Slope change when the largest ε is dropped.
  double control_shift = 0.0;
  double feynman_shift = 0.0;

  IdentityCheck identity;

  bool control_pass = false;
  bool feynman_pass = false;
  bool identity_pass = false;
  bool pass = false;
};

/// Feynman run (G_F v) against the retarded control (G_ret v) on one engine.
/// Control: slope of |I(ε)| within ±0.15 of r-1. Feynman: the wrong-side
/// pairing is O(ε^{r+δ-2}), i.e. slope ≥ r+δ-2 - 0.2 (exact zeros pass).
IsozakiReport isozaki_experiment(const PropagatorEngine& eng, const SourceSpec& src, double r,
                                 const std::vector<double>& eps_list);

/// Charged source e^{iω₀t} b(t/τ) e^{-x²/σ²} (b the standard smooth bump).
SourceSpec charged_source(const SpatialGrid& g, const TimeGrid& tg, double omega0 = 1.0,
                          double tau = 2.0, double sigma = 1.0);

/// Narrow source b(t/τ) e^{-x²/(2σ²)} centered at the origin.
/// Throws ConfigError ("probe.window") when σ is below 3 cells.
SourceSpec narrow_source(const SpatialGrid& g, const TimeGrid& tg, double tau = 0.6,
                         double sigma = 0.5);

/// Gaussian-windowed temporal spectra at spacetime points. A point with t > t_src
/// expects τ > 0 (e^{+iτt} convention), one with t < t_src expects τ < 0.
struct WavefrontProbe {
  double window = 1.5;
  double threshold = 0.05;
  double source_time = 0.0;
  std::vector<double> t;
  std::vector<double> x;

  /// Points (±t_i, ±c t_i): forward cone first, then the mirrored backward cone.
  static WavefrontProbe light_cone(const std::vector<double>& times = {6.0, 8.0},
                                   double c = 0.99, double window = 1.5);
};

struct ProbeSample {
  double t = 0.0;
  double x = 0.0;
  int expected = 0;
  double energy = 0.0;
  double wrong_energy = 0.0;
  double ratio = 0.0;
};

struct WavefrontReport {
  std::vector<ProbeSample> samples;
  double peak = 0.0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  /// max_ratio < threshold.
  bool pass = false;
};

/// Throws ConfigError ("probe.window") if a window of ±5σ is clipped by the time grid
/// or wider than the periodic box.
WavefrontReport wavefront_probe(const SpacetimeFunction& u, const WavefrontProbe& probe);

}  // namespace kgprop
