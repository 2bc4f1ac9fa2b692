#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kgprop/fit.hpp"
#include "kgprop/operators.hpp"

namespace kgprop {

using ScalarField = std::function<double(double t, double x)>;

/// Spatial metric h(t,x) and potential V(t,x) of P = ∂_t² + r∂_t + a(t) on 1+1 dimensions.
class ModelMetric {
 public:
  enum class Family { Flat, Bump, Custom };

  static ModelMetric flat(double mass, double delta = 2.0);
  /// h = 1 + A s^{-δ/2}, V = m² + B s^{-δ/2}, s = 1 + t² + x². Requires |A| < 1/2, δ > 1.
  static ModelMetric bump(double mass, double A, double B, double delta);
  /// User metric. Missing time derivatives of h fall back to 4th-order central
  /// differences. `x_independent` promises h and V do not depend on x.
  static ModelMetric custom(double mass, double delta, ScalarField h, ScalarField V,
                            ScalarField dt_h = {}, ScalarField dtt_h = {},
                            bool x_independent = false, bool is_static = false);

  Family family() const { return family_; }
  std::string family_name() const;
  double mass() const { return mass_; }
  double delta() const { return delta_; }
  double A() const { return A_; }
  double B() const { return B_; }
  /// h and V depend on t only, so a(t) is a Fourier multiplier.
  bool homogeneous() const { return homogeneous_; }
  /// h and V do not depend on t.
  bool is_static() const { return static_; }

  double h(double t, double x) const { return h_(t, x); }
  double V(double t, double x) const { return V_(t, x); }
  double dt_h(double t, double x) const;
  double dtt_h(double t, double x) const;

  RVec h_samples(const SpatialGrid& g, double t) const;
  RVec V_samples(const SpatialGrid& g, double t) const;

  /// Throws InvalidMetricError if some h(t, x_j) <= 0 or is not finite.
  void validate(const SpatialGrid& g, double t) const;

  /// max_j |h - 1| + |V - m²| at time t: size of the asymptotic tail.
  double tail(const SpatialGrid& g, double t) const;

 private:
  ModelMetric() = default;
  Family family_ = Family::Flat;
  double mass_ = 1.0;
  double delta_ = 2.0;
  double A_ = 0.0;
  double B_ = 0.0;
  bool homogeneous_ = true;
  bool static_ = true;
  ScalarField h_, V_, dt_h_, dtt_h_;
};

/// a(t)u = -h^{-1/2}∂_x(h^{-1/2}∂_x u) + V u, spectral derivatives.
GridFunction apply_a(const ModelMetric& metric, double t, const GridFunction& u);
/// a(t) as an operator: a multiplier for homogeneous metrics, dense otherwise.
SpatialOp a_operator(const ModelMetric& metric, const SpatialGrid& g, double t);
/// a_out = -∂_x² + m².
SpatialOp a_asymptotic(const ModelMetric& metric, const SpatialGrid& g);

/// r = ½ ∂_t h / h.
GridFunction compute_r(const ModelMetric& metric, const SpatialGrid& g, double t);

/// r = 0 reduction P̃ = R⁻¹PR = ∂_t² + ã(t), R = (h(0,x)/h(t,x))^{1/4}.
class ReducedModel {
 public:
  ReducedModel(ModelMetric metric, SpatialGrid grid);

  const ModelMetric& base() const { return metric_; }
  const SpatialGrid& grid() const { return grid_; }
  /// h(0,x)^{1/2}: weight of the t-independent inner product (·|·)₀.
  const RVec& weight0() const { return weight0_; }

  RVec R(double t) const;
  /// ∂_t R.
  RVec dt_R(double t) const;
  /// Spatially varying scalar part -r²/4 - ½∂_t r of ã.
  RVec scalar_term(double t) const;
  /// ã(t) = R⁻¹ a(t) R - r²/4 - ½∂_t r.
  SpatialOp a_tilde(double t) const;
  /// lim_{t→±∞} R: h(0,x)^{1/4} for metrics with h → 1.
  RVec R_infinity() const;
  /// (u|v)₀ = dx Σ conj(u) v h(0,x)^{1/2}.
  cplx inner0(const CVec& u, const CVec& v) const;
  /// max over random pairs of |(ãu|v)₀ - (u|ãv)₀| / (‖ãu‖₀‖v‖₀ + ‖u‖₀‖ãv‖₀).
  double selfadjoint_residual(double t, int trials = 4, unsigned seed = 7) const;

 private:
  ModelMetric metric_;
  SpatialGrid grid_;
  RVec h0_;
  RVec weight0_;
};

ReducedModel reduce(const ModelMetric& metric, const SpatialGrid& g);

/// Log-log fit of sup over probes of ‖(a(t) - a_out)u‖_{H⁰}/‖u‖_{H²} against ⟨t⟩.
/// Flat metrics return the exact-zero flag.
LogLogFit decay_check(const ModelMetric& metric, const SpatialGrid& g,
                      const std::vector<double>& times);

}  // namespace kgprop
