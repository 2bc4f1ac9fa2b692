#pragma once

#include <limits>
#include <optional>

#include "kgprop/types.hpp"

namespace kgprop {

/// Periodic spatial grid: nodes x_j = -L/2 + jL/N, wavenumbers k_n = 2πn/L for
/// n in [-N/2, N/2). Mode data is stored in FFT slot order (slot s holds
/// n = s for s < N/2 and n = s - N otherwise).
class SpatialGrid {
 public:
  SpatialGrid(int points, double length);

  int size() const { return n_; }
  double length() const { return length_; }
  double dx() const { return length_ / n_; }
  double node(int j) const { return -0.5 * length_ + j * dx(); }
  RVec nodes() const;

  int mode_of_slot(int slot) const { return slot < n_ / 2 ? slot : slot - n_; }
  int slot_of_mode(int mode) const;
  double wavenumber(int slot) const { return 2.0 * kPi * mode_of_slot(slot) / length_; }
  /// Wavenumbers in slot order.
  RVec wavenumbers() const;
  /// Wavenumbers for odd-order derivatives: the Nyquist slot is zeroed.
  RVec derivative_wavenumbers() const;

  bool operator==(const SpatialGrid& o) const { return n_ == o.n_ && length_ == o.length_; }

 private:
  int n_;
  double length_;
};

/// Symmetric time grid on [-T, T] with an even number of steps.
class TimeGrid {
 public:
  TimeGrid(double t_max, int steps);
  /// Grid with step count round(2T/dt) forced even.
  static TimeGrid with_step(double t_max, double dt);

  double t_min() const { return -t_max_; }
  double t_max() const { return t_max_; }
  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double dt() const { return 2.0 * t_max_ / steps_; }
  double time(int n) const { return -t_max_ + n * dt(); }
  /// Index of the node at time t; throws ShapeError if t is not a node.
  int index_of(double t, double tol = 1e-9) const;

  bool operator==(const TimeGrid& o) const { return steps_ == o.steps_ && t_max_ == o.t_max_; }

 private:
  double t_max_;
  int steps_;
};

struct GridFunction {
  SpatialGrid grid;
  CVec values;

  GridFunction(SpatialGrid g, CVec v);
  static GridFunction zeros(const SpatialGrid& g) { return {g, CVec::Zero(g.size())}; }
  template <class F>
  static GridFunction sample(const SpatialGrid& g, F&& f) {
    CVec v(g.size());
    for (int j = 0; j < g.size(); ++j) v[j] = f(g.node(j));
    return {g, std::move(v)};
  }
};

/// Mode coefficients c_n = (1/N) Σ_j u_j e^{-i k_n x_j}, so u_j = Σ_n c_n e^{i k_n x_j}.
struct ModeVector {
  SpatialGrid grid;
  CVec coeffs;  // slot order

  cplx mode(int n) const { return coeffs[grid.slot_of_mode(n)]; }
};

ModeVector dft(const GridFunction& u);
GridFunction idft(const ModeVector& c);

/// Raw slot-order coefficients of a nodal vector (same normalization as dft).
CVec to_modes(const SpatialGrid& g, const CVec& nodal);
CVec to_nodes(const SpatialGrid& g, const CVec& modes);

/// Spectral derivative of order `order` of nodal samples.
CVec spectral_derivative(const SpatialGrid& g, const CVec& nodal, int order = 1);

/// Plain quadrature dx Σ conj(u) v.
cplx l2_inner(const GridFunction& u, const GridFunction& v);

/// ‖u‖_{H^m}² = L Σ_n (1 + k_n²)^m |c_n|²; m = 0 is the L² quadrature norm.
double sobolev_norm(const GridFunction& u, double m);

/// A pair of fields on one grid: Cauchy data (u, i⁻¹∂_t u) or diagonalized data.
struct TwoComponent {
  GridFunction c0;
  GridFunction c1;

  TwoComponent(GridFunction a, GridFunction b);
  static TwoComponent zeros(const SpatialGrid& g) {
    return {GridFunction::zeros(g), GridFunction::zeros(g)};
  }
  const SpatialGrid& grid() const { return c0.grid; }
  /// Stacked nodal vector (c0; c1).
  CVec stacked() const;
  static TwoComponent from_stacked(const SpatialGrid& g, const CVec& v);
};

/// E^m = H^{m+1} ⊕ H^m.
double energy_norm(const TwoComponent& f, double m);

/// Space-time samples, rows indexed by time node. `dt_values`, when present,
/// carries ∂_t of the field exactly as produced by an evolution.
struct SpacetimeFunction {
  SpatialGrid grid;
  TimeGrid time;
  CRowMat values;
  std::optional<CRowMat> dt_values;

  SpacetimeFunction(SpatialGrid g, TimeGrid t);
  SpacetimeFunction(SpatialGrid g, TimeGrid t, CRowMat v);

  GridFunction slice(int n) const;
  void set_slice(int n, const CVec& v) { values.row(n) = v.transpose(); }
  template <class F>
  static SpacetimeFunction sample(const SpatialGrid& g, const TimeGrid& tg, F&& f) {
    SpacetimeFunction out(g, tg);
    for (int n = 0; n < tg.nodes(); ++n)
      for (int j = 0; j < g.size(); ++j) out.values(n, j) = f(tg.time(n), g.node(j));
    return out;
  }
};

/// ‖⟨t⟩^γ v‖_{L²(ℝ; H^m)} with the time integral by the trapezoid rule.
/// Requires 1/2 < γ < 1/2 + δ.
double ynorm(const SpacetimeFunction& v, double m, double gamma,
             double delta = std::numeric_limits<double>::infinity());

}  // namespace kgprop
