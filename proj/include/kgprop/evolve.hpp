#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kgprop/diag.hpp"

namespace kgprop {

/// Time steppers for ∂_t w = i G(t) w.
///  - Magnus4: commutator-free 4th-order Magnus (two exponentials, Gauss nodes).
///  - RK4: classical Runge-Kutta, used as an independent cross-check.
enum class Integrator { Magnus4, RK4 };

/// Config spelling: "magnus2" (two-exponential Magnus) and "rk4".
Integrator parse_integrator(const std::string& name);
std::string integrator_name(Integrator i);

/// Time-dependent generator G(t) on one spatial grid.
class Generator {
 public:
  enum class Family { Full, Adiabatic, Diagonal, Constant, Custom };

  /// H(t) of the reduced problem.
  static Generator full(const ReducedModel& model);
  /// H^ad(t) = Hd + Vad.
  static Generator adiabatic(const ReducedModel& model, double fd_step = 1e-3);
  /// Hd(t) = diag(ε, -ε).
  static Generator diagonal(const ReducedModel& model);
  static Generator constant(OperatorMatrix g);
  static Generator custom(const SpatialGrid& grid, std::function<OperatorMatrix(double)> g,
                          bool time_independent = false);

  OperatorMatrix operator()(double t) const { return fn_(t); }
  Family family() const { return family_; }
  bool time_independent() const { return time_independent_; }
  const SpatialGrid& grid() const { return grid_; }

 private:
  Generator(SpatialGrid g, Family f, std::function<OperatorMatrix(double)> fn, bool ti)
      : grid_(g), family_(f), fn_(std::move(fn)), time_independent_(ti) {}
  SpatialGrid grid_;
  Family family_;
  std::function<OperatorMatrix(double)> fn_;
  bool time_independent_;
};

/// Cauchy evolution on a TimeGrid: step propagators S_n = U(t_{n+1}, t_n) and
/// their inverses, built once. Time-independent generators store one step.
class Evolution {
 public:
  Evolution(Generator gen, TimeGrid tg, Integrator integ = Integrator::Magnus4,
            double blowup_factor = 1e6);

  const TimeGrid& time() const { return time_; }
  const SpatialGrid& grid() const { return gen_.grid(); }
  const Generator& generator() const { return gen_; }
  Integrator integrator() const { return integ_; }
  Basis basis() const { return basis_; }

  const OperatorMatrix& step(int n) const;
  const OperatorMatrix& step_inverse(int n) const;
  /// S_n w and S_n⁻¹ w for stacked vectors in basis().
  CVec advance(const CVec& w, int n) const { return step(n).apply(w); }
  CVec retreat(const CVec& w, int n) const { return step_inverse(n).apply(w); }

  /// U(t_to, t_from) w, stacked vectors in basis().
  CVec propagate(const CVec& w, int from, int to) const;
  /// U(t, s) f for grid times s, t. Throws NumericalError on blow-up.
  TwoComponent evolve(const TwoComponent& f, double s, double t) const;

 private:
  Generator gen_;
  TimeGrid time_;
  Integrator integ_;
  double blowup_;
  Basis basis_;
  std::vector<OperatorMatrix> steps_;
  std::vector<OperatorMatrix> inverses_;
};

/// One step S = U(t + h, t) of the chosen integrator, and its inverse.
std::pair<OperatorMatrix, OperatorMatrix> step_operator(const Generator& g, double t, double h,
                                                        Integrator integ);

/// Asymptotic generator: diag(ω, -ω) (diagonal frame) or [[0,1],[ω²,0]],
/// ω = (k² + m²)^{1/2} with k the derivative wavenumbers.
OperatorMatrix asymptotic_generator(const SpatialGrid& g, double mass, bool diagonal = true);
/// Exact e^{i(t-s) diag(ω, -ω)} applied to diagonalized data.
TwoComponent evolve_asymptotic(const TwoComponent& f, double mass, double s, double t);

struct ConservationReport {
  std::vector<double> times;
  std::vector<cplx> values;
  double max_drift = 0.0;
  double reference = 0.0;
};

/// Tracks (U(t,s)f | q U(t,s)f)₀ over the grid times from s to t.
ConservationReport conservation_monitor(const Evolution& evo, const TwoComponent& f,
                                        const OperatorMatrix& q, const RVec& weight, double s,
                                        double t);

/// sup over probes and grid times of ‖U(t,0) f‖_{ℋ⁰}/‖f‖_{ℋ⁰}; `stride` thins the times.
double bound_monitor(const Evolution& evo, const std::vector<TwoComponent>& probes,
                     int stride = 1);

/// Default probe set for bound_monitor: Gaussians in each component.
std::vector<TwoComponent> default_probes(const SpatialGrid& g);

}  // namespace kgprop
