#pragma once

#include <string>

#include "kgprop/propagators.hpp"

namespace kgprop {

/// Flat-space Fourier multiplier inverses under u(t,x) = Σ e^{i(τt + kx)} û with
/// symbol P̂ = -τ² + k² + m².
///   ret: τ → τ - iε,  adv: τ → τ + iε,
///   feyn: v̂/(P̂ + iε),  antifeyn: v̂/(P̂ - iε).
struct MultiplierSpec {
  enum class Kind { Retarded, Advanced, Feynman, AntiFeynman };
  Kind kind = Kind::Feynman;
  double epsilon = 4e-3;
  /// Length of the zero-padded temporal window; 0 picks one long enough that
  /// the periodic images of the regularized kernel fall below ~1e-6 of each
  /// mode's share of the source.
  double window = 0.0;
  /// Run at ε and ε/2 and combine linearly (first-order Richardson).
  bool extrapolate = true;
};

MultiplierSpec::Kind parse_multiplier_kind(const std::string& s);

/// Requires a flat model. Output samples lie on v's grids.
SpacetimeFunction flat_multiplier(const MultiplierSpec& spec, double mass,
                                  const SpacetimeFunction& v);

/// Dense Feynman solve. Schemes:
///  - Centered2: scalar unknowns u_n, centered second differences of P̃u = ṽ on
///    interior nodes, and N rows each of π⁺T⁻¹ρ(T_min) = 0, π⁻T⁻¹ρ(T_max) = 0 with
///    one-sided 2nd-order ∂_t. (Nt-1)N + 2N = (Nt+1)N rows.
///  - Propagator: ρũ unknowns, one-step rows with the full-H propagators (same
///    discrete system as the time-stepped pipeline on static metrics).
///  - Adiabatic: w^ad unknowns, the discrete system solved by G^ad_F.
struct DenseReport {
  double sigma_min = 0.0;
  double rcond = 0.0;
  /// max |row residual| after the solve.
  double row_residual = 0.0;
  long unknowns = 0;
};

enum class DenseScheme { Centered2, Propagator, Adiabatic };
DenseScheme parse_dense_scheme(const std::string& s);

SpacetimeFunction dense_feynman(const PropagatorEngine& eng, const SpacetimeFunction& v,
                                DenseScheme scheme = DenseScheme::Centered2,
                                DenseReport* report = nullptr, int max_unknowns = 6000);

/// u(t,x) = ∫∫ G(t-s, x-y) f(s,y) ds dy for G = ½ θ(t-|x|) J₀(m√(t²-x²)) on ℝ,
/// by Gauss-Legendre quadrature in s over [s0, min(s1, t)] and in y over the
/// light cone cut to [y0, y1] (f is taken as negligible outside). Only rows
/// n with n % stride == 0 are evaluated; the others stay zero.
template <class F>
SpacetimeFunction retarded_green_convolution(const SpatialGrid& g, const TimeGrid& tg,
                                             double mass, F&& f, double s0, double s1,
                                             double y0, double y1, int stride = 1,
                                             int s_nodes = 48, int y_nodes = 64);

/// ½ θ(t - |x|) J₀(m √(t² - x²)).
double retarded_green_1d(double t, double x, double mass);

}  // namespace kgprop

#include "kgprop/oracle_impl.hpp"
