#include "kgprop/system.hpp"

#include <cmath>

namespace kgprop {

OperatorMatrix H_of_t(const ReducedModel& model, double t) {
  const SpatialGrid& g = model.grid();
  return OperatorMatrix::from_blocks(SpatialOp::scalar(g, 0.0), SpatialOp::scalar(g, 1.0),
                                     model.a_tilde(t), SpatialOp::scalar(g, 0.0));
}

TwoComponent rho(const SpacetimeFunction& u, double t) {
  if (!u.dt_values)
    throw ShapeError("rho needs the time derivative carried by an evolution");
  const int n = u.time.index_of(t);
  CVec d = u.dt_values->row(n).transpose();
  return {u.slice(n), GridFunction(u.grid, -kI * d)};
}

OperatorMatrix pi_pm(const SpatialGrid& g, int sign, OperatorMatrix::Kind k) {
  return sign > 0 ? OperatorMatrix::constant(g, 1.0, 0.0, 0.0, 0.0, k)
                  : OperatorMatrix::constant(g, 0.0, 0.0, 0.0, 1.0, k);
}

OperatorMatrix q_ad(const SpatialGrid& g, OperatorMatrix::Kind k) {
  return OperatorMatrix::constant(g, 1.0, 0.0, 0.0, -1.0, k);
}

OperatorMatrix q_E(const SpatialGrid& g, OperatorMatrix::Kind k) {
  return OperatorMatrix::constant(g, 0.0, 1.0, 1.0, 0.0, k);
}

OperatorMatrix c_spectral(int sign, const SpatialOp& a) {
  return c_spectral(sign, a, RVec::Ones(a.grid().size()));
}

OperatorMatrix c_spectral(int sign, const SpatialOp& a, const RVec& weight) {
  const WeightedSpectrum spec(a, weight);
  if (!(spec.min_eigenvalue() > 0.0))
    throw InvalidMetricError("c_spectral: operator is not strictly positive");
  const double s = sign > 0 ? 1.0 : -1.0;
  const SpatialGrid& g = a.grid();
  const SpatialOp half = SpatialOp::scalar(g, 0.5);
  const SpatialOp up = spec.apply_function([s](double l) { return 0.5 * s * std::sqrt(l); });
  const SpatialOp dn = spec.apply_function([s](double l) { return 0.5 * s / std::sqrt(l); });
  return OperatorMatrix::from_blocks(half, dn, up, half);
}

double hnorm(const TwoComponent& f, double m) {
  const double a = sobolev_norm(f.c0, m);
  const double b = sobolev_norm(f.c1, m);
  return std::sqrt(a * a + b * b);
}

cplx pair0(const CVec& f, const CVec& g, const RVec& weight, double dx) {
  const int n = static_cast<int>(weight.size());
  if (f.size() != 2 * n || g.size() != 2 * n) throw ShapeError("pair0: size mismatch");
  cplx s = 0.0;
  for (int i = 0; i < 2 * n; ++i) s += std::conj(f[i]) * g[i] * weight[i % n];
  return s * dx;
}

cplx charge_residual(const OperatorMatrix& H, const TwoComponent& f, const TwoComponent& g,
                     const RVec& weight) {
  const SpatialGrid& grid = H.grid();
  const OperatorMatrix q = q_E(grid);
  const CVec Hf = H.apply(f).stacked();
  const CVec Hg = H.apply(g).stacked();
  const CVec qf = q.apply(f).stacked();
  const CVec qg = q.apply(g).stacked();
  return pair0(Hf, qg, weight, grid.dx()) - pair0(qf, Hg, weight, grid.dx());
}

}  // namespace kgprop
