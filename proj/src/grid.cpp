#include "kgprop/grid.hpp"

#include <cmath>

#include "kgprop/fft.hpp"

namespace kgprop {

SpatialGrid::SpatialGrid(int points, double length) : n_(points), length_(length) {
  if (points < 8 || points % 2 != 0)
    throw ConfigError("grid.N", "grid.N must be even and >= 8, got " + std::to_string(points));
  if (!(length > 0.0)) throw ConfigError("grid.L", "grid.L must be positive");
}

RVec SpatialGrid::nodes() const {
  RVec x(n_);
  for (int j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

int SpatialGrid::slot_of_mode(int mode) const {
  if (mode < -n_ / 2 || mode >= n_ / 2)
    throw ShapeError("mode index " + std::to_string(mode) + " outside [-N/2, N/2)");
  return mode >= 0 ? mode : mode + n_;
}

RVec SpatialGrid::wavenumbers() const {
  RVec k(n_);
  for (int s = 0; s < n_; ++s) k[s] = wavenumber(s);
  return k;
}

RVec SpatialGrid::derivative_wavenumbers() const {
  RVec k = wavenumbers();
  k[n_ / 2] = 0.0;
  return k;
}

TimeGrid::TimeGrid(double t_max, int steps) : t_max_(t_max), steps_(steps) {
  if (!(t_max > 0.0)) throw ConfigError("time.Tmax", "time.Tmax must be positive");
  if (steps < 2 || steps % 2 != 0)
    throw ConfigError("time.dt", "time grid needs an even step count >= 2 so that t = 0 is a node");
}

TimeGrid TimeGrid::with_step(double t_max, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time.dt", "time.dt must be positive");
  int steps = static_cast<int>(std::lround(2.0 * t_max / dt));
  if (steps % 2 != 0) ++steps;
  return TimeGrid(t_max, std::max(steps, 2));
}

int TimeGrid::index_of(double t, double tol) const {
  const double pos = (t - t_min()) / dt();
  const long idx = std::lround(pos);
  if (idx < 0 || idx > steps_ || std::abs(pos - idx) > tol)
    throw ShapeError("time " + std::to_string(t) + " is not a node of the time grid");
  return static_cast<int>(idx);
}

GridFunction::GridFunction(SpatialGrid g, CVec v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw ShapeError("grid function length " + std::to_string(values.size()) +
                     " does not match grid size " + std::to_string(grid.size()));
}

TwoComponent::TwoComponent(GridFunction a, GridFunction b) : c0(std::move(a)), c1(std::move(b)) {
  if (!(c0.grid == c1.grid)) throw ShapeError("two-component fields on different grids");
}

CVec TwoComponent::stacked() const {
  const int n = grid().size();
  CVec v(2 * n);
  v.head(n) = c0.values;
  v.tail(n) = c1.values;
  return v;
}

TwoComponent TwoComponent::from_stacked(const SpatialGrid& g, const CVec& v) {
  const int n = g.size();
  if (v.size() != 2 * n) throw ShapeError("stacked vector length mismatch");
  return {GridFunction(g, v.head(n)), GridFunction(g, v.tail(n))};
}

CVec to_modes(const SpatialGrid& g, const CVec& nodal) {
  if (nodal.size() != g.size()) throw ShapeError("to_modes: size mismatch");
  CVec c = fft::forward(nodal);
  const int n = g.size();
  // e^{-i k x_0} with x_0 = -L/2 gives the factor (-1)^n.
  for (int s = 0; s < n; ++s) {
    c[s] /= static_cast<double>(n);
    if (g.mode_of_slot(s) % 2 != 0) c[s] = -c[s];
  }
  return c;
}

CVec to_nodes(const SpatialGrid& g, const CVec& modes) {
  if (modes.size() != g.size()) throw ShapeError("to_nodes: size mismatch");
  CVec c = modes;
  for (int s = 0; s < g.size(); ++s)
    if (g.mode_of_slot(s) % 2 != 0) c[s] = -c[s];
  return fft::backward(c);
}

ModeVector dft(const GridFunction& u) { return {u.grid, to_modes(u.grid, u.values)}; }

GridFunction idft(const ModeVector& c) { return {c.grid, to_nodes(c.grid, c.coeffs)}; }

CVec spectral_derivative(const SpatialGrid& g, const CVec& nodal, int order) {
  CVec c = to_modes(g, nodal);
  const RVec k = (order % 2 == 1) ? g.derivative_wavenumbers() : g.wavenumbers();
  for (int s = 0; s < g.size(); ++s) c[s] *= std::pow(kI * k[s], order);
  return to_nodes(g, c);
}

cplx l2_inner(const GridFunction& u, const GridFunction& v) {
  if (!(u.grid == v.grid)) throw ShapeError("l2_inner: grid mismatch");
  return u.grid.dx() * u.values.dot(v.values);
}

double sobolev_norm(const GridFunction& u, double m) {
  const CVec c = to_modes(u.grid, u.values);
  const RVec k = u.grid.wavenumbers();
  double sum = 0.0;
  for (int s = 0; s < u.grid.size(); ++s)
    sum += std::pow(1.0 + k[s] * k[s], m) * std::norm(c[s]);
  return std::sqrt(u.grid.length() * sum);
}

double energy_norm(const TwoComponent& f, double m) {
  const double a = sobolev_norm(f.c0, m + 1.0);
  const double b = sobolev_norm(f.c1, m);
  return std::sqrt(a * a + b * b);
}

SpacetimeFunction::SpacetimeFunction(SpatialGrid g, TimeGrid t)
    : grid(g), time(t), values(CRowMat::Zero(t.nodes(), g.size())) {}

SpacetimeFunction::SpacetimeFunction(SpatialGrid g, TimeGrid t, CRowMat v)
    : grid(g), time(t), values(std::move(v)) {
  if (values.rows() != time.nodes() || values.cols() != grid.size())
    throw ShapeError("spacetime array shape does not match grids");
}

GridFunction SpacetimeFunction::slice(int n) const {
  if (n < 0 || n >= time.nodes()) throw ShapeError("time slice out of range");
  return {grid, values.row(n).transpose()};
}

double ynorm(const SpacetimeFunction& v, double m, double gamma, double delta) {
  if (!(gamma > 0.5) || !(gamma < 0.5 + delta))
    throw ConfigError("gamma", "gamma must satisfy 1/2 < gamma < 1/2 + delta");
  const TimeGrid& tg = v.time;
  double sum = 0.0;
  for (int n = 0; n < tg.nodes(); ++n) {
    const double t = tg.time(n);
    const double w = (n == 0 || n == tg.steps()) ? 0.5 : 1.0;
    const double s = sobolev_norm(v.slice(n), m);
    sum += w * std::pow(1.0 + t * t, gamma) * s * s;
  }
  return std::sqrt(sum * tg.dt());
}

}  // namespace kgprop
