#include "kgprop/model.hpp"

#include <cmath>
#include <random>

namespace kgprop {

namespace {

double fd1(const ScalarField& f, double t, double x) {
  constexpr double e = 1e-3;
  return (-f(t + 2 * e, x) + 8 * f(t + e, x) - 8 * f(t - e, x) + f(t - 2 * e, x)) / (12 * e);
}

double fd2(const ScalarField& f, double t, double x) {
  constexpr double e = 1e-2;
  return (-f(t + 2 * e, x) + 16 * f(t + e, x) - 30 * f(t, x) + 16 * f(t - e, x) -
          f(t - 2 * e, x)) /
         (12 * e * e);
}

void check_common(double mass, double delta) {
  if (!(mass > 0.0)) throw ConfigError("mass", "mass must be positive");
  if (!(delta > 1.0)) throw ConfigError("metric.delta", "metric.delta must exceed 1");
}

}  // namespace

ModelMetric ModelMetric::flat(double mass, double delta) {
  check_common(mass, delta);
  ModelMetric m;
  m.family_ = Family::Flat;
  m.mass_ = mass;
  m.delta_ = delta;
  const double m2 = mass * mass;
  m.h_ = [](double, double) { return 1.0; };
  m.V_ = [m2](double, double) { return m2; };
  m.dt_h_ = [](double, double) { return 0.0; };
  m.dtt_h_ = [](double, double) { return 0.0; };
  return m;
}

ModelMetric ModelMetric::bump(double mass, double A, double B, double delta) {
  check_common(mass, delta);
  if (!(std::abs(A) < 0.5)) throw ConfigError("metric.A", "metric.A must satisfy |A| < 1/2");
  if (!std::isfinite(B)) throw ConfigError("metric.B", "metric.B must be finite");
  ModelMetric m;
  m.family_ = Family::Bump;
  m.mass_ = mass;
  m.delta_ = delta;
  m.A_ = A;
  m.B_ = B;
  m.homogeneous_ = false;
  m.static_ = (A == 0.0 && B == 0.0);
  const double m2 = mass * mass;
  const double hd = 0.5 * delta;
  m.h_ = [A, hd](double t, double x) { return 1.0 + A * std::pow(1.0 + t * t + x * x, -hd); };
  m.V_ = [m2, B, hd](double t, double x) { return m2 + B * std::pow(1.0 + t * t + x * x, -hd); };
  m.dt_h_ = [A, delta, hd](double t, double x) {
    const double s = 1.0 + t * t + x * x;
    return -A * delta * t * std::pow(s, -hd - 1.0);
  };
  m.dtt_h_ = [A, delta, hd](double t, double x) {
    const double s = 1.0 + t * t + x * x;
    return -A * delta * std::pow(s, -hd - 2.0) * (s - (delta + 2.0) * t * t);
  };
  return m;
}

ModelMetric ModelMetric::custom(double mass, double delta, ScalarField h, ScalarField V,
                                ScalarField dt_h, ScalarField dtt_h, bool x_independent,
                                bool is_static) {
  check_common(mass, delta);
  if (!h || !V) throw ConfigError("metric.family", "custom metric needs both h and V");
  ModelMetric m;
  m.family_ = Family::Custom;
  m.mass_ = mass;
  m.delta_ = delta;
  m.homogeneous_ = x_independent;
  m.static_ = is_static;
  m.h_ = std::move(h);
  m.V_ = std::move(V);
  m.dt_h_ = std::move(dt_h);
  m.dtt_h_ = std::move(dtt_h);
  if (is_static) {
    m.dt_h_ = [](double, double) { return 0.0; };
    m.dtt_h_ = [](double, double) { return 0.0; };
  }
  return m;
}

std::string ModelMetric::family_name() const {
  switch (family_) {
    case Family::Flat: return "flat";
    case Family::Bump: return "bump";
    default: return "custom";
  }
}

double ModelMetric::dt_h(double t, double x) const {
  return dt_h_ ? dt_h_(t, x) : fd1(h_, t, x);
}

double ModelMetric::dtt_h(double t, double x) const {
  return dtt_h_ ? dtt_h_(t, x) : fd2(h_, t, x);
}

RVec ModelMetric::h_samples(const SpatialGrid& g, double t) const {
  RVec v(g.size());
  for (int j = 0; j < g.size(); ++j) v[j] = h_(t, g.node(j));
  return v;
}

RVec ModelMetric::V_samples(const SpatialGrid& g, double t) const {
  RVec v(g.size());
  for (int j = 0; j < g.size(); ++j) v[j] = V_(t, g.node(j));
  return v;
}

void ModelMetric::validate(const SpatialGrid& g, double t) const {
  const RVec h = h_samples(g, t);
  for (int j = 0; j < g.size(); ++j)
    if (!(h[j] > 0.0) || !std::isfinite(h[j]))
      throw InvalidMetricError("h(" + std::to_string(t) + ", " + std::to_string(g.node(j)) +
                               ") = " + std::to_string(h[j]) + " is not positive");
  const RVec V = V_samples(g, t);
  if (!V.allFinite()) throw InvalidMetricError("V is not finite at t = " + std::to_string(t));
}

double ModelMetric::tail(const SpatialGrid& g, double t) const {
  const RVec h = h_samples(g, t);
  const RVec V = V_samples(g, t);
  return (h.array() - 1.0).abs().maxCoeff() + (V.array() - mass_ * mass_).abs().maxCoeff();
}

GridFunction apply_a(const ModelMetric& metric, double t, const GridFunction& u) {
  const SpatialGrid& g = u.grid;
  metric.validate(g, t);
  const RVec h = metric.h_samples(g, t);
  const RVec V = metric.V_samples(g, t);
  const RVec isq = h.cwiseSqrt().cwiseInverse();
  CVec w = spectral_derivative(g, u.values, 1);
  w = isq.cwiseProduct(w);
  w = spectral_derivative(g, w, 1);
  CVec out = -isq.cwiseProduct(w) + V.cwiseProduct(u.values);
  return {g, std::move(out)};
}

SpatialOp a_operator(const ModelMetric& metric, const SpatialGrid& g, double t) {
  metric.validate(g, t);
  if (metric.homogeneous()) {
    const double h = metric.h(t, 0.0);
    const double V = metric.V(t, 0.0);
    const RVec k = g.derivative_wavenumbers();
    CVec sym = (k.array().square() / h + V).cast<cplx>().matrix();
    return SpatialOp::multiplier(g, std::move(sym));
  }
  const RMat& D = derivative_matrix(g);
  const RVec isq = metric.h_samples(g, t).cwiseSqrt().cwiseInverse();
  RMat a = -(isq.asDiagonal() * D * isq.asDiagonal() * D);
  a.diagonal() += metric.V_samples(g, t);
  return SpatialOp::dense(g, a.cast<cplx>());
}

SpatialOp a_asymptotic(const ModelMetric& metric, const SpatialGrid& g) {
  const RVec k = g.derivative_wavenumbers();
  const double m2 = metric.mass() * metric.mass();
  return SpatialOp::multiplier(g, (k.array().square() + m2).cast<cplx>().matrix());
}

GridFunction compute_r(const ModelMetric& metric, const SpatialGrid& g, double t) {
  CVec r(g.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    r[j] = 0.5 * metric.dt_h(t, x) / metric.h(t, x);
  }
  return {g, std::move(r)};
}

ReducedModel::ReducedModel(ModelMetric metric, SpatialGrid grid)
    : metric_(std::move(metric)), grid_(grid) {
  metric_.validate(grid_, 0.0);
  h0_ = metric_.h_samples(grid_, 0.0);
  weight0_ = h0_.cwiseSqrt();
}

RVec ReducedModel::R(double t) const {
  if (metric_.is_static()) return RVec::Ones(grid_.size());
  return (h0_.array() / metric_.h_samples(grid_, t).array()).pow(0.25).matrix();
}

RVec ReducedModel::dt_R(double t) const {
  const RVec r = compute_r(metric_, grid_, t).values.real();
  return (-0.5 * r.array() * R(t).array()).matrix();
}

RVec ReducedModel::scalar_term(double t) const {
  const int n = grid_.size();
  RVec s(n);
  if (metric_.is_static()) return RVec::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid_.node(j);
    const double h = metric_.h(t, x);
    const double q = metric_.dt_h(t, x) / h;
    const double r = 0.5 * q;
    const double dr = 0.5 * (metric_.dtt_h(t, x) / h - q * q);
    s[j] = -0.25 * r * r - 0.5 * dr;
  }
  return s;
}

SpatialOp ReducedModel::a_tilde(double t) const {
  const SpatialOp a = a_operator(metric_, grid_, t);
  const RVec s = scalar_term(t);
  if (a.kind() == SpatialOp::Kind::Multiplier) {
    // R and the scalar term are spatially constant here.
    return SpatialOp::multiplier(grid_, a.symbol().array() + s[0]);
  }
  const RVec Rt = R(t);
  CMat m = Rt.cwiseInverse().asDiagonal() * a.matrix() * Rt.asDiagonal();
  m.diagonal() += s.cast<cplx>();
  return SpatialOp::dense(grid_, std::move(m));
}

RVec ReducedModel::R_infinity() const { return h0_.array().pow(0.25).matrix(); }

cplx ReducedModel::inner0(const CVec& u, const CVec& v) const {
  return grid_.dx() * u.dot(weight0_.cast<cplx>().cwiseProduct(v));
}

double ReducedModel::selfadjoint_residual(double t, int trials, unsigned seed) const {
  const SpatialOp at = a_tilde(t);
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  const int n = grid_.size();
  auto random_vec = [&] {
    CVec v(n);
    for (int j = 0; j < n; ++j) v[j] = cplx(nd(rng), nd(rng));
    return v;
  };
  auto norm0 = [&](const CVec& v) { return std::sqrt(std::abs(inner0(v, v))); };
  double worst = 0.0;
  for (int i = 0; i < trials; ++i) {
    const CVec u = random_vec();
    const CVec v = random_vec();
    const CVec au = at.apply(u, Basis::Nodes);
    const CVec av = at.apply(v, Basis::Nodes);
    const double num = std::abs(inner0(au, v) - inner0(u, av));
    const double den = norm0(au) * norm0(v) + norm0(u) * norm0(av);
    worst = std::max(worst, num / den);
  }
  return worst;
}

ReducedModel reduce(const ModelMetric& metric, const SpatialGrid& g) { return {metric, g}; }

LogLogFit decay_check(const ModelMetric& metric, const SpatialGrid& g,
                      const std::vector<double>& times) {
  if (times.size() < 3) throw NumericalError("decay_check: need at least 3 times");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])))
      throw NumericalError("decay_check: times must be positive and increasing");
  // Probe set: Gaussians of width 1 near the origin, plain and modulated.
  std::vector<GridFunction> probes;
  for (double c : {-2.0, 0.0, 2.0})
    for (double k : {0.0, 2.0})
      probes.push_back(GridFunction::sample(g, [c, k](double x) {
        return std::exp(-(x - c) * (x - c)) * std::exp(kI * k * x);
      }));
  const SpatialOp aout = a_asymptotic(metric, g);
  std::vector<double> xs, ys;
  double scale = 0.0;
  for (double t : times) {
    double worst = 0.0;
    for (const auto& u : probes) {
      const GridFunction au = apply_a(metric, t, u);
      const GridFunction d(g, au.values - aout.apply(u.values, Basis::Nodes));
      worst = std::max(worst, sobolev_norm(d, 0.0) / sobolev_norm(u, 2.0));
      scale = std::max(scale, sobolev_norm(au, 0.0) / sobolev_norm(u, 2.0));
    }
    xs.push_back(std::sqrt(1.0 + t * t));
    ys.push_back(worst);
  }
  return fit_loglog(xs, ys, 1e-14 * std::max(scale, 1.0));
}

}  // namespace kgprop
