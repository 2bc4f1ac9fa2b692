#include "kgprop/evolve.hpp"

#include <cmath>

namespace kgprop {

Integrator parse_integrator(const std::string& name) {
  if (name == "magnus2" || name == "magnus" || name == "magnus4") return Integrator::Magnus4;
  if (name == "rk4") return Integrator::RK4;
  throw ConfigError("evolve.integrator", "unknown integrator '" + name + "'");
}

std::string integrator_name(Integrator i) { return i == Integrator::RK4 ? "rk4" : "magnus2"; }

Generator Generator::full(const ReducedModel& model) {
  return {model.grid(), Family::Full, [model](double t) { return H_of_t(model, t); },
          model.base().is_static()};
}

Generator Generator::adiabatic(const ReducedModel& model, double fd_step) {
  return {model.grid(), Family::Adiabatic,
          [model, fd_step](double t) { return build_frame(model, t, fd_step).H_ad(); },
          model.base().is_static()};
}

Generator Generator::diagonal(const ReducedModel& model) {
  return {model.grid(), Family::Diagonal,
          [model](double t) {
            const SpatialOp e = sqrt_a(model, t);
            const SpatialOp z = SpatialOp::scalar(model.grid(), 0.0);
            return OperatorMatrix::from_blocks(e, z, z, e.scaled(-1.0));
          },
          model.base().is_static()};
}

Generator Generator::constant(OperatorMatrix g) {
  const SpatialGrid grid = g.grid();
  return {grid, Family::Constant, [g](double) { return g; }, true};
}

Generator Generator::custom(const SpatialGrid& grid, std::function<OperatorMatrix(double)> g,
                            bool time_independent) {
  return {grid, Family::Custom, std::move(g), time_independent};
}

namespace {

void same_kind(OperatorMatrix& a, OperatorMatrix& b) {
  if (a.kind() != b.kind()) {
    a = a.as_dense();
    b = b.as_dense();
  }
}

}  // namespace

std::pair<OperatorMatrix, OperatorMatrix> step_operator(const Generator& g, double t, double h,
                                                        Integrator integ) {
  if (integ == Integrator::Magnus4) {
    const double r3 = std::sqrt(3.0);
    const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
    const double a1 = 0.25 + r3 / 6.0, a2 = 0.25 - r3 / 6.0;
    OperatorMatrix A1 = g(t + c1 * h);
    OperatorMatrix A2 = g(t + c2 * h);
    same_kind(A1, A2);
    const OperatorMatrix first = A1.scaled(a1) + A2.scaled(a2);
    const OperatorMatrix second = A1.scaled(a2) + A2.scaled(a1);
    OperatorMatrix S = exp_i(second, h) * exp_i(first, h);
    // S is near-unitary, so LU inversion is as accurate as two more exponentials.
    OperatorMatrix Si = S.inverse();
    return {std::move(S), std::move(Si)};
  }
  // The RK4 stage recursion applied to the identity yields the step matrix.
  OperatorMatrix A1 = g(t).scaled(kI);
  OperatorMatrix A2 = g(t + 0.5 * h).scaled(kI);
  OperatorMatrix A3 = g(t + h).scaled(kI);
  same_kind(A1, A2);
  same_kind(A1, A3);
  same_kind(A2, A3);
  const OperatorMatrix I = OperatorMatrix::identity(A1.grid(), A1.kind());
  const OperatorMatrix K1 = A1;
  const OperatorMatrix K2 = A2 * (I + K1.scaled(0.5 * h));
  const OperatorMatrix K3 = A2 * (I + K2.scaled(0.5 * h));
  const OperatorMatrix K4 = A3 * (I + K3.scaled(h));
  OperatorMatrix S = I + (K1 + K2.scaled(2.0) + K3.scaled(2.0) + K4).scaled(h / 6.0);
  OperatorMatrix Si = S.inverse();
  return {std::move(S), std::move(Si)};
}

Evolution::Evolution(Generator gen, TimeGrid tg, Integrator integ, double blowup_factor)
    : gen_(std::move(gen)), time_(tg), integ_(integ), blowup_(blowup_factor),
      basis_(Basis::Modes) {
  const int count = gen_.time_independent() ? 1 : time_.steps();
  steps_.reserve(count);
  inverses_.reserve(count);
  for (int n = 0; n < count; ++n) {
    auto [S, Si] = step_operator(gen_, time_.time(n), time_.dt(), integ_);
    steps_.push_back(std::move(S));
    inverses_.push_back(std::move(Si));
  }
  basis_ = steps_.front().basis();
}

const OperatorMatrix& Evolution::step(int n) const {
  if (n < 0 || n >= time_.steps()) throw ShapeError("step index out of range");
  return steps_[steps_.size() == 1 ? 0 : n];
}

const OperatorMatrix& Evolution::step_inverse(int n) const {
  if (n < 0 || n >= time_.steps()) throw ShapeError("step index out of range");
  return inverses_[inverses_.size() == 1 ? 0 : n];
}

CVec Evolution::propagate(const CVec& w, int from, int to) const {
  CVec v = w;
  const double start = std::max(w.norm(), 1e-300);
  auto guard = [&](int n) {
    if (!std::isfinite(v.norm()) || v.norm() > blowup_ * start)
      throw NumericalError("evolution blow-up detected near t = " + std::to_string(time_.time(n)));
  };
  if (to >= from) {
    for (int n = from; n < to; ++n) {
      v = advance(v, n);
      guard(n + 1);
    }
  } else {
    for (int n = from; n > to; --n) {
      v = retreat(v, n - 1);
      guard(n - 1);
    }
  }
  return v;
}

TwoComponent Evolution::evolve(const TwoComponent& f, double s, double t) const {
  if (!(f.grid() == grid())) throw ShapeError("evolve: grid mismatch");
  const int from = time_.index_of(s);
  const int to = time_.index_of(t);
  return from_basis(grid(), propagate(to_basis(f, basis_), from, to), basis_);
}

OperatorMatrix asymptotic_generator(const SpatialGrid& g, double mass, bool diagonal) {
  const RVec k = g.derivative_wavenumbers();
  const CVec w2 = (k.array().square() + mass * mass).cast<cplx>().matrix();
  const int n = g.size();
  if (diagonal) {
    const CVec w = w2.cwiseSqrt();
    return OperatorMatrix::mode_blocks(g, w, CVec::Zero(n), CVec::Zero(n), -w);
  }
  return OperatorMatrix::mode_blocks(g, CVec::Zero(n), CVec::Ones(n), w2, CVec::Zero(n));
}

TwoComponent evolve_asymptotic(const TwoComponent& f, double mass, double s, double t) {
  const SpatialGrid& g = f.grid();
  const RVec k = g.derivative_wavenumbers();
  CVec a = to_modes(g, f.c0.values);
  CVec b = to_modes(g, f.c1.values);
  for (int j = 0; j < g.size(); ++j) {
    const double w = std::sqrt(k[j] * k[j] + mass * mass);
    a[j] *= std::exp(kI * (t - s) * w);
    b[j] *= std::exp(-kI * (t - s) * w);
  }
  return {GridFunction(g, to_nodes(g, a)), GridFunction(g, to_nodes(g, b))};
}

ConservationReport conservation_monitor(const Evolution& evo, const TwoComponent& f,
                                        const OperatorMatrix& q, const RVec& weight, double s,
                                        double t) {
  const SpatialGrid& g = evo.grid();
  const TimeGrid& tg = evo.time();
  const int from = tg.index_of(s);
  const int to = tg.index_of(t);
  const Basis b = evo.basis();
  CVec w = to_basis(f, b);
  ConservationReport rep;
  auto record = [&](int n) {
    const TwoComponent u = from_basis(g, w, b);
    const cplx val = pair0(u.stacked(), q.apply(u).stacked(), weight, g.dx());
    rep.times.push_back(tg.time(n));
    rep.values.push_back(val);
  };
  record(from);
  const int dir = to >= from ? 1 : -1;
  for (int n = from; n != to; n += dir) {
    w = dir > 0 ? evo.advance(w, n) : evo.retreat(w, n - 1);
    record(n + dir);
  }
  const cplx ref = rep.values.front();
  rep.reference = std::abs(ref);
  for (const cplx& v : rep.values) rep.max_drift = std::max(rep.max_drift, std::abs(v - ref));
  return rep;
}

double bound_monitor(const Evolution& evo, const std::vector<TwoComponent>& probes, int stride) {
  const TimeGrid& tg = evo.time();
  const int zero = tg.index_of(0.0);
  const Basis b = evo.basis();
  stride = std::max(stride, 1);
  double sup = 0.0;
  for (const auto& f : probes) {
    const double f0 = hnorm(f, 0.0);
    if (f0 == 0.0) continue;
    for (int dir : {1, -1}) {
      CVec w = to_basis(f, b);
      const int end = dir > 0 ? tg.steps() : 0;
      for (int n = zero; n != end; n += dir) {
        w = dir > 0 ? evo.advance(w, n) : evo.retreat(w, n - 1);
        const int m = n + dir;
        if (m % stride == 0 || m == end)
          sup = std::max(sup, hnorm(from_basis(evo.grid(), w, b), 0.0) / f0);
      }
    }
  }
  return sup;
}

std::vector<TwoComponent> default_probes(const SpatialGrid& g) {
  std::vector<TwoComponent> out;
  for (double c : {-1.0, 0.0, 1.0}) {
    auto bump = [c](double x) { return std::exp(-(x - c) * (x - c)); };
    out.push_back({GridFunction::sample(g, bump), GridFunction::zeros(g)});
    out.push_back({GridFunction::zeros(g), GridFunction::sample(g, bump)});
  }
  return out;
}

}  // namespace kgprop
