#include "kgprop/oracle.hpp"

#include <cmath>

#include "kgprop/fft.hpp"
#include "kgprop/linalg.hpp"

namespace kgprop {

MultiplierSpec::Kind parse_multiplier_kind(const std::string& s) {
  if (s == "ret") return MultiplierSpec::Kind::Retarded;
  if (s == "adv") return MultiplierSpec::Kind::Advanced;
  if (s == "feyn") return MultiplierSpec::Kind::Feynman;
  if (s == "antifeyn") return MultiplierSpec::Kind::AntiFeynman;
  throw ConfigError("oracle.kind", "unknown multiplier kind '" + s + "'");
}

DenseScheme parse_dense_scheme(const std::string& s) {
  if (s == "centered2") return DenseScheme::Centered2;
  if (s == "propagator") return DenseScheme::Propagator;
  if (s == "ad" || s == "adiabatic") return DenseScheme::Adiabatic;
  throw ConfigError("oracle.dense.scheme", "unknown dense scheme '" + s + "'");
}

double retarded_green_1d(double t, double x, double mass) {
  if (t <= std::abs(x)) return 0.0;
  return 0.5 * std::cyl_bessel_j(0.0, mass * std::sqrt(t * t - x * x));
}

namespace {

using Kind = MultiplierSpec::Kind;

cplx symbol(Kind kind, double tau, double w2, double eps) {
  switch (kind) {
    case Kind::Retarded: {
      const cplx z(tau, -eps);
      return -z * z + w2;
    }
    case Kind::Advanced: {
      const cplx z(tau, eps);
      return -z * z + w2;
    }
    case Kind::Feynman: return cplx(-tau * tau + w2, eps);
    default: return cplx(-tau * tau + w2, -eps);
  }
}

// One ε: returns mode-space u and ∂_t u, rows = time nodes, columns = slots.
std::pair<CRowMat, CRowMat> multiplier_once(const MultiplierSpec& spec, double eps, double mass,
                                            const CRowMat& modes, const SpatialGrid& g,
                                            const TimeGrid& tg) {
  const int nt = tg.nodes();
  const int n = g.size();
  const RVec k = g.derivative_wavenumbers();
  CRowMat u = CRowMat::Zero(nt, n), du = CRowMat::Zero(nt, n);
  const double top = modes.cwiseAbs().maxCoeff();
  const double span = tg.t_max() - tg.t_min();
  for (int s = 0; s < n; ++s) {
    const CVec col = modes.col(s);
    if (col.cwiseAbs().maxCoeff() <= 1e-14 * top) continue;
    const double w2 = k[s] * k[s] + mass * mass;
    const double w = std::sqrt(w2);
    // Imaginary part of the regularized poles sets how long the kernel takes to decay.
    const double rate = (spec.kind == Kind::Retarded || spec.kind == Kind::Advanced)
                            ? eps
                            : eps / (2.0 * w);
    // Wraparound from the periodic images decays like e^{-rate·W}; weak modes need less.
    const double content = col.cwiseAbs().maxCoeff() / top;
    const double needed = std::max(0.0, std::log(content * 1e6)) / rate;
    const double window = spec.window > 0.0 ? spec.window : std::max(4.0 * span, needed);
    long m = 1;
    while (m * tg.dt() < window || m < 2 * nt) m *= 2;
    CVec x = CVec::Zero(m);
    x.head(nt) = col;
    CVec X = fft::forward(x);
    CVec dX(m);
    for (long j = 0; j < m; ++j) {
      const long js = j < m / 2 ? j : j - m;
      const double tau = 2.0 * kPi * static_cast<double>(js) / (static_cast<double>(m) * tg.dt());
      X[j] /= symbol(spec.kind, tau, w2, eps) * static_cast<double>(m);
      dX[j] = kI * tau * X[j];
    }
    const CVec ux = fft::backward(X);
    const CVec dux = fft::backward(dX);
    u.col(s) = ux.head(nt);
    du.col(s) = dux.head(nt);
  }
  return {u, du};
}

}  // namespace

SpacetimeFunction flat_multiplier(const MultiplierSpec& spec, double mass,
                                  const SpacetimeFunction& v) {
  if (!(spec.epsilon > 0.0)) throw ConfigError("oracle.epsilon", "oracle.epsilon must be positive");
  const SpatialGrid& g = v.grid;
  const TimeGrid& tg = v.time;
  const int nt = tg.nodes();
  CRowMat modes(nt, g.size());
  for (int n = 0; n < nt; ++n)
    modes.row(n) = to_modes(g, v.values.row(n).transpose()).transpose();
  auto [u, du] = multiplier_once(spec, spec.epsilon, mass, modes, g, tg);
  if (spec.extrapolate) {
    auto [uh, duh] = multiplier_once(spec, 0.5 * spec.epsilon, mass, modes, g, tg);
    u = 2.0 * uh - u;
    du = 2.0 * duh - du;
  }
  SpacetimeFunction out(g, tg);
  CRowMat dn(nt, g.size());
  for (int n = 0; n < nt; ++n) {
    out.set_slice(n, to_nodes(g, u.row(n).transpose()));
    dn.row(n) = to_nodes(g, du.row(n).transpose()).transpose();
  }
  out.dt_values = std::move(dn);
  return out;
}

namespace {

SpacetimeFunction centered2(const PropagatorEngine& eng, const SpacetimeFunction& v,
                            DenseReport* report) {
  const ReducedModel& model = eng.model();
  const SpatialGrid& g = eng.grid();
  const TimeGrid& tg = eng.time();
  const int n = g.size();
  const int steps = tg.steps();
  const long total = static_cast<long>(n) * tg.nodes();
  const double dt = tg.dt();
  CMat A = CMat::Zero(total, total);
  CVec rhs = CVec::Zero(total);
  const CMat Ti0 = eng.frame(0).Tinv.to_dense();
  const CMat TiT = eng.frame(steps).Tinv.to_dense();
  const CMat I = CMat::Identity(n, n);
  // π⁺ T⁻¹ ρ(T_min) = 0 with ∂_t u ≈ (-3u₀ + 4u₁ - u₂)/(2dt).
  {
    const CMat X = Ti0.topLeftCorner(n, n), Y = Ti0.topRightCorner(n, n);
    const cplx c = -kI / (2.0 * dt);
    A.block(0, 0, n, n) = X + c * -3.0 * Y;
    A.block(0, n, n, n) = c * 4.0 * Y;
    A.block(0, 2 * n, n, n) = c * -1.0 * Y;
  }
  for (int k = 1; k < steps; ++k) {
    const long row = static_cast<long>(k) * n;
    const double t = tg.time(k);
    A.block(row, row - n, n, n) = I / (dt * dt);
    A.block(row, row, n, n) = -2.0 * I / (dt * dt) + model.a_tilde(t).to_dense();
    A.block(row, row + n, n, n) = I / (dt * dt);
    const RVec Ri = model.R(t).cwiseInverse();
    rhs.segment(row, n) = Ri.cast<cplx>().cwiseProduct(v.values.row(k).transpose());
  }
  {
    const long row = total - n;
    const CMat X = TiT.bottomLeftCorner(n, n), Y = TiT.bottomRightCorner(n, n);
    const cplx c = -kI / (2.0 * dt);
    A.block(row, row, n, n) = X + c * 3.0 * Y;
    A.block(row, row - n, n, n) = c * -4.0 * Y;
    A.block(row, row - 2 * n, n, n) = c * 1.0 * Y;
  }
  const DenseLU lu(A);
  const CVec x = lu.solve(rhs);
  if (report) {
    report->unknowns = total;
    report->row_residual = (A * x - rhs).cwiseAbs().maxCoeff();
    report->rcond = lu.rcond();
    report->sigma_min = lu.sigma_min();
  }
  SpacetimeFunction u(g, tg);
  CRowMat du(tg.nodes(), n);
  auto ut = [&](int k) -> CVec { return x.segment(static_cast<long>(k) * n, n); };
  for (int k = 0; k < tg.nodes(); ++k) {
    CVec d;
    if (k == 0)
      d = (-3.0 * ut(0) + 4.0 * ut(1) - ut(2)) / (2.0 * dt);
    else if (k == steps)
      d = (3.0 * ut(steps) - 4.0 * ut(steps - 1) + ut(steps - 2)) / (2.0 * dt);
    else
      d = (ut(k + 1) - ut(k - 1)) / (2.0 * dt);
    const double t = tg.time(k);
    const CVec R = model.R(t).cast<cplx>();
    const CVec dR = model.dt_R(t).cast<cplx>();
    u.set_slice(k, R.cwiseProduct(ut(k)));
    du.row(k) = (dR.cwiseProduct(ut(k)) + R.cwiseProduct(d)).transpose();
  }
  u.dt_values = std::move(du);
  return u;
}

double one_step_residual(const PropagatorEngine& eng, const Evolution& evo, const Trajectory& w,
                         const Trajectory& g, bool coupled) {
  Trajectory src = g;
  if (coupled)
    for (std::size_t k = 0; k < g.size(); ++k)
      src[k] += eng.frame(static_cast<int>(k)).Vad.apply(w[k]);
  const Trajectory K = eng.interval_integrals(evo, src);
  double worst = 0.0;
  for (int k = 0; k < evo.time().steps(); ++k)
    worst = std::max(worst, (w[k + 1] - evo.advance(w[k] + kI * K[k], k)).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

SpacetimeFunction dense_feynman(const PropagatorEngine& eng, const SpacetimeFunction& v,
                                DenseScheme scheme, DenseReport* report, int max_unknowns) {
  const int n = eng.grid().size();
  const long per_node = scheme == DenseScheme::Centered2 ? n : 2L * n;
  const long total = per_node * eng.time().nodes();
  if (total > max_unknowns)
    throw ConfigError("oracle.dense.maxN", "dense oracle system with " + std::to_string(total) +
                                               " unknowns exceeds the limit " +
                                               std::to_string(max_unknowns));
  if (scheme == DenseScheme::Centered2) return centered2(eng, v, report);
  double sigma = 0.0, rc = 0.0;
  if (scheme == DenseScheme::Propagator) {
    const Evolution& evo = eng.full_evolution();
    const Trajectory g = eng.source_original(v);
    const int last = eng.time().steps();
    const CMat first_rows = basis_matrix(eng.frame(0).Tinv).topRows(n);
    const CMat last_rows = basis_matrix(eng.frame(last).Tinv).bottomRows(n);
    const Trajectory w = solve_one_step_dense(evo, g, {}, first_rows, last_rows,
                                              report ? &sigma : nullptr, report ? &rc : nullptr);
    if (report) {
      *report = {sigma, rc, one_step_residual(eng, evo, w, g, false), total};
    }
    return eng.from_original(w, evo.basis());
  }
  const Trajectory g = eng.source_diag(v);
  const Trajectory w = eng.feynman_ad_dense(g, false, report ? &sigma : nullptr);
  if (report)
    *report = {sigma, 0.0, one_step_residual(eng, eng.diag_evolution(), w, g, eng.has_remainder()),
               total};
  return eng.from_diag(w);
}

}  // namespace kgprop
