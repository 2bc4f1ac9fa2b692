#include "kgprop/propagators.hpp"

#include <algorithm>
#include <cmath>

#include "kgprop/linalg.hpp"
#include "kgprop/numerics.hpp"

namespace kgprop {

void SourceSpec::validate() const {
  const double margin = 2.0 * v.time.dt();
  if (!(t0 <= t1)) throw ConfigError("source.support", "source support must satisfy t0 <= t1");
  if (t0 - margin <= v.time.t_min() || t1 + margin >= v.time.t_max())
    throw ConfigError("source.support",
                      "source support is too close to the time boundary; increase time.Tmax");
}

PropagatorEngine::PropagatorEngine(ReducedModel model, TimeGrid tg, PropagatorOptions opt)
    : model_(std::move(model)), time_(tg), opt_(opt) {
  if (time_.steps() < 4) throw ConfigError("time.dt", "the time grid needs at least 4 steps");
  frames_.resize(model_.base().is_static() ? 1 : time_.nodes());
}

const Evolution& PropagatorEngine::full_evolution() const {
  if (!full_) full_ = std::make_unique<Evolution>(Generator::full(model_), time_, opt_.integrator);
  return *full_;
}

const Evolution& PropagatorEngine::diag_evolution() const {
  if (!diag_)
    diag_ = std::make_unique<Evolution>(Generator::diagonal(model_), time_, opt_.integrator);
  return *diag_;
}

const DiagFrame& PropagatorEngine::frame(int n) const {
  if (n < 0 || n >= time_.nodes()) throw ShapeError("frame index out of range");
  const int slot = frames_.size() == 1 ? 0 : n;
  if (!frames_[slot]) frames_[slot] = build_frame(model_, time_.time(n), opt_.fd_step);
  return *frames_[slot];
}

double PropagatorEngine::basis_norm(const CVec& v, Basis b) const {
  const double scale = b == Basis::Modes ? grid().length() : grid().dx();
  return std::sqrt(scale) * v.norm();
}

namespace {

struct Rule {
  int first;
  double w[4];
};

// Cubic interpolation through 4 consecutive nodes integrated over [t_n, t_{n+1}], in units dt/24.
Rule rule_for(int n, int steps) {
  if (n == 0) return {0, {9, 19, -5, 1}};
  if (n == steps - 1) return {steps - 3, {1, -5, 19, 9}};
  return {n - 1, {-1, 13, 13, -1}};
}

// U(t_n, t_j) v.
CVec transport(const Evolution& evo, CVec v, int j, int n) {
  if (j > n)
    for (int m = j - 1; m >= n; --m) v = evo.retreat(v, m);
  else
    for (int m = j; m < n; ++m) v = evo.advance(v, m);
  return v;
}

bool is_zero(const CVec& v) { return v.squaredNorm() == 0.0; }

}  // namespace

Trajectory PropagatorEngine::interval_integrals(const Evolution& evo, const Trajectory& g) const {
  const int steps = time_.steps();
  if (static_cast<int>(g.size()) != time_.nodes()) throw ShapeError("source trajectory length");
  const int dim = 2 * grid().size();
  const double h = time_.dt() / 24.0;
  Trajectory K(steps, CVec::Zero(dim));
  for (int n = 0; n < steps; ++n) {
    const Rule r = rule_for(n, steps);
    for (int i = 0; i < 4; ++i) {
      const int j = r.first + i;
      if (is_zero(g[j])) continue;
      K[n] += (h * r.w[i]) * transport(evo, g[j], j, n);
    }
  }
  return K;
}

Trajectory PropagatorEngine::duhamel_forward(const Evolution& evo, const Trajectory& g) const {
  const Trajectory K = interval_integrals(evo, g);
  const int dim = 2 * grid().size();
  Trajectory w(time_.nodes(), CVec::Zero(dim));
  for (int n = 0; n < time_.steps(); ++n) {
    if (is_zero(w[n]) && is_zero(K[n])) continue;
    w[n + 1] = evo.advance(w[n] + kI * K[n], n);
  }
  return w;
}

Trajectory PropagatorEngine::duhamel_backward(const Evolution& evo, const Trajectory& g) const {
  const Trajectory K = interval_integrals(evo, g);
  const int dim = 2 * grid().size();
  Trajectory w(time_.nodes(), CVec::Zero(dim));
  for (int n = time_.steps() - 1; n >= 0; --n) {
    if (is_zero(w[n + 1]) && is_zero(K[n])) continue;
    w[n] = evo.retreat(w[n + 1], n) - kI * K[n];
  }
  return w;
}

Trajectory PropagatorEngine::feynman_diag(const Trajectory& g, bool anti) const {
  const Evolution& evo = diag_evolution();
  const int n = grid().size();
  Trajectory gp(g.size()), gm(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    gp[i] = g[i];
    gp[i].tail(n).setZero();
    gm[i] = g[i];
    gm[i].head(n).setZero();
  }
  // Hd is block diagonal, so each recursion stays inside its range.
  const Trajectory fwd = duhamel_forward(evo, anti ? gm : gp);
  const Trajectory bwd = duhamel_backward(evo, anti ? gp : gm);
  Trajectory w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = fwd[i] + bwd[i];
  return w;
}

Trajectory PropagatorEngine::feynman_ad(const Trajectory& g, PropagatorResult* info,
                                        bool anti) const {
  Trajectory w = feynman_diag(g, anti);
  if (!has_remainder()) return w;
  const Basis b = diag_evolution().basis();
  double prev = std::numeric_limits<double>::infinity();
  bool converged = false;
  int it = 0;
  for (; it < opt_.neumann_max; ++it) {
    Trajectory src(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) src[n] = g[n] + frame(static_cast<int>(n)).Vad.apply(w[n]);
    Trajectory next = feynman_diag(src, anti);
    double diff = 0.0, size = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      diff = std::max(diff, basis_norm(next[n] - w[n], b));
      size = std::max(size, basis_norm(next[n], b));
    }
    w = std::move(next);
    if (info) info->iteration_diffs.push_back(diff);
    if (diff <= opt_.neumann_tol * std::max(size, 1e-300)) {
      converged = true;
      ++it;
      break;
    }
    if (it >= 2 && diff > 0.9 * prev) break;  // not contracting
    prev = diff;
  }
  if (info) info->iterations = it;
  if (converged) return w;
  const long unknowns = 2L * grid().size() * time_.nodes();
  if (!opt_.dense_fallback || unknowns > opt_.dense_max_unknowns)
    throw NumericalError("Neumann iteration for the Feynman correction did not converge");
  if (info) info->used_fallback = true;
  return feynman_ad_dense(g, anti);
}

CMat basis_matrix(const OperatorMatrix& op) {
  if (op.kind() == OperatorMatrix::Kind::Dense) return op.matrix();
  const int n = op.grid().size();
  CMat m = CMat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n).diagonal() = op.a();
  m.topRightCorner(n, n).diagonal() = op.b();
  m.bottomLeftCorner(n, n).diagonal() = op.c();
  m.bottomRightCorner(n, n).diagonal() = op.d();
  return m;
}

Trajectory solve_one_step_dense(const Evolution& evo, const Trajectory& g,
                                const std::vector<const OperatorMatrix*>& coupling,
                                const CMat& bc_first, const CMat& bc_last, double* sigma_min,
                                double* rcond) {
  const TimeGrid& tg = evo.time();
  const int steps = tg.steps();
  const int n = evo.grid().size();
  const int dim = 2 * n;
  const long total = static_cast<long>(dim) * tg.nodes();
  if (bc_first.rows() != n || bc_first.cols() != dim || bc_last.rows() != n ||
      bc_last.cols() != dim)
    throw ShapeError("boundary rows must be N x 2N");
  if (!coupling.empty() && static_cast<int>(coupling.size()) != tg.nodes())
    throw ShapeError("coupling must have one operator per node");
  std::vector<CMat> S(steps), Si(steps);
  for (int k = 0; k < steps; ++k) {
    S[k] = basis_matrix(evo.step(k));
    Si[k] = basis_matrix(evo.step_inverse(k));
  }
  // U(t_{k+1}, t_j) as a dense matrix.
  auto U_next = [&](int k, int j) {
    CMat u = CMat::Identity(dim, dim);
    if (j > k + 1)
      for (int m = k + 1; m < j; ++m) u = u * Si[m];
    else
      for (int m = k; m >= j; --m) u = u * S[m];
    return u;
  };
  CMat A = CMat::Zero(total, total);
  CVec rhs = CVec::Zero(total);
  A.block(0, 0, n, dim) = bc_first;
  A.block(total - n, total - dim, n, dim) = bc_last;
  const double h = tg.dt() / 24.0;
  for (int k = 0; k < steps; ++k) {
    const long row = n + static_cast<long>(k) * dim;
    A.block(row, static_cast<long>(k + 1) * dim, dim, dim) += CMat::Identity(dim, dim);
    A.block(row, static_cast<long>(k) * dim, dim, dim) -= S[k];
    const Rule r = rule_for(k, steps);
    for (int i = 0; i < 4; ++i) {
      const int j = r.first + i;
      const CMat u = U_next(k, j);
      if (!coupling.empty())
        A.block(row, static_cast<long>(j) * dim, dim, dim) -=
            (kI * h * r.w[i]) * (u * basis_matrix(*coupling[j]));
      rhs.segment(row, dim) += (kI * h * r.w[i]) * (u * g[j]);
    }
  }
  const DenseLU lu(std::move(A));
  const CVec x = lu.solve(rhs);
  if (sigma_min) *sigma_min = lu.sigma_min();
  if (rcond) *rcond = lu.rcond();
  Trajectory w(tg.nodes());
  for (int k = 0; k < tg.nodes(); ++k) w[k] = x.segment(static_cast<long>(k) * dim, dim);
  return w;
}

Trajectory PropagatorEngine::feynman_ad_dense(const Trajectory& g, bool anti,
                                              double* sigma_min) const {
  const int n = grid().size();
  CMat first = CMat::Zero(n, 2 * n), last = CMat::Zero(n, 2 * n);
  // π⁺ w(T_min) = 0 and π⁻ w(T_max) = 0 (swapped for the anti-Feynman problem).
  first.block(0, anti ? n : 0, n, n).setIdentity();
  last.block(0, anti ? 0 : n, n, n).setIdentity();
  std::vector<const OperatorMatrix*> coupling;
  if (has_remainder())
    for (int k = 0; k < time_.nodes(); ++k) coupling.push_back(&frame(k).Vad);
  return solve_one_step_dense(diag_evolution(), g, coupling, first, last, sigma_min);
}

Trajectory PropagatorEngine::source_original(const SpacetimeFunction& v) const {
  const Basis b = full_evolution().basis();
  const SpatialGrid& g = grid();
  Trajectory out(time_.nodes());
  for (int n = 0; n < time_.nodes(); ++n) {
    const CVec vn = v.values.row(n).transpose();
    if (is_zero(vn)) {
      out[n] = CVec::Zero(2 * g.size());
      continue;
    }
    const CVec vt = model_.R(time_.time(n)).cwiseInverse().cast<cplx>().cwiseProduct(vn);
    out[n] = to_basis(TwoComponent(GridFunction::zeros(g), GridFunction(g, -vt)), b);
  }
  return out;
}

Trajectory PropagatorEngine::source_diag(const SpacetimeFunction& v) const {
  const Basis b = diag_evolution().basis();
  const SpatialGrid& g = grid();
  Trajectory out(time_.nodes());
  for (int n = 0; n < time_.nodes(); ++n) {
    const CVec vn = v.values.row(n).transpose();
    if (is_zero(vn)) {
      out[n] = CVec::Zero(2 * g.size());
      continue;
    }
    const CVec vt = model_.R(time_.time(n)).cwiseInverse().cast<cplx>().cwiseProduct(vn);
    const CVec orig = to_basis(TwoComponent(GridFunction::zeros(g), GridFunction(g, -vt)), b);
    out[n] = frame(n).Tinv.apply(orig);
  }
  return out;
}

SpacetimeFunction PropagatorEngine::from_original(const Trajectory& w, Basis b) const {
  const SpatialGrid& g = grid();
  SpacetimeFunction u(g, time_);
  CRowMat du = CRowMat::Zero(time_.nodes(), g.size());
  for (int n = 0; n < time_.nodes(); ++n) {
    const TwoComponent f = from_basis(g, w[n], b);
    const double t = time_.time(n);
    const CVec R = model_.R(t).cast<cplx>();
    const CVec dR = model_.dt_R(t).cast<cplx>();
    const CVec ut = f.c0.values;
    const CVec dut = kI * f.c1.values;
    u.set_slice(n, R.cwiseProduct(ut));
    du.row(n) = (dR.cwiseProduct(ut) + R.cwiseProduct(dut)).transpose();
  }
  u.dt_values = std::move(du);
  return u;
}

SpacetimeFunction PropagatorEngine::from_diag(const Trajectory& w) const {
  Trajectory rho(w.size());
  for (int n = 0; n < time_.nodes(); ++n) rho[n] = frame(n).T.apply(w[n]);
  return from_original(rho, diag_evolution().basis());
}

CVec PropagatorEngine::ad_data(const SpacetimeFunction& u, int n) const {
  if (!u.dt_values) throw ShapeError("ad_data needs the carried time derivative");
  const SpatialGrid& g = grid();
  const double t = time_.time(n);
  const RVec Ri = model_.R(t).cwiseInverse();
  const RVec dR = model_.dt_R(t);
  const CVec un = u.values.row(n).transpose();
  const CVec dun = u.dt_values->row(n).transpose();
  const CVec ut = Ri.cast<cplx>().cwiseProduct(un);
  const CVec dut = Ri.cast<cplx>().cwiseProduct(dun - dR.cast<cplx>().cwiseProduct(ut));
  const TwoComponent rho_t(GridFunction(g, ut), GridFunction(g, -kI * dut));
  return frame(n).Tinv.apply(rho_t).stacked();
}

SpacetimeFunction apply_P(const ReducedModel& model, const SpacetimeFunction& u) {
  if (!u.dt_values) throw ShapeError("apply_P needs the carried time derivative");
  const TimeGrid& tg = u.time;
  const SpatialGrid& g = u.grid;
  const CRowMat& du = *u.dt_values;
  const auto dd = derivative_rows<CVec>(tg.nodes(), tg.dt(), 1,
                                        [&](int n) -> CVec { return du.row(n).transpose(); });
  SpacetimeFunction out(g, tg);
  for (int n = 0; n < tg.nodes(); ++n) {
    const double t = tg.time(n);
    const CVec un = u.values.row(n).transpose();
    const CVec r = compute_r(model.base(), g, t).values;
    const CVec a = apply_a(model.base(), t, GridFunction(g, un)).values;
    out.set_slice(n, dd[n] + r.cwiseProduct(du.row(n).transpose()) + a);
  }
  return out;
}

double PropagatorEngine::residual(const SpacetimeFunction& u, const SpacetimeFunction& v) const {
  const SpacetimeFunction Pu = apply_P(model_, u);
  const SpacetimeFunction d(grid(), time_, Pu.values - v.values);
  const double delta = model_.base().delta();
  const double num = ynorm(d, 0.0, opt_.gamma, delta);
  const double den = ynorm(v, 0.0, opt_.gamma, delta);
  return den > 0.0 ? num / den : num;
}

namespace {

PropagatorResult make_result(const PropagatorEngine& eng, const SourceSpec& src, std::string kind,
                             SpacetimeFunction u) {
  PropagatorResult res(std::move(kind), std::move(u));
  const double delta = eng.model().base().delta();
  res.source_norm = ynorm(src.v, 0.0, eng.options().gamma, delta);
  if (eng.options().compute_residual) res.residual_P = eng.residual(res.u, src.v);
  return res;
}

void check_source(const PropagatorEngine& eng, const SourceSpec& src) {
  if (!(src.v.grid == eng.grid()) || !(src.v.time == eng.time()))
    throw ShapeError("source grids do not match the propagator engine");
  src.validate();
}

double tail_estimate(const PropagatorEngine& eng) {
  const ModelMetric& m = eng.model().base();
  const double T = eng.time().t_max();
  const double tail = std::max(m.tail(eng.grid(), T), m.tail(eng.grid(), -T));
  return tail * T / (m.delta() - 1.0);
}

PropagatorResult feynman_impl(const PropagatorEngine& eng, const SourceSpec& src, bool anti) {
  check_source(eng, src);
  PropagatorResult info(anti ? "antifeynman" : "feynman", SpacetimeFunction(eng.grid(), eng.time()));
  const Trajectory g = eng.source_diag(src.v);
  const Trajectory w = eng.feynman_ad(g, &info, anti);
  PropagatorResult res = make_result(eng, src, info.kind, eng.from_diag(w));
  res.iterations = info.iterations;
  res.iteration_diffs = info.iteration_diffs;
  res.used_fallback = info.used_fallback;
  res.tail_estimate = tail_estimate(eng);
  if (!anti) {
    const double lo = std::max(1.0, std::max(std::abs(src.t0), std::abs(src.t1)) + 1.0);
    const double hi = 0.8 * eng.time().t_max();
    if (hi > 2.0 * lo) res.bc = feynman_membership(eng, res.u, lo, hi);
  }
  return res;
}

}  // namespace

PropagatorResult g_retarded(const PropagatorEngine& eng, const SourceSpec& src) {
  check_source(eng, src);
  const Evolution& evo = eng.full_evolution();
  const Trajectory w = eng.duhamel_forward(evo, eng.source_original(src.v));
  return make_result(eng, src, "retarded", eng.from_original(w, evo.basis()));
}

PropagatorResult g_advanced(const PropagatorEngine& eng, const SourceSpec& src) {
  check_source(eng, src);
  const Evolution& evo = eng.full_evolution();
  const Trajectory w = eng.duhamel_backward(evo, eng.source_original(src.v));
  return make_result(eng, src, "advanced", eng.from_original(w, evo.basis()));
}

PropagatorResult g_causal(const PropagatorEngine& eng, const SourceSpec& src) {
  check_source(eng, src);
  const Evolution& evo = eng.full_evolution();
  const Trajectory g = eng.source_original(src.v);
  const Trajectory wr = eng.duhamel_forward(evo, g);
  const Trajectory wa = eng.duhamel_backward(evo, g);
  Trajectory w(wr.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = wr[n] - wa[n];
  PropagatorResult res("causal", eng.from_original(w, evo.basis()));
  const double delta = eng.model().base().delta();
  res.source_norm = ynorm(src.v, 0.0, eng.options().gamma, delta);
  if (eng.options().compute_residual) {
    const SpacetimeFunction Pu = apply_P(eng.model(), res.u);
    const double num = ynorm(Pu, 0.0, eng.options().gamma, delta);
    res.residual_P = res.source_norm > 0.0 ? num / res.source_norm : num;
  }
  return res;
}

PropagatorResult g_feynman(const PropagatorEngine& eng, const SourceSpec& src) {
  return feynman_impl(eng, src, false);
}

PropagatorResult g_antifeynman(const PropagatorEngine& eng, const SourceSpec& src) {
  return feynman_impl(eng, src, true);
}

BoundaryReport feynman_membership(const PropagatorEngine& eng, const SpacetimeFunction& u,
                                  double t_lo, double t_hi, int samples, double slack) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || samples < 3)
    throw NumericalError("feynman_membership: need 0 < t_lo < t_hi and >= 3 samples");
  const TimeGrid& tg = eng.time();
  const int n = eng.grid().size();
  const double sdx = std::sqrt(eng.grid().dx());
  BoundaryReport rep;
  for (int k = 0; k < tg.nodes(); ++k) rep.peak = std::max(rep.peak, sdx * eng.ad_data(u, k).norm());
  std::vector<int> idx;
  for (int i = 0; i < samples; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (samples - 1));
    const int k = static_cast<int>(std::lround(t / tg.dt()));
    if (idx.empty() || k != idx.back()) idx.push_back(k);
  }
  const int zero = tg.index_of(0.0);
  for (int k : idx) {
    rep.neg_times.push_back(-k * tg.dt());
    rep.pos_times.push_back(k * tg.dt());
    rep.plus_norms.push_back(sdx * eng.ad_data(u, zero - k).head(n).norm());
    rep.minus_norms.push_back(sdx * eng.ad_data(u, zero + k).tail(n).norm());
  }
  const double floor = 1e-13 * std::max(rep.peak, 1e-300);
  auto fit = [&](std::vector<double> ys, double& slope, bool& zero_flag) {
    std::vector<double> xs;
    for (double t : rep.pos_times) xs.push_back(t);
    for (double& y : ys) y = std::max(y, floor);
    const LogLogFit f = fit_loglog(xs, ys, floor);
    zero_flag = f.exact_zero;
    slope = f.slope;
  };
  fit(rep.plus_norms, rep.plus_exponent, rep.plus_zero);
  fit(rep.minus_norms, rep.minus_exponent, rep.minus_zero);
  rep.threshold = -(eng.model().base().delta() - 1.0) / 2.0 + slack;
  rep.pass = (rep.plus_zero || rep.plus_exponent <= rep.threshold) &&
             (rep.minus_zero || rep.minus_exponent <= rep.threshold);
  return rep;
}

ScatteringData scattering_data(const PropagatorEngine& eng, const SpacetimeFunction& u,
                               int direction) {
  const TimeGrid& tg = eng.time();
  const SpatialGrid& g = eng.grid();
  const double mass = eng.model().base().mass();
  const RVec Rinf = eng.model().R_infinity();
  const int zero = tg.index_of(0.0);
  const double sgn = direction > 0 ? 1.0 : -1.0;
  ScatteringData out(g);
  std::vector<CVec> data;
  for (int i = 0; i < 4; ++i) {
    const int k = static_cast<int>(std::lround(tg.t_max() / std::pow(2.0, i) / tg.dt()));
    const int node = zero + static_cast<int>(sgn) * k;
    const double t = tg.time(node);
    const TwoComponent w = TwoComponent::from_stacked(g, eng.ad_data(u, node));
    // ε_∞ = R_∞⁻¹ (k² + m²)^{1/2} R_∞ since ã → R_∞⁻¹ a_out R_∞.
    const TwoComponent conj(GridFunction(g, Rinf.cast<cplx>().cwiseProduct(w.c0.values)),
                            GridFunction(g, Rinf.cast<cplx>().cwiseProduct(w.c1.values)));
    const TwoComponent back = evolve_asymptotic(conj, mass, t, 0.0);
    CVec d = back.stacked();
    d.head(g.size()) = Rinf.cwiseInverse().cast<cplx>().cwiseProduct(d.head(g.size()));
    d.tail(g.size()) = Rinf.cwiseInverse().cast<cplx>().cwiseProduct(d.tail(g.size()));
    out.radii.push_back(std::abs(t));
    data.push_back(std::move(d));
  }
  const double sdx = std::sqrt(g.dx());
  for (int i = 0; i + 1 < 4; ++i) out.differences.push_back(sdx * (data[i] - data[i + 1]).norm());
  out.at_tmax = TwoComponent::from_stacked(g, data[0]);
  const double delta = eng.model().base().delta();
  const double q = std::pow(out.radii[0] / out.radii[1], delta - 1.0);
  out.extrapolated = TwoComponent::from_stacked(g, (q * data[0] - data[1]) / (q - 1.0));
  out.tail_bound = out.differences[0] / (q - 1.0);
  const double scale = std::max(sdx * data[0].norm(), 1e-300);
  const std::vector<double> xs(out.radii.begin(), out.radii.begin() + 3);
  std::vector<double> ys = out.differences;
  const double floor = 1e-10 * scale;
  out.exact = std::all_of(ys.begin(), ys.end(), [&](double y) { return y <= floor; });
  if (!out.exact) {
    for (double& y : ys) y = std::max(y, floor);
    out.fitted_exponent = fit_loglog(xs, ys).slope;
  }
  return out;
}

}  // namespace kgprop
