#include "kgprop/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>

#include "kgprop/analysis.hpp"
#include "kgprop/numerics.hpp"
#include "kgprop/oracle.hpp"

namespace kgprop {

double CriterionResult::metric(const std::string& key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw Error("criterion " + std::to_string(id) + " has no metric '" + key + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

class Run {
 public:
  Run(int id, std::string name, double budget) : start_(Clock::now()) {
    res_.id = id;
    res_.name = std::move(name);
    res_.budget = budget;
  }
  void add(const std::string& k, double v) { res_.metrics.emplace_back(k, v); }
  void note(const std::string& s) { res_.note = s; }
  CriterionResult finish(bool pass) {
    res_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    res_.pass = pass && res_.seconds <= res_.budget;
    return res_;
  }

 private:
  Clock::time_point start_;
  CriterionResult res_;
};

double rel_l2(const CRowMat& a, const CRowMat& b) { return (a - b).norm() / b.norm(); }

SourceSpec gaussian_source(const SpatialGrid& g, const TimeGrid& tg, double tau, double width = 1.0,
                           double center = 0.0) {
  return SourceSpec::sample(
      g, tg,
      [&](double t, double x) -> cplx {
        return smooth_bump((t - center) / tau) * std::exp(-x * x / (width * width));
      },
      center - tau, center + tau);
}

TwoComponent gaussian_data(const SpatialGrid& g, double x0, double k0) {
  auto f = [&](double x) { return std::exp(-(x - x0) * (x - x0) + kI * k0 * x); };
  auto h = [&](double x) { return cplx(0.3, 0.7) * std::exp(-0.5 * (x + x0) * (x + x0)); };
  return {GridFunction::sample(g, f), GridFunction::sample(g, h)};
}

/// v = P(b(t/τ) φ) with b'' and b' in closed form.
SpacetimeFunction manufactured_source(const ReducedModel& model, const TimeGrid& tg, double tau,
                                      const CVec& phi) {
  const SpatialGrid& g = model.grid();
  SpacetimeFunction v(g, tg);
  for (int n = 0; n < tg.nodes(); ++n) {
    const double t = tg.time(n), s = t / tau;
    if (std::abs(s) >= 1.0) continue;
    const double b = smooth_bump(s), b1 = smooth_bump_d1(s) / tau,
                 b2 = smooth_bump_d2(s) / (tau * tau);
    const CVec r = compute_r(model.base(), g, t).values;
    const CVec aphi = apply_a(model.base(), t, GridFunction(g, phi)).values;
    v.set_slice(n, b2 * phi + b1 * r.cwiseProduct(phi) + b * aphi);
  }
  return v;
}

double energy_at(const SpacetimeFunction& u, int n) {
  const double a = sobolev_norm(u.slice(n), 1.0);
  const double b = sobolev_norm(GridFunction(u.grid, u.dt_values->row(n).transpose()), 0.0);
  return a * a + b * b;
}

/// Bump (0.3, 0.2, 1.5) on [-64, 64], shared by the boundary and Isozaki criteria.
const PropagatorEngine& long_bump_engine() {
  static const std::unique_ptr<PropagatorEngine> eng = [] {
    const SpatialGrid g(32, 16.0);
    return std::make_unique<PropagatorEngine>(reduce(ModelMetric::bump(1.0, 0.3, 0.2, 1.5), g),
                                              TimeGrid::with_step(64.0, 0.1));
  }();
  return *eng;
}

}  // namespace

CriterionResult criterion_projection_algebra(unsigned seed) {
  Run run(1, "projection algebra", 1.0);
  const SpatialGrid g(128, 20.0);
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> pick(0, g.size() - 1);
  const int n = g.size();
  const SpatialOp zero = SpatialOp::scalar(g, 0.0), one = SpatialOp::scalar(g, 1.0);
  const OperatorMatrix pp = pi_pm(g, 1), pm = pi_pm(g, -1);
  double idem = 0.0, sum = 0.0, eig = 0.0, pi = 0.0;
  for (double m : {0.5, 1.0, 2.0}) {
    const RVec k = g.wavenumbers();
    const CVec sym = (k.array().square() + m * m).cast<cplx>();
    const SpatialOp a = SpatialOp::multiplier(g, sym);
    const SpatialOp ra = SpatialOp::multiplier(g, sym.cwiseSqrt());
    const OperatorMatrix cp = c_spectral(1, a), cm = c_spectral(-1, a);
    const OperatorMatrix H = OperatorMatrix::from_blocks(zero, one, a, zero);
    const OperatorMatrix Ra = OperatorMatrix::from_blocks(ra, zero, zero, ra);
    for (int i = 0; i < 64; ++i) {
      CVec f = CVec::Zero(2 * n);
      const int s = pick(rng);
      f[s] = cplx(nd(rng), nd(rng));
      f[n + s] = cplx(nd(rng), nd(rng));
      f /= f.cwiseAbs().maxCoeff();
      auto dev = [](const CVec& x, const CVec& y) { return (x - y).cwiseAbs().maxCoeff(); };
      const CVec p = cp.apply(f), q = cm.apply(f);
      idem = std::max({idem, dev(cp.apply(p), p), dev(cm.apply(q), q)});
      sum = std::max({sum, dev(p + q, f), cp.apply(q).cwiseAbs().maxCoeff()});
      eig = std::max({eig, dev(H.apply(p), Ra.apply(p)), dev(H.apply(q), -Ra.apply(q))});
      const CVec a1 = pp.apply(f), a2 = pm.apply(f);
      pi = std::max({pi, dev(pp.apply(a1), a1), dev(pm.apply(a2), a2), dev(a1 + a2, f),
                     pp.apply(a2).cwiseAbs().maxCoeff()});
    }
  }
  run.add("idempotence", idem);
  run.add("completeness", sum);
  run.add("eigen_relation", eig);
  run.add("pi_algebra", pi);
  return run.finish(std::max({idem, sum, eig, pi}) < 1e-12);
}

CriterionResult criterion_conservation(unsigned seed) {
  Run run(2, "charge conservation", 30.0);
  const SpatialGrid g(32, 16.0);
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  auto random_data = [&] {
    CVec a(g.size()), b(g.size());
    for (int j = 0; j < g.size(); ++j) {
      const double env = std::exp(-0.05 * g.node(j) * g.node(j));
      a[j] = env * cplx(nd(rng), nd(rng));
      b[j] = env * cplx(nd(rng), nd(rng));
    }
    return TwoComponent(GridFunction(g, a), GridFunction(g, b));
  };
  double pairing = 0.0, drift = 0.0;
  for (const ModelMetric& metric : {ModelMetric::flat(1.0), ModelMetric::bump(1.0, 0.3, 0.2, 1.5)}) {
    const ReducedModel model = reduce(metric, g);
    const RVec& w = model.weight0();
    auto norm = [&](const TwoComponent& f) {
      const CVec s = f.stacked();
      return std::sqrt(std::abs(pair0(s, s, w, g.dx())));
    };
    for (double t : {-3.0, 0.0, 2.0}) {
      const OperatorMatrix H = H_of_t(model, t);
      for (int i = 0; i < 32; ++i) {
        const TwoComponent f = random_data(), h = random_data();
        const double scale = norm(H.apply(f)) * norm(h) + norm(f) * norm(H.apply(h));
        pairing = std::max(pairing, std::abs(charge_residual(H, f, h, w)) / scale);
      }
    }
    const Evolution evo(Generator::diagonal(model), TimeGrid(20.0, 4000));
    const ConservationReport rep =
        conservation_monitor(evo, gaussian_data(g, 1.0, 1.5), q_ad(g), w, -20.0, 20.0);
    drift = std::max(drift, rep.max_drift / rep.reference);
  }
  run.add("pairing_residual", pairing);
  run.add("q_drift", drift);
  return run.finish(pairing < 1e-10 && drift < 1e-8);
}

CriterionResult criterion_evolution_accuracy() {
  Run run(3, "evolution accuracy", 10.0);
  const SpatialGrid g(16, 2.0 * kPi);
  const ReducedModel model = reduce(ModelMetric::flat(1.0), g);
  auto error = [&](Integrator integ, double dt) {
    const Evolution evo(Generator::full(model), TimeGrid(10.0, static_cast<int>(std::lround(20.0 / dt))),
                        integ);
    double worst = 0.0;
    for (int mode : {0, 1, -1}) {
      const double w = std::sqrt(mode * mode + 1.0);
      auto u0 = [&](double x) { return std::exp(kI * static_cast<double>(mode) * x); };
      auto v0 = [&](double x) { return cplx(0.4, -0.2) * std::exp(kI * static_cast<double>(mode) * x); };
      const TwoComponent f(GridFunction::sample(g, u0), GridFunction::sample(g, v0));
      const TwoComponent out = evo.evolve(f, 0.0, 10.0);
      const double c = std::cos(10.0 * w), s = std::sin(10.0 * w);
      const CVec eu = c * f.c0.values + kI * s / w * f.c1.values;
      const CVec ev = c * f.c1.values + kI * w * s * f.c0.values;
      worst = std::max({worst, (out.c0.values - eu).cwiseAbs().maxCoeff(),
                        (out.c1.values - ev).cwiseAbs().maxCoeff()});
    }
    return worst;
  };
  const double e2 = error(Integrator::RK4, 2e-2), e1 = error(Integrator::RK4, 1e-2);
  const double m1 = error(Integrator::Magnus4, 1e-2);
  run.add("rk4_error_dt2e-2", e2);
  run.add("rk4_error_dt1e-2", e1);
  run.add("rk4_ratio", e2 / e1);
  run.add("magnus_error_dt1e-2", m1);
  const double ratio = e2 / e1;
  return run.finish(ratio >= 8.0 && ratio <= 32.0 && e1 < 1e-8 && m1 < 1e-8);
}

CriterionResult criterion_causality() {
  Run run(4, "causality", 60.0);
  const SpatialGrid g(256, 40.0);
  const TimeGrid tg(10.0, 2000);
  const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
  const SourceSpec src = gaussian_source(g, tg, 1.5, 1.0, 2.0);
  const PropagatorResult ret = g_retarded(eng, src);
  const PropagatorResult adv = g_advanced(eng, src);
  double peak_r = 0.0, peak_a = 0.0, before = 0.0, after = 0.0;
  for (int n = 0; n < tg.nodes(); ++n) {
    const double t = tg.time(n);
    const double er = energy_at(ret.u, n), ea = energy_at(adv.u, n);
    peak_r = std::max(peak_r, er);
    peak_a = std::max(peak_a, ea);
    if (t < src.t0) before = std::max(before, er);
    if (t > src.t1) after = std::max(after, ea);
  }
  run.add("retarded_before_support", before / peak_r);
  run.add("advanced_after_support", after / peak_a);
  return run.finish(before / peak_r < 1e-10 && after / peak_a < 1e-10);
}

CriterionResult criterion_green_function() {
  Run run(5, "flat Green function", 60.0);
  const SpatialGrid g(256, 40.0);
  const TimeGrid tg = TimeGrid::with_step(10.0, 0.02);
  const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
  auto f = [](double t, double x) -> double { return smooth_bump(t) * std::exp(-x * x / 0.25); };
  const SourceSpec src = SourceSpec::sample(g, tg, [&](double t, double x) -> cplx { return f(t, x); },
                                            -1.0, 1.0);
  const PropagatorResult r = g_retarded(eng, src);
  const int stride = 50;
  const SpacetimeFunction gc = retarded_green_convolution(g, tg, 1.0, f, -1.0, 1.0, -4.0, 4.0, stride);
  CRowMat a = CRowMat::Zero(tg.nodes(), g.size()), b = a;
  for (int n = 0; n < tg.nodes(); n += stride) {
    a.row(n) = r.u.values.row(n);
    b.row(n) = gc.values.row(n);
  }
  const double err = rel_l2(a, b);
  run.add("rel_l2", err);
  return run.finish(err < 1e-2);
}

CriterionResult criterion_oracle_triangle() {
  Run run(6, "oracle triangle", 180.0);
  double ea = 0.0, eb = 0.0;
  {
    const SpatialGrid g(128, 40.0);
    const TimeGrid tg = TimeGrid::with_step(20.0, 0.05);
    const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
    const SourceSpec src = gaussian_source(g, tg, 3.0);
    const PropagatorResult r = g_feynman(eng, src);
    MultiplierSpec ms;
    ms.kind = MultiplierSpec::Kind::Feynman;
    ea = rel_l2(r.u.values, flat_multiplier(ms, 1.0, src.v).values);
  }
  {
    const SpatialGrid g(32, 16.0);
    const TimeGrid tg(8.0, 64);
    const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
    const SourceSpec src = gaussian_source(g, tg, 3.0);
    const PropagatorResult r = g_feynman(eng, src);
    DenseReport rep;
    eb = rel_l2(r.u.values, dense_feynman(eng, src.v, DenseScheme::Propagator, &rep).values);
    run.add("dense_row_residual", rep.row_residual);
    run.add("centered2_rel_l2", rel_l2(r.u.values, dense_feynman(eng, src.v).values));
  }
  run.add("feynman_vs_multiplier", ea);
  run.add("feynman_vs_dense", eb);
  return run.finish(ea < 5e-3 && eb < 1e-6);
}

CriterionResult criterion_inverse_residuals() {
  Run run(7, "inverse residuals", 180.0);
  bool ok = true;
  auto one = [&](const std::string& tag, const ModelMetric& metric, const SpatialGrid& g,
                 const TimeGrid& tg) {
    const PropagatorEngine eng(reduce(metric, g), tg);
    const PropagatorResult r = g_feynman(eng, gaussian_source(g, tg, 3.0));
    CVec phi(g.size());
    for (int j = 0; j < g.size(); ++j) {
      const double x = g.node(j);
      phi[j] = (1.0 + 0.5 * x) * std::exp(-0.5 * x * x);
    }
    const double tau = 4.0;
    SourceSpec src{manufactured_source(eng.model(), tg, tau, phi), -tau, tau};
    const PropagatorResult back = g_feynman(eng, src);
    const SpacetimeFunction u0 = SpacetimeFunction::sample(
        g, tg, [&](double t, double x) -> cplx {
          return smooth_bump(t / tau) * (1.0 + 0.5 * x) * std::exp(-0.5 * x * x);
        });
    const double rt = rel_l2(back.u.values, u0.values);
    run.add(tag + "_residual_P", r.residual_P);
    run.add(tag + "_roundtrip", rt);
    ok = ok && r.residual_P < 1e-4 && rt < 1e-4;
  };
  one("flat", ModelMetric::flat(1.0), SpatialGrid(64, 32.0), TimeGrid::with_step(16.0, 0.05));
  one("bump", ModelMetric::bump(1.0, 0.3, 0.2, 1.5), SpatialGrid(32, 16.0),
      TimeGrid::with_step(24.0, 0.05));
  return run.finish(ok);
}

CriterionResult criterion_feynman_boundary() {
  Run run(8, "Feynman boundary conditions", 300.0);
  const PropagatorEngine& eng = long_bump_engine();
  const SourceSpec src = gaussian_source(eng.grid(), eng.time(), 2.0);
  const BoundaryReport f = feynman_membership(eng, g_feynman(eng, src).u, 4.0, 64.0, 9, 0.15);
  const BoundaryReport r = feynman_membership(eng, g_retarded(eng, src).u, 4.0, 64.0, 9, 0.15);
  double wrong = 0.0;
  for (double v : r.minus_norms) wrong = std::max(wrong, v);
  wrong /= r.peak;
  run.add("plus_exponent", f.plus_zero ? -INFINITY : f.plus_exponent);
  run.add("minus_exponent", f.minus_zero ? -INFINITY : f.minus_exponent);
  run.add("threshold", f.threshold);
  run.add("retarded_wrong_side", wrong);
  run.add("retarded_minus_exponent", r.minus_exponent);
  return run.finish(f.pass && !r.pass && wrong >= 0.1);
}

CriterionResult criterion_isozaki() {
  Run run(9, "Isozaki experiment", 300.0);
  const PropagatorEngine& eng = long_bump_engine();
  const IsozakiReport rep = isozaki_experiment(eng, charged_source(eng.grid(), eng.time()), 0.5,
                                               {0.25, 0.125, 0.0625, 0.03125});
  run.add("identity_residual", rep.identity.residual);
  run.add("control_exponent", rep.control_fit.slope);
  run.add("feynman_wrong_side_exponent", rep.feynman_fit.exact_zero ? INFINITY : rep.feynman_fit.slope);
  run.add("feynman_full_exponent", rep.feynman_full_fit.slope);
  run.add("control_shift", rep.control_shift);
  run.add("feynman_shift", rep.feynman_shift);
  run.add("max_imag", rep.max_imag);
  run.add("max_decomposition", rep.max_decomposition);
  run.note("Feynman branch: wrong-side pairing slope must be >= r+delta-2-0.2");
  return run.finish(rep.pass);
}

CriterionResult criterion_remainder_decay() {
  Run run(10, "diagonalization remainder", 120.0);
  const SpatialGrid g(32, 16.0);
  std::vector<double> times;
  for (int i = 0; i < 9; ++i) times.push_back(4.0 * std::pow(16.0, i / 8.0));
  bool ok = true;
  for (double delta : {1.5, 2.5}) {
    const LogLogFit fit = remainder_decay(reduce(ModelMetric::bump(1.0, 0.3, 0.2, delta), g), times);
    char key[32];
    std::snprintf(key, sizeof key, "slope_delta_%.1f", delta);
    run.add(key, fit.slope);
    ok = ok && fit.slope <= -(1.0 + delta) + 0.3;
  }
  return run.finish(ok);
}

CriterionResult criterion_wavefront() {
  Run run(11, "wavefront probe", 120.0);
  const SpatialGrid g(256, 40.0);
  const TimeGrid tg = TimeGrid::with_step(16.0, 0.05);
  const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
  const SourceSpec src = narrow_source(g, tg);
  const WavefrontProbe probe = WavefrontProbe::light_cone();
  const WavefrontReport f = wavefront_probe(g_feynman(eng, src).u, probe);
  const WavefrontReport c = wavefront_probe(g_causal(eng, src).u, probe);
  const WavefrontReport r = wavefront_probe(g_retarded(eng, src).u, probe);
  double backward = 0.0;
  for (const ProbeSample& s : r.samples)
    if (s.t < probe.source_time) backward = std::max(backward, s.energy);
  backward /= r.peak;
  run.add("feynman_max_ratio", f.max_ratio);
  run.add("causal_min_ratio", c.min_ratio);
  run.add("causal_max_ratio", c.max_ratio);
  run.add("retarded_backward_energy", backward);
  return run.finish(f.pass && c.min_ratio >= 0.2 && c.max_ratio <= 0.8 && backward < 1e-8);
}

CriterionResult criterion_invertibility() {
  Run run(12, "invertibility monitor", 120.0);
  std::vector<double> sigmas;
  for (auto [n, nt] : std::vector<std::pair<int, int>>{{16, 32}, {24, 48}, {32, 64}}) {
    const SpatialGrid g(n, 16.0);
    const TimeGrid tg(8.0, nt);
    const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
    DenseReport rep;
    dense_feynman(eng, gaussian_source(g, tg, 3.0).v, DenseScheme::Centered2, &rep);
    sigmas.push_back(rep.sigma_min);
    run.add("sigma_min_N" + std::to_string(n), rep.sigma_min);
  }
  double worst = 1.0;
  for (std::size_t i = 1; i < sigmas.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) worst = std::min(worst, sigmas[i] / sigmas[j]);
  run.add("worst_ratio", worst);
  return run.finish(worst >= 0.5);
}

std::vector<CriterionResult> run_acceptance(
    unsigned seed, const std::function<void(const CriterionResult&)>& on_result,
    const std::vector<int>& only) {
  const std::vector<std::function<CriterionResult()>> all = {
      [&] { return criterion_projection_algebra(seed); },
      [&] { return criterion_conservation(seed); },
      criterion_evolution_accuracy,
      criterion_causality,
      criterion_green_function,
      criterion_oracle_triangle,
      criterion_inverse_residuals,
      criterion_feynman_boundary,
      criterion_isozaki,
      criterion_remainder_decay,
      criterion_wavefront,
      criterion_invertibility,
  };
  std::vector<CriterionResult> out;
  for (int id = 1; id <= static_cast<int>(all.size()); ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    CriterionResult r;
    try {
      r = all[id - 1]();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "error";
      r.note = e.what();
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %-28s %7.2fs / %.0fs ", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.budget);
  std::string line = head;
  for (const auto& [k, v] : r.metrics) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " %s=%.3g", k.c_str(), v);
    line += buf;
  }
  if (!r.note.empty()) line += "  (" + r.note + ")";
  return line;
}

}  // namespace kgprop
