#include "kgprop/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "kgprop/fft.hpp"
#include "kgprop/numerics.hpp"

namespace kgprop {

CutoffFamily::CutoffFamily(double r, double epsilon) : r_(r), eps_(epsilon) {
  if (!(r > 0.0 && r < 1.0)) throw ConfigError("analysis.r", "analysis.r must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("analysis.eps_list", "cutoff scales must be positive");
}

double CutoffFamily::chi(double t) const {
  const double a = 1.0 / eps_, b = 2.0 / eps_, p = 1.0 - r_;
  const double s = std::abs(t);
  if (s >= b) return 0.0;
  return (std::pow(b, p) - std::pow(std::max(s, a), p)) / p;
}

double CutoffFamily::dchi(double t) const {
  const double s = std::abs(t);
  if (s < 1.0 / eps_ || s > 2.0 / eps_) return 0.0;
  return (t > 0.0 ? -1.0 : 1.0) * std::pow(s, -r_);
}

RVec CutoffFamily::sample(const TimeGrid& tg) const {
  RVec out(tg.nodes());
  for (int n = 0; n < tg.nodes(); ++n) out[n] = chi(tg.time(n));
  return out;
}

RVec CutoffFamily::cell_derivative(const TimeGrid& tg) const {
  RVec out(tg.steps());
  for (int n = 0; n < tg.steps(); ++n) out[n] = (chi(tg.time(n + 1)) - chi(tg.time(n))) / tg.dt();
  return out;
}

Trajectory ad_trajectory(const PropagatorEngine& eng, const SpacetimeFunction& u) {
  Trajectory w(eng.time().nodes());
  for (int n = 0; n < eng.time().nodes(); ++n) w[n] = eng.ad_data(u, n);
  return w;
}

namespace {

struct Charge {
  cplx q;
  double plus;
  double minus;
};

Charge charge(const CVec& w, const RVec& weight, double dx) {
  const long n = weight.size();
  CVec qw = w;
  qw.tail(n) *= -1.0;
  const double plus = (w.head(n).cwiseAbs2().array() * weight.array()).sum() * dx;
  const double minus = (w.tail(n).cwiseAbs2().array() * weight.array()).sum() * dx;
  return {pair0(w, qw, weight, dx), plus, minus};
}

}  // namespace

PairingResult isozaki_pairing(const ReducedModel& model, const TimeGrid& tg, const Trajectory& w,
                              const CutoffFamily& fam) {
  if (fam.radius() > tg.t_max() + 1e-9)
    throw ConfigError("analysis.eps_list", "2/eps = " + std::to_string(fam.radius()) +
                                               " exceeds time.Tmax");
  if (static_cast<int>(w.size()) != tg.nodes()) throw ShapeError("trajectory length mismatch");
  const RVec& weight = model.weight0();
  const double dx = model.grid().dx();
  const RVec chi = fam.sample(tg);
  PairingResult out;
  out.value = 0.0;
  std::optional<Charge> prev;
  for (int n = 0; n < tg.steps(); ++n) {
    const double jump = chi[n + 1] - chi[n];
    if (jump == 0.0) {
      prev.reset();
      continue;
    }
    const Charge a = prev ? *prev : charge(w[n], weight, dx);
    const Charge b = charge(w[n + 1], weight, dx);
    prev = b;
    out.value += jump * 0.5 * (a.q + b.q);
    out.decomposition += jump * 0.5 * ((a.plus - a.minus) + (b.plus - b.minus));
    if (tg.time(n + 1) <= 0.0)
      out.wrong_side += jump * 0.5 * (a.plus + b.plus);
    else
      out.wrong_side -= jump * 0.5 * (a.minus + b.minus);
  }
  return out;
}

IdentityCheck isozaki_identity(const ReducedModel& model, const CutoffFamily& fam,
                               int nodes_per_panel, double panel) {
  const SpatialGrid& g = model.grid();
  const RVec& weight = model.weight0();
  const double dx = g.dx();
  const double w0 = 1.0;
  CVec fp(g.size()), fm(g.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    fp[j] = std::exp(-(x - 1.0) * (x - 1.0));
    fm[j] = cplx(1.0, 0.2) * std::exp(-0.5 * (x + 1.0) * (x + 1.0));
  }
  const long n = g.size();
  // w = (α f₊, β f₋): α → e^{iω₀t} at +∞ and 0 at -∞, β decays like 1/t.
  auto state = [&](double t, CVec& w, CVec& dw) {
    const cplx ep = std::exp(kI * w0 * t), em = std::exp(-kI * w0 * t);
    const double s = 0.5 * (1.0 + std::tanh(0.5 * t));
    const double ds = 0.25 / (std::cosh(0.5 * t) * std::cosh(0.5 * t));
    const double q = 1.0 + t * t / 16.0;
    const cplx alpha = ep * s, dalpha = ep * (kI * w0 * s + ds);
    const cplx beta = 0.3 * em / std::sqrt(q);
    const cplx dbeta = 0.3 * em * (-kI * w0 / std::sqrt(q) - (t / 16.0) * std::pow(q, -1.5));
    w.resize(2 * n);
    dw.resize(2 * n);
    w.head(n) = alpha * fp;
    w.tail(n) = beta * fm;
    dw.head(n) = dalpha * fp;
    dw.tail(n) = dbeta * fm;
  };
  auto integrate = [&](double a, double b, auto&& f) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
    const double h = (b - a) / panels;
    const auto [xs, ws] = gauss_legendre(nodes_per_panel, 0.0, h);
    double sum = 0.0;
    for (int p = 0; p < panels; ++p)
      for (int i = 0; i < nodes_per_panel; ++i) sum += ws[i] * f(a + p * h + xs[i]);
    return sum;
  };
  const double ra = 1.0 / fam.epsilon(), rb = fam.radius();
  auto lhs_f = [&](double t) {
    CVec w, dw;
    state(t, w, dw);
    return fam.dchi(t) * charge(w, weight, dx).q.real();
  };
  auto rhs_f = [&](double t) {
    CVec w, dw;
    state(t, w, dw);
    const CVec gsrc = -kI * dw - build_frame(model, t).H_ad().apply(w);
    CVec qg = gsrc;
    qg.tail(n) *= -1.0;
    return 2.0 * fam.chi(t) * pair0(w, qg, weight, dx).imag();
  };
  IdentityCheck out;
  out.lhs = integrate(-rb, -ra, lhs_f) + integrate(ra, rb, lhs_f);
  out.rhs = integrate(-rb, -ra, rhs_f) + integrate(-ra, ra, rhs_f) + integrate(ra, rb, rhs_f);
  out.residual = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.lhs), 1e-300);
  return out;
}

namespace {

LogLogFit fit_or_empty(const std::vector<double>& x, const std::vector<double>& y, double tol) {
  if (x.size() < 3) return {};
  return fit_loglog(x, y, tol);
}

}  // namespace

IsozakiReport isozaki_experiment(const PropagatorEngine& eng, const SourceSpec& src, double r,
                                 const std::vector<double>& eps_list) {
  if (eps_list.size() < 3)
    throw ConfigError("analysis.eps_list", "need at least three cutoff scales for a fit");
  // Reject unreachable scales before any solve.
  for (double e : eps_list)
    if (CutoffFamily(r, e).radius() > eng.time().t_max() + 1e-9)
      throw ConfigError("analysis.eps_list", "2/eps = " + std::to_string(2.0 / e) +
                                                 " exceeds time.Tmax");
  IsozakiReport rep;
  rep.r = r;
  rep.delta = eng.model().base().delta();
  rep.eps = eps_list;
  const ReducedModel& model = eng.model();
  const TimeGrid& tg = eng.time();

  const Trajectory wf = ad_trajectory(eng, g_feynman(eng, src).u);
  const Trajectory wr = ad_trajectory(eng, g_retarded(eng, src).u);

  auto track = [&](const PairingResult& p) {
    const double mag = std::abs(p.value);
    if (mag == 0.0) return;
    rep.max_imag = std::max(rep.max_imag, std::abs(p.value.imag()) / mag);
    rep.max_decomposition =
        std::max(rep.max_decomposition, std::abs(p.value.real() - p.decomposition) / mag);
  };
  for (double e : eps_list) {
    const CutoffFamily fam(r, e);
    const PairingResult pf = isozaki_pairing(model, tg, wf, fam);
    const PairingResult pr = isozaki_pairing(model, tg, wr, fam);
    track(pf);
    track(pr);
    rep.feynman_pairing.push_back(pf.value.real());
    rep.feynman_wrong_side.push_back(pf.wrong_side);
    rep.control_pairing.push_back(pr.value.real());
  }

  auto absolute = [](std::vector<double> v) {
    for (double& x : v) x = std::abs(x);
    return v;
  };
  const std::vector<double> ctrl = absolute(rep.control_pairing);
  const std::vector<double> wrong = absolute(rep.feynman_wrong_side);
  const std::vector<double> full = absolute(rep.feynman_pairing);
  const double scale = std::max(*std::max_element(full.begin(), full.end()),
                                *std::max_element(ctrl.begin(), ctrl.end()));
  const double floor = 1e-13 * scale;

  rep.control_fit = fit_loglog(rep.eps, ctrl, floor);
  rep.feynman_fit = fit_loglog(rep.eps, wrong, floor);
  rep.feynman_full_fit = fit_loglog(rep.eps, full, floor);

  const std::vector<double> eh(rep.eps.begin() + 1, rep.eps.end());
  const LogLogFit ch = fit_or_empty(eh, {ctrl.begin() + 1, ctrl.end()}, floor);
  const LogLogFit fh = fit_or_empty(eh, {wrong.begin() + 1, wrong.end()}, floor);
  if (eh.size() >= 3) {
    rep.control_shift = std::abs(ch.slope - rep.control_fit.slope);
    rep.feynman_shift =
        rep.feynman_fit.exact_zero ? 0.0 : std::abs(fh.slope - rep.feynman_fit.slope);
  }

  rep.identity = isozaki_identity(model, CutoffFamily(r, rep.eps.front()));

  rep.control_pass =
      !rep.control_fit.exact_zero && std::abs(rep.control_fit.slope - (r - 1.0)) <= 0.15;
  rep.feynman_pass =
      rep.feynman_fit.exact_zero || rep.feynman_fit.slope >= r + rep.delta - 2.0 - 0.2;
  rep.identity_pass = rep.identity.residual < 1e-8;
  rep.pass = rep.control_pass && rep.feynman_pass && rep.identity_pass;
  return rep;
}

SourceSpec charged_source(const SpatialGrid& g, const TimeGrid& tg, double omega0, double tau,
                          double sigma) {
  return SourceSpec::sample(
      g, tg,
      [&](double t, double x) {
        return std::exp(kI * omega0 * t) * smooth_bump(t / tau) * std::exp(-x * x / (sigma * sigma));
      },
      -tau, tau);
}

SourceSpec narrow_source(const SpatialGrid& g, const TimeGrid& tg, double tau, double sigma) {
  if (sigma < 3.0 * g.dx())
    throw ConfigError("probe.window", "source width must cover at least 3 grid cells");
  return SourceSpec::sample(
      g, tg,
      [&](double t, double x) -> cplx {
        return smooth_bump(t / tau) * std::exp(-0.5 * x * x / (sigma * sigma));
      },
      -tau, tau);
}

WavefrontProbe WavefrontProbe::light_cone(const std::vector<double>& times, double c,
                                          double window) {
  WavefrontProbe p;
  p.window = window;
  for (int side : {1, -1})
    for (double t : times)
      for (int dir : {1, -1}) {
        p.t.push_back(side * t);
        p.x.push_back(dir * c * t);
      }
  return p;
}

WavefrontReport wavefront_probe(const SpacetimeFunction& u, const WavefrontProbe& probe) {
  const SpatialGrid& g = u.grid;
  const TimeGrid& tg = u.time;
  const double sigma = probe.window;
  if (!(sigma > 0.0)) throw ConfigError("probe.window", "probe.window must be positive");
  const int ht = static_cast<int>(std::ceil(5.0 * sigma / tg.dt()));
  const int hx = static_cast<int>(std::ceil(5.0 * sigma / g.dx()));
  if (2 * hx + 1 > g.size())
    throw ConfigError("probe.window", "probe window is wider than the spatial box");
  int m = 1;
  while (m < 4 * (2 * ht + 1)) m *= 2;

  WavefrontReport rep;
  rep.min_ratio = 1.0;
  for (std::size_t p = 0; p < probe.t.size(); ++p) {
    const double t0 = probe.t[p], x0 = probe.x[p];
    const int n0 = static_cast<int>(std::lround((t0 - tg.t_min()) / tg.dt()));
    if (n0 - ht < 0 || n0 + ht > tg.steps())
      throw ConfigError("probe.window", "probe window around t = " + std::to_string(t0) +
                                            " is clipped by the time grid");
    const int j0 = static_cast<int>(std::lround((x0 - g.node(0)) / g.dx()));
    ProbeSample s;
    s.t = t0;
    s.x = x0;
    s.expected = t0 > probe.source_time ? 1 : -1;
    double total = 0.0, wrong = 0.0;
    for (int dj = -hx; dj <= hx; ++dj) {
      const int j = ((j0 + dj) % g.size() + g.size()) % g.size();
      const double xr = g.node(0) + (j0 + dj) * g.dx() - x0;
      const double wx = std::exp(-0.5 * xr * xr / (sigma * sigma));
      CVec row = CVec::Zero(m);
      for (int dn = -ht; dn <= ht; ++dn) {
        const double tr = tg.time(n0 + dn) - t0;
        row[dn + ht] = u.values(n0 + dn, j) * wx * std::exp(-0.5 * tr * tr / (sigma * sigma));
      }
      const CVec spec = fft::forward(row);
      for (int k = 0; k < m; ++k) {
        const double e = std::norm(spec[k]);
        total += e;
        if (k == 0 || k == m / 2)
          wrong += 0.5 * e;
        else if ((k < m / 2) != (s.expected > 0))
          wrong += e;
      }
    }
    s.energy = total / m * tg.dt() * g.dx();
    s.wrong_energy = wrong / m * tg.dt() * g.dx();
    s.ratio = total > 0.0 ? wrong / total : 0.0;
    rep.peak = std::max(rep.peak, s.energy);
    rep.max_ratio = std::max(rep.max_ratio, s.ratio);
    rep.min_ratio = std::min(rep.min_ratio, s.ratio);
    rep.samples.push_back(s);
  }
  rep.pass = rep.max_ratio < probe.threshold;
  return rep;
}

}  // namespace kgprop
