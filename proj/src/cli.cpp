#include "kgprop/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "kgprop/acceptance.hpp"
#include "kgprop/analysis.hpp"
#include "kgprop/config.hpp"
#include "kgprop/io.hpp"
#include "kgprop/linalg.hpp"
#include "kgprop/numerics.hpp"
#include "kgprop/oracle.hpp"

#ifndef KGPROP_VERSION
#define KGPROP_VERSION "0.0.0"
#endif

namespace kgprop {

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"flat-check", "retarded", "advanced", "causal",
                                             "feynman",    "isozaki",  "wavefront", "decay-check",
                                             "all"};
  return s;
}

namespace {

using json = nlohmann::json;

/// NaN and ±inf are not JSON numbers; they are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

struct Outcome {
  json results = json::object();
  json flags = json::object();
};

PropagatorEngine make_engine(const RunConfig& c) {
  PropagatorOptions opt;
  opt.integrator = parse_integrator(c.evolve_integrator);
  opt.gamma = c.gamma;
  return {reduce(c.metric(), c.grid()), c.time(), opt};
}

SourceSpec configured_source(const RunConfig& c, const SpatialGrid& g, const TimeGrid& tg) {
  SourceSpec src = [&] {
    if (c.source_kind == "charged")
      return charged_source(g, tg, c.source_omega, c.source_tau, c.source_sigma);
    if (c.source_kind == "narrow") return narrow_source(g, tg, c.source_tau, c.source_sigma);
    const double tau = c.source_tau, sigma = c.source_sigma;
    return SourceSpec::sample(
        g, tg,
        [&](double t, double x) -> cplx {
          return smooth_bump(t / tau) * std::exp(-x * x / (sigma * sigma));
        },
        -tau, tau);
  }();
  src.validate();
  return src;
}

json boundary_json(const BoundaryReport& b) {
  return {{"neg_times", vec(b.neg_times)},       {"pos_times", vec(b.pos_times)},
          {"plus_norms", vec(b.plus_norms)},     {"minus_norms", vec(b.minus_norms)},
          {"plus_exponent", num(b.plus_exponent)}, {"minus_exponent", num(b.minus_exponent)},
          {"plus_zero", b.plus_zero},            {"minus_zero", b.minus_zero},
          {"peak", num(b.peak)},                 {"threshold", num(b.threshold)},
          {"pass", b.pass}};
}

void write_norms(const std::string& dir, const SpacetimeFunction& u) {
  std::vector<double> t, v;
  for (int n = 0; n < u.time.nodes(); ++n) {
    t.push_back(u.time.time(n));
    v.push_back(sobolev_norm(u.slice(n), 0.0));
  }
  write_csv(dir + "/norm.csv", "t", "value", t, v);
}

double rel_l2(const CRowMat& a, const CRowMat& b) { return (a - b).norm() / b.norm(); }

void cmd_propagator(const std::string& kind, const RunConfig& c, const std::string& dir,
                    Outcome& out) {
  const PropagatorEngine eng = make_engine(c);
  const SourceSpec src = configured_source(c, eng.grid(), eng.time());
  PropagatorResult r = kind == "retarded"  ? g_retarded(eng, src)
                       : kind == "advanced" ? g_advanced(eng, src)
                       : kind == "causal"   ? g_causal(eng, src)
                                            : g_feynman(eng, src);
  write_field(dir, "u", eng.grid(), eng.time(), r.u.values);
  if (r.u.dt_values) write_field(dir, "dt_u", eng.grid(), eng.time(), *r.u.dt_values);
  write_norms(dir, r.u);
  out.results["residual_P"] = num(r.residual_P);
  out.results["source_norm"] = num(r.source_norm);
  out.results["iterations"] = r.iterations;
  out.results["iteration_diffs"] = vec(r.iteration_diffs);
  out.results["used_fallback"] = r.used_fallback;
  out.flags["residual_P"] = r.residual_P < 1e-4;
  if (kind != "feynman") return;
  if (!r.bc) {
    const double lo = std::max(std::abs(src.t0), std::abs(src.t1)) + 2.0;
    const double hi = 0.8 * eng.time().t_max();
    if (hi > 2.0 * lo) r.bc = feynman_membership(eng, r.u, lo, hi);
  }
  if (r.bc) {
    out.results["bc_report"] = boundary_json(*r.bc);
    out.flags["feynman_bc"] = r.bc->pass;
    write_csv(dir + "/bc_plus.csv", "t", "value", r.bc->neg_times, r.bc->plus_norms);
    write_csv(dir + "/bc_minus.csv", "t", "value", r.bc->pos_times, r.bc->minus_norms);
  } else {
    out.results["bc_report"] = {{"available", false},
                                {"reason", "time.Tmax too short for a boundary fit"}};
  }
}

void cmd_flat_check(const RunConfig& c, const std::string& dir, Outcome& out) {
  if (c.metric_family != "flat")
    throw ConfigError("metric.family", "flat-check requires metric.family = flat");
  const PropagatorEngine eng = make_engine(c);
  const SourceSpec src = configured_source(c, eng.grid(), eng.time());
  const PropagatorResult f = g_feynman(eng, src);
  const PropagatorResult r = g_retarded(eng, src);
  MultiplierSpec ms;
  ms.epsilon = c.oracle_epsilon;
  ms.kind = MultiplierSpec::Kind::Feynman;
  const SpacetimeFunction mf = flat_multiplier(ms, c.mass, src.v);
  ms.kind = MultiplierSpec::Kind::Retarded;
  const SpacetimeFunction mr = flat_multiplier(ms, c.mass, src.v);
  write_field(dir, "u_feynman", eng.grid(), eng.time(), f.u.values);
  write_field(dir, "u_multiplier", eng.grid(), eng.time(), mf.values);
  const double ef = rel_l2(f.u.values, mf.values), er = rel_l2(r.u.values, mr.values);
  out.results["feynman_vs_multiplier"] = num(ef);
  out.results["retarded_vs_multiplier"] = num(er);
  out.results["residual_P"] = num(f.residual_P);
  out.flags["feynman_vs_multiplier"] = ef < 5e-3;
  out.flags["retarded_vs_multiplier"] = er < 1e-2;
  out.flags["residual_P"] = f.residual_P < 1e-4;
  const long unknowns = 2L * eng.grid().size() * eng.time().nodes();
  if (unknowns <= c.oracle_dense_maxN) {
    DenseReport rep;
    const double ed =
        rel_l2(f.u.values, dense_feynman(eng, src.v, DenseScheme::Propagator, &rep,
                                         c.oracle_dense_maxN).values);
    out.results["feynman_vs_dense"] = num(ed);
    out.results["dense_sigma_min"] = num(rep.sigma_min);
    out.flags["feynman_vs_dense"] = ed < 1e-6;
  } else {
    out.results["feynman_vs_dense"] = "skipped: " + std::to_string(unknowns) +
                                      " unknowns exceed oracle.dense.maxN";
  }
}

void cmd_isozaki(const RunConfig& c, const std::string& dir, Outcome& out) {
  const PropagatorEngine eng = make_engine(c);
  const SourceSpec src =
      charged_source(eng.grid(), eng.time(), c.source_omega, c.source_tau, c.source_sigma);
  const IsozakiReport rep = isozaki_experiment(eng, src, c.analysis_r, c.analysis_eps_list);
  write_csv(dir + "/pairing_feynman.csv", "eps", "value", rep.eps, rep.feynman_pairing);
  write_csv(dir + "/pairing_feynman_wrong_side.csv", "eps", "value", rep.eps,
            rep.feynman_wrong_side);
  write_csv(dir + "/pairing_control.csv", "eps", "value", rep.eps, rep.control_pairing);
  out.results["r"] = num(rep.r);
  out.results["delta"] = num(rep.delta);
  out.results["control_exponent"] = num(rep.control_fit.slope);
  out.results["feynman_wrong_side_exponent"] = num(rep.feynman_fit.slope);
  out.results["feynman_wrong_side_zero"] = rep.feynman_fit.exact_zero;
  out.results["feynman_full_exponent"] = num(rep.feynman_full_fit.slope);
  out.results["control_shift"] = num(rep.control_shift);
  out.results["feynman_shift"] = num(rep.feynman_shift);
  out.results["identity_residual"] = num(rep.identity.residual);
  out.results["max_imag"] = num(rep.max_imag);
  out.results["max_decomposition"] = num(rep.max_decomposition);
  out.flags["control_exponent"] = rep.control_pass;
  out.flags["feynman_exponent"] = rep.feynman_pass;
  out.flags["identity"] = rep.identity_pass;
}

void cmd_wavefront(const RunConfig& c, const std::string& dir, Outcome& out) {
  const PropagatorEngine eng = make_engine(c);
  const double sigma = std::max(0.5, 3.0 * eng.grid().dx());
  const SourceSpec src = narrow_source(eng.grid(), eng.time(), 0.6, sigma);
  WavefrontProbe probe = WavefrontProbe::light_cone({6.0, 8.0}, 0.99, c.probe_window);
  probe.threshold = c.probe_threshold;
  const PropagatorResult f = g_feynman(eng, src);
  write_field(dir, "kernel_feynman", eng.grid(), eng.time(), f.u.values);
  const WavefrontReport wf = wavefront_probe(f.u, probe);
  const WavefrontReport wc = wavefront_probe(g_causal(eng, src).u, probe);
  const WavefrontReport wr = wavefront_probe(g_retarded(eng, src).u, probe);
  auto samples = [](const WavefrontReport& w) {
    json a = json::array();
    for (const ProbeSample& s : w.samples)
      a.push_back({{"t", s.t}, {"x", s.x}, {"expected_sign", s.expected},
                   {"energy", num(s.energy)}, {"ratio", num(s.ratio)}});
    return a;
  };
  double backward = 0.0;
  for (const ProbeSample& s : wr.samples)
    if (s.t < probe.source_time) backward = std::max(backward, s.energy);
  backward /= wr.peak;
  out.results["feynman"] = {{"samples", samples(wf)}, {"max_ratio", num(wf.max_ratio)}};
  out.results["causal"] = {{"samples", samples(wc)},
                           {"min_ratio", num(wc.min_ratio)},
                           {"max_ratio", num(wc.max_ratio)}};
  out.results["retarded_backward_energy"] = num(backward);
  out.flags["feynman_ratio"] = wf.pass;
  out.flags["causal_ratio"] = wc.min_ratio >= 0.2 && wc.max_ratio <= 0.8;
  out.flags["retarded_support"] = backward < 1e-8;
}

void cmd_decay_check(const RunConfig& c, const std::string& dir, Outcome& out) {
  const ModelMetric metric = c.metric();
  const SpatialGrid g = c.grid();
  std::vector<double> times;
  const double lo = 2.0, hi = c.time_Tmax;
  if (!(hi > 2.0 * lo)) throw ConfigError("time.Tmax", "decay-check needs time.Tmax > 4");
  for (int i = 0; i < 9; ++i) times.push_back(lo * std::pow(hi / lo, i / 8.0));
  const LogLogFit a = decay_check(metric, g, times);
  const LogLogFit v = remainder_decay(reduce(metric, g), times);
  write_csv(dir + "/metric_decay.csv", "t", "value", a.x, a.y);
  write_csv(dir + "/remainder_decay.csv", "t", "value", v.x, v.y);
  const double delta = metric.delta();
  out.results["metric_slope"] = a.exact_zero ? json("exact_zero") : num(a.slope);
  out.results["remainder_slope"] = v.exact_zero ? json("exact_zero") : num(v.slope);
  out.flags["metric_decay"] = a.exact_zero || a.slope <= -delta + 0.3;
  out.flags["remainder_decay"] = v.exact_zero || v.slope <= -(1.0 + delta) + 0.3;
}

void cmd_all(const RunConfig& c, std::ostream& log, Outcome& out) {
  json crit = json::array();
  for (const CriterionResult& r : run_acceptance(c.seed, [&](const CriterionResult& r) {
         log << format_line(r) << std::endl;
       })) {
    json m = json::object();
    for (const auto& [k, v] : r.metrics) m[k] = num(v);
    crit.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"seconds", r.seconds},
                    {"budget_seconds", r.budget}, {"metrics", m}, {"note", r.note}});
    out.flags["criterion_" + std::to_string(r.id)] = r.pass;
    if (r.id == 7)
      for (const auto& [k, v] : r.metrics)
        if (k == "flat_residual_P") out.results["residual_P"] = num(v);
  }
  out.results["criteria"] = crit;
}

void apply_thread_cap() {
  const char* env = std::getenv("KGPROP_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end || n < 1) throw ConfigError("KGPROP_THREADS", "KGPROP_THREADS must be a positive integer");
  set_thread_cap(static_cast<int>(n));
}

}  // namespace

int run(const CliArgs& args, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg;
  std::string dir;
  try {
    apply_thread_cap();
    if (std::find(subcommands().begin(), subcommands().end(), args.subcommand) ==
        subcommands().end())
      throw ConfigError("subcommand", "unknown subcommand '" + args.subcommand + "'");
    cfg = RunConfig::load(args.config_path, args.overrides);
    dir = args.out_dir.empty() ? cfg.output_dir : args.out_dir;
    std::filesystem::create_directories(dir);
  } catch (const ConfigError& e) {
    log << "configuration error [" << e.key() << "]: " << e.what() << std::endl;
    return 2;
  }

  Outcome out;
  std::string error;
  int status = 0;
  try {
    const std::string& s = args.subcommand;
    if (s == "flat-check")
      cmd_flat_check(cfg, dir, out);
    else if (s == "retarded" || s == "advanced" || s == "causal" || s == "feynman")
      cmd_propagator(s, cfg, dir, out);
    else if (s == "isozaki")
      cmd_isozaki(cfg, dir, out);
    else if (s == "wavefront")
      cmd_wavefront(cfg, dir, out);
    else if (s == "decay-check")
      cmd_decay_check(cfg, dir, out);
    else
      cmd_all(cfg, log, out);
  } catch (const ConfigError& e) {
    log << "configuration error [" << e.key() << "]: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    error = e.what();
    log << "error: " << error << std::endl;
    status = 1;
  }

  bool pass = error.empty();
  for (const auto& [k, v] : out.flags.items()) pass = pass && v.get<bool>();
  if (status == 0 && !pass) status = 1;

  json report = {
      {"schema_version", kReportSchemaVersion},
      {"code_version", KGPROP_VERSION},
      {"subcommand", args.subcommand},
      {"config", cfg.to_map()},
      {"results", out.results},
      {"pass_flags", out.flags},
      {"pass", pass},
      {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
  };
  if (!error.empty()) report["error"] = error;
  std::ofstream(dir + "/report.json") << report.dump(2) << "\n";
  for (const auto& [k, v] : out.flags.items())
    log << (v.get<bool>() ? "PASS " : "FAIL ") << k << "\n";
  log << (pass ? "all checks passed" : "some checks failed") << std::endl;
  return status;
}

}  // namespace kgprop
