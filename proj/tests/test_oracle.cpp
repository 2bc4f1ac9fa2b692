#include "doctest.h"

#include <cmath>

#include "kgprop/numerics.hpp"
#include "kgprop/oracle.hpp"

using namespace kgprop;

namespace {

SourceSpec single_mode_source(const SpatialGrid& g, const TimeGrid& tg) {
  return SourceSpec::sample(
      g, tg, [](double t, double x) { return smooth_bump(t / 3.0) * std::exp(kI * x); }, -3.0, 3.0);
}

}  // namespace

TEST_CASE("multiplier kind names") {
  CHECK(parse_multiplier_kind("feyn") == MultiplierSpec::Kind::Feynman);
  CHECK(parse_multiplier_kind("ret") == MultiplierSpec::Kind::Retarded);
  CHECK_THROWS_AS(parse_multiplier_kind("bogus"), ConfigError);
}

TEST_CASE("retarded multiplier agrees with the time-stepped retarded inverse") {
  const SpatialGrid g(16, 2.0 * kPi);
  const TimeGrid tg = TimeGrid::with_step(10.0, 0.05);
  const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
  const SourceSpec src = single_mode_source(g, tg);
  const PropagatorResult r = g_retarded(eng, src);
  MultiplierSpec spec;
  spec.kind = MultiplierSpec::Kind::Retarded;
  const SpacetimeFunction mu = flat_multiplier(spec, 1.0, src.v);
  CHECK((mu.values - r.u.values).norm() / r.u.values.norm() < 1e-2);
  // Nothing before the source switches on.
  CHECK(r.u.values.topRows(tg.index_of(-3.0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.residual_P < 1e-4);
}

TEST_CASE("retarded minus advanced solves the homogeneous equation") {
  const SpatialGrid g(16, 2.0 * kPi);
  const TimeGrid tg = TimeGrid::with_step(8.0, 0.05);
  const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
  const PropagatorResult c = g_causal(eng, single_mode_source(g, tg));
  CHECK(c.residual_P < 1e-4);
}

TEST_CASE("flat Feynman solution has boundary decay on both sides") {
  const SpatialGrid g(16, 2.0 * kPi);
  const TimeGrid tg = TimeGrid::with_step(12.0, 0.05);
  const PropagatorEngine eng(reduce(ModelMetric::flat(1.0), g), tg);
  const PropagatorResult f = g_feynman(eng, single_mode_source(g, tg));
  REQUIRE(f.bc.has_value());
  CHECK(f.bc->pass);
  CHECK(f.residual_P < 1e-4);
}
