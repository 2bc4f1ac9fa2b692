#include "doctest.h"

#include <cmath>

#include "kgprop/analysis.hpp"

using namespace kgprop;

TEST_CASE("cutoff family: closed form derivative and support") {
  const CutoffFamily fam(0.5, 0.25);
  CHECK(fam.radius() == 8.0);
  CHECK(fam.chi(9.0) == 0.0);
  CHECK(fam.chi(-2.0) == fam.chi(0.0));
  const double h = 1e-5;
  for (double t : {-7.0, -5.5, 4.2, 6.9}) {
    const double fd = (fam.chi(t + h) - fam.chi(t - h)) / (2.0 * h);
    CHECK(std::abs(fd - fam.dchi(t)) < 1e-8);
  }
  const TimeGrid tg = TimeGrid::with_step(10.0, 0.1);
  CHECK(std::abs(fam.cell_derivative(tg).sum() * tg.dt()) < 1e-13);
}

TEST_CASE("cutoff family rejects bad parameters") {
  try {
    CutoffFamily(1.5, 0.1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "analysis.r");
  }
  CHECK_THROWS_AS(CutoffFamily(0.5, -1.0), ConfigError);
}

TEST_CASE("pairing of trivial trajectories") {
  const SpatialGrid g(16, 8.0);
  const ReducedModel m = reduce(ModelMetric::flat(1.0), g);
  const TimeGrid tg = TimeGrid::with_step(10.0, 0.1);
  const CutoffFamily fam(0.5, 0.25);

  const Trajectory zero(tg.nodes(), CVec::Zero(2 * g.size()));
  const PairingResult z = isozaki_pairing(m, tg, zero, fam);
  CHECK(std::abs(z.value) == 0.0);

  // Constant π⁺ content: ∫∂χ‖f‖² vanishes, the t < 0 half gives χ(0)‖f‖².
  CVec w = CVec::Zero(2 * g.size());
  w.head(g.size()).setOnes();
  const Trajectory plus(tg.nodes(), w);
  const PairingResult p = isozaki_pairing(m, tg, plus, fam);
  const double norm2 = g.length() * m.weight0().mean();
  CHECK(std::abs(p.value) < 1e-12 * norm2 * fam.chi(0.0));
  CHECK(p.wrong_side == doctest::Approx(norm2 * fam.chi(0.0)).epsilon(1e-10));

  CHECK_THROWS_AS(isozaki_pairing(m, tg, plus, CutoffFamily(0.5, 0.1)), ConfigError);
}

TEST_CASE("pairing identity on a manufactured bump trajectory") {
  const SpatialGrid g(16, 8.0);
  const ReducedModel m = reduce(ModelMetric::bump(1.0, 0.3, 0.2, 1.5), g);
  const IdentityCheck id = isozaki_identity(m, CutoffFamily(0.5, 0.25));
  CHECK(id.residual < 1e-9);
}

TEST_CASE("narrow source must be resolved") {
  const SpatialGrid g(16, 16.0);
  const TimeGrid tg = TimeGrid::with_step(8.0, 0.1);
  try {
    narrow_source(g, tg, 0.6, 0.5);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "probe.window");
  }
}
