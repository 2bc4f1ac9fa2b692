#include "doctest.h"

#include <cmath>

#include "kgprop/fit.hpp"
#include "kgprop/grid.hpp"

using namespace kgprop;

TEST_CASE("spatial grid layout and mode slots") {
  const SpatialGrid g(16, 8.0);
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.node(0) == doctest::Approx(-4.0));
  CHECK(g.mode_of_slot(9) == -7);
  for (int m = -8; m < 8; ++m) CHECK(g.mode_of_slot(g.slot_of_mode(m)) == m);
}

TEST_CASE("dft round trip and single-mode coefficient") {
  const SpatialGrid g(32, 2.0 * kPi);
  const GridFunction u = GridFunction::sample(g, [](double x) { return std::exp(kI * 3.0 * x); });
  const ModeVector c = dft(u);
  CHECK(std::abs(c.mode(3)) > 1e-3);
  for (int m = -16; m < 16; ++m)
    if (m != 3) CHECK(std::abs(c.mode(m)) < 1e-12 * std::abs(c.mode(3)));
  CHECK((idft(c).values - u.values).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spectral derivative is exact on resolved modes") {
  const SpatialGrid g(32, 2.0 * kPi);
  const GridFunction u = GridFunction::sample(g, [](double x) { return cplx(std::sin(2.0 * x)); });
  const CVec d = spectral_derivative(g, u.values);
  for (int j = 0; j < g.size(); ++j) CHECK(std::abs(d[j] - 2.0 * std::cos(2.0 * g.node(j))) < 1e-12);
}

TEST_CASE("time grid from a step") {
  const TimeGrid tg = TimeGrid::with_step(16.0, 0.05);
  CHECK(tg.steps() == 640);
  CHECK(tg.time(320) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(tg.index_of(-16.0) == 0);
  CHECK(tg.index_of(16.0) == 640);
}

TEST_CASE("log-log fit recovers a power law") {
  const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  const LogLogFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, 1.0}), NumericalError);
  CHECK(fit_loglog(x, {0.0, 0.0, 0.0, 0.0}, 1e-300).exact_zero);
}
