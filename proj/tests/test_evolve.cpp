#include "doctest.h"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "kgprop/diag.hpp"
#include "kgprop/evolve.hpp"
#include "kgprop/system.hpp"

using namespace kgprop;

TEST_CASE("integrator names") {
  CHECK(parse_integrator("rk4") == Integrator::RK4);
  CHECK(integrator_name(parse_integrator("magnus2")) == "magnus2");
  try {
    parse_integrator("euler");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "evolve.integrator");
  }
}

TEST_CASE("blockwise exponential and inverse of a diagonal-frame generator") {
  const SpatialGrid g(16, 8.0);
  const ReducedModel m = reduce(ModelMetric::bump(1.0, 0.3, 0.2, 1.5), g);
  const OperatorMatrix G = Generator::diagonal(m)(0.3);
  const CMat ref = (cplx(0.0, 0.05) * G.to_dense()).exp();
  const OperatorMatrix E = exp_i(G, 0.05);
  CHECK((E.to_dense() - ref).cwiseAbs().maxCoeff() < 1e-13);
  const CMat inv = ref.inverse();
  CHECK((E.inverse().to_dense() - inv).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((E * E).to_dense().isApprox(ref * ref, 1e-13));
}

TEST_CASE("single-mode flat evolution matches the closed form") {
  const SpatialGrid g(16, 2.0 * kPi);
  const ReducedModel m = reduce(ModelMetric::flat(1.0), g);
  const Evolution evo(Generator::full(m), TimeGrid(5.0, 200));
  const double w = std::sqrt(2.0);
  const TwoComponent f(GridFunction::sample(g, [](double x) { return std::exp(kI * x); }),
                       GridFunction::zeros(g));
  const TwoComponent out = evo.evolve(f, -5.0, 5.0);
  const CVec expect = std::cos(10.0 * w) * f.c0.values;
  CHECK((out.c0.values - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bump evolution: round trip and conserved q^ad") {
  const SpatialGrid g(16, 8.0);
  const ReducedModel m = reduce(ModelMetric::bump(1.0, 0.3, 0.2, 1.5), g);
  const Evolution evo(Generator::diagonal(m), TimeGrid(4.0, 160));
  const TwoComponent f(GridFunction::sample(g, [](double x) { return std::exp(-x * x); }),
                       GridFunction::sample(g, [](double x) { return cplx(0.0, 0.5) * std::exp(-x * x); }));
  const TwoComponent there = evo.evolve(f, -4.0, 4.0);
  const TwoComponent back = evo.evolve(there, 4.0, -4.0);
  CHECK((back.stacked() - f.stacked()).cwiseAbs().maxCoeff() < 1e-12);
  const ConservationReport rep = conservation_monitor(evo, f, q_ad(g), m.weight0(), -4.0, 4.0);
  CHECK(rep.max_drift / rep.reference < 1e-10);
}
