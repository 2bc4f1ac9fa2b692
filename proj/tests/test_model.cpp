#include "doctest.h"

#include <cmath>

#include "kgprop/diag.hpp"
#include "kgprop/system.hpp"

using namespace kgprop;

TEST_CASE("flat reduction is the identity reduction") {
  const SpatialGrid g(16, 8.0);
  const ReducedModel m = reduce(ModelMetric::flat(1.5), g);
  CHECK((m.R(0.7).array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(m.base().is_static());
  // ã = -∂² + m² has symbol k² + m² (the Nyquist derivative is dropped).
  const CMat a = m.a_tilde(3.0).to_dense();
  const CMat ref =
      SpatialOp::multiplier(g, (g.derivative_wavenumbers().array().square() + 2.25).cast<cplx>().matrix())
          .to_dense();
  CHECK((a - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bump metric: reduced operator is weighted self-adjoint and decays to flat") {
  const SpatialGrid g(32, 16.0);
  const ModelMetric bump = ModelMetric::bump(1.0, 0.3, 0.2, 1.5);
  const ReducedModel m = reduce(bump, g);
  CHECK_FALSE(bump.is_static());
  for (double t : {-4.0, 0.0, 2.5}) CHECK(m.selfadjoint_residual(t) < 1e-12);
  CHECK(std::abs(bump.h(400.0, 0.5) - bump.h(1e6, 0.5)) < 1e-2);
}

TEST_CASE("c± algebra for the bump operator") {
  const SpatialGrid g(24, 12.0);
  const ReducedModel m = reduce(ModelMetric::bump(1.0, 0.3, 0.2, 1.5), g);
  const SpatialOp a = m.a_tilde(0.4);
  const OperatorMatrix cp = c_spectral(1, a, m.weight0()), cm = c_spectral(-1, a, m.weight0());
  const OperatorMatrix I = OperatorMatrix::identity(g, OperatorMatrix::Kind::Dense);
  CHECK(max_abs_diff(cp + cm, I) < 1e-11);
  CHECK(max_abs_diff(cp * cp, cp) < 1e-11);
  CHECK(max_abs_diff(cm * cm, cm) < 1e-11);
  CHECK(max_abs_diff(cp * cm, I.scaled(0.0)) < 1e-11);
  const OperatorMatrix H = H_of_t(m, 0.4);
  CHECK(max_abs_diff(H * cp, cp * H) < 1e-10);
}

TEST_CASE("π± are complementary projections") {
  const SpatialGrid g(8, 4.0);
  const OperatorMatrix pp = pi_pm(g, 1), pm = pi_pm(g, -1);
  CHECK(max_abs_diff(pp + pm, OperatorMatrix::identity(g)) == 0.0);
  CHECK(max_abs_diff(pp * pm, OperatorMatrix::identity(g).scaled(0.0)) == 0.0);
  CHECK(max_abs_diff(q_ad(g), pp - pm) == 0.0);
}

TEST_CASE("charge form is preserved by H on the bump") {
  const SpatialGrid g(16, 8.0);
  const ReducedModel m = reduce(ModelMetric::bump(1.0, 0.3, 0.2, 1.5), g);
  const TwoComponent f(GridFunction::sample(g, [](double x) { return std::exp(-x * x + kI * x); }),
                       GridFunction::sample(g, [](double x) { return cplx(0.0, std::exp(-x * x)); }));
  const TwoComponent h(GridFunction::sample(g, [](double x) { return cplx(std::exp(-(x - 1) * (x - 1))); }),
                       GridFunction::sample(g, [](double x) { return cplx(x * std::exp(-x * x)); }));
  CHECK(std::abs(charge_residual(H_of_t(m, -1.0), f, h, m.weight0())) < 1e-12);
}

TEST_CASE("static frame diagonalizes H without remainder") {
  const SpatialGrid g(16, 8.0);
  const ReducedModel m = reduce(ModelMetric::flat(1.0), g);
  const DiagFrame fr = build_frame(m, 0.0);
  CHECK(max_abs_diff(fr.T * fr.Hd * fr.Tinv, H_of_t(m, 0.0)) < 1e-12);
  CHECK(max_abs_diff(fr.Vad, fr.Vad.scaled(0.0)) < 1e-12);
}
