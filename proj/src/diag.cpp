#include "kgprop/diag.hpp"

#include <cmath>

namespace kgprop {

namespace {

struct Roots {
  SpatialOp eps, half, mhalf;
  double min_eig;
};

Roots roots(const ReducedModel& model, double t) {
  const WeightedSpectrum spec(model.a_tilde(t), model.weight0());
  const double lo = spec.min_eigenvalue();
  if (!(lo > 0.0))
    throw InvalidMetricError("reduced operator has non-positive eigenvalue " +
                             std::to_string(lo) + " at t = " + std::to_string(t));
  return {spec.apply_function([](double l) { return std::sqrt(l); }),
          spec.apply_function([](double l) { return std::pow(l, 0.25); }),
          spec.apply_function([](double l) { return std::pow(l, -0.25); }), lo};
}

std::pair<OperatorMatrix, OperatorMatrix> frame_from(const Roots& r) {
  const double s = 1.0 / std::sqrt(2.0);
  const OperatorMatrix T = OperatorMatrix::from_blocks(r.mhalf.scaled(s), r.mhalf.scaled(s),
                                                       r.half.scaled(s), r.half.scaled(-s));
  const OperatorMatrix Ti = OperatorMatrix::from_blocks(r.half.scaled(s), r.mhalf.scaled(s),
                                                        r.half.scaled(s), r.mhalf.scaled(-s));
  return {T, Ti};
}

OperatorMatrix zero_like(const OperatorMatrix& m) { return m.scaled(0.0); }

std::vector<TwoComponent> probes(const SpatialGrid& g, int set) {
  std::vector<TwoComponent> out;
  const std::vector<double> centers = set == 0 ? std::vector<double>{0.0, 1.5}
                                               : std::vector<double>{-3.0, 3.0};
  const double k = set == 0 ? 0.0 : 1.5;
  for (double c : centers) {
    auto bump = [c, k](double x) { return std::exp(-(x - c) * (x - c)) * std::exp(kI * k * x); };
    out.push_back({GridFunction::sample(g, bump), GridFunction::zeros(g)});
    out.push_back({GridFunction::zeros(g), GridFunction::sample(g, bump)});
  }
  return out;
}

}  // namespace

SpatialOp sqrt_a(const ReducedModel& model, double t) { return roots(model, t).eps; }

double DiagFrame::diagonal_ratio() const {
  const CMat v = Vad.to_dense();
  const int n = v.rows() / 2;
  const double diag = std::hypot(v.topLeftCorner(n, n).norm(), v.bottomRightCorner(n, n).norm());
  const double off = std::hypot(v.topRightCorner(n, n).norm(), v.bottomLeftCorner(n, n).norm());
  if (diag == 0.0 && off == 0.0) return 0.0;
  return off > 0.0 ? diag / off : std::numeric_limits<double>::infinity();
}

std::pair<OperatorMatrix, OperatorMatrix> frame_T(const ReducedModel& model, double t) {
  return frame_from(roots(model, t));
}

DiagFrame build_frame(const ReducedModel& model, double t, double fd_step) {
  const Roots r = roots(model, t);
  auto [T, Ti] = frame_from(r);
  const SpatialGrid& g = model.grid();
  const SpatialOp zero = SpatialOp::scalar(g, 0.0);
  OperatorMatrix Hd = OperatorMatrix::from_blocks(r.eps, zero, zero, r.eps.scaled(-1.0));
  if (Hd.kind() != T.kind()) Hd = Hd.as_dense();
  OperatorMatrix Vad = zero_like(T);
  if (!model.base().is_static()) {
    const double e = fd_step;
    const OperatorMatrix p2 = frame_T(model, t + 2 * e).first;
    const OperatorMatrix p1 = frame_T(model, t + e).first;
    const OperatorMatrix m1 = frame_T(model, t - e).first;
    const OperatorMatrix m2 = frame_T(model, t - 2 * e).first;
    const OperatorMatrix dT =
        (p1.scaled(8.0) - m1.scaled(8.0) - p2 + m2).scaled(1.0 / (12.0 * e));
    Vad = (Ti * dT).scaled(kI);
  }
  return {t, r.eps, r.half, r.mhalf, T, Ti, Hd, Vad, r.min_eig};
}

double remainder_size(const ReducedModel& model, double t, int probe_set) {
  const DiagFrame f = build_frame(model, t);
  if (probe_set == kExactNorm) {
    if (f.Vad.kind() == OperatorMatrix::Kind::ModeBlocks) {
      double worst = 0.0;
      for (int s = 0; s < model.grid().size(); ++s) {
        Eigen::Matrix2cd m;
        m << f.Vad.a()[s], f.Vad.b()[s], f.Vad.c()[s], f.Vad.d()[s];
        worst = std::max(worst, Eigen::JacobiSVD<Eigen::Matrix2cd>(m).singularValues()[0]);
      }
      return worst;
    }
    const int n = model.grid().size();
    RVec sw(2 * n);
    sw << model.weight0().cwiseSqrt(), model.weight0().cwiseSqrt();
    const CMat m = sw.asDiagonal() * f.Vad.matrix() * sw.cwiseInverse().asDiagonal();
    return Eigen::BDCSVD<CMat>(m).singularValues()[0];
  }
  double worst = 0.0;
  for (const auto& p : probes(model.grid(), probe_set))
    worst = std::max(worst, hnorm(f.Vad.apply(p), 0.0) / hnorm(p, 0.0));
  return worst;
}

LogLogFit remainder_decay(const ReducedModel& model, const std::vector<double>& times,
                          int probe_set) {
  if (times.size() < 3) throw NumericalError("remainder_decay: need at least 3 times");
  std::vector<double> xs, ys;
  for (double t : times) {
    xs.push_back(std::sqrt(1.0 + t * t));
    ys.push_back(remainder_size(model, t, probe_set));
  }
  return fit_loglog(xs, ys, 1e-14);
}

}  // namespace kgprop
