#include "kgprop/operators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

namespace kgprop {

namespace {

// Zero off-diagonal N×N blocks, as in the diagonal frame.
bool block_diagonal(const CMat& m) {
  const Eigen::Index n = m.rows() / 2;
  return m.topRightCorner(n, n).isZero(0.0) && m.bottomLeftCorner(n, n).isZero(0.0);
}

}  // namespace

// ---------------------------------------------------------------- SpatialOp

SpatialOp SpatialOp::multiplier(const SpatialGrid& g, CVec symbol) {
  if (symbol.size() != g.size()) throw ShapeError("multiplier symbol length mismatch");
  SpatialOp op(g, Kind::Multiplier);
  op.symbol_ = std::move(symbol);
  return op;
}

SpatialOp SpatialOp::scalar(const SpatialGrid& g, cplx c) {
  return multiplier(g, CVec::Constant(g.size(), c));
}

SpatialOp SpatialOp::dense(const SpatialGrid& g, CMat nodal) {
  if (nodal.rows() != g.size() || nodal.cols() != g.size())
    throw ShapeError("dense operator shape mismatch");
  SpatialOp op(g, Kind::Dense);
  op.matrix_ = std::move(nodal);
  return op;
}

SpatialOp SpatialOp::pointwise(const SpatialGrid& g, const CVec& f) {
  if (f.size() != g.size()) throw ShapeError("pointwise factor length mismatch");
  return dense(g, f.asDiagonal().toDenseMatrix());
}

CVec SpatialOp::apply(const CVec& v, Basis b) const {
  if (v.size() != grid_.size()) throw ShapeError("SpatialOp::apply: size mismatch");
  if (kind_ == Kind::Multiplier) {
    if (b == Basis::Modes) return symbol_.cwiseProduct(v);
    return to_nodes(grid_, symbol_.cwiseProduct(to_modes(grid_, v)));
  }
  if (b == Basis::Modes) throw ShapeError("dense operator applied to mode coefficients");
  return matrix_ * v;
}

GridFunction SpatialOp::apply(const GridFunction& u) const {
  if (!(u.grid == grid_)) throw ShapeError("SpatialOp::apply: grid mismatch");
  return {grid_, apply(u.values, Basis::Nodes)};
}

CMat SpatialOp::to_dense() const {
  if (kind_ == Kind::Dense) return matrix_;
  const int n = grid_.size();
  CMat m(n, n);
  for (int j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    m.col(j) = apply(e, Basis::Nodes);
  }
  return m;
}

SpatialOp SpatialOp::operator*(const SpatialOp& o) const {
  if (!(grid_ == o.grid_)) throw ShapeError("SpatialOp composition: grid mismatch");
  if (kind_ == Kind::Multiplier && o.kind_ == Kind::Multiplier)
    return multiplier(grid_, symbol_.cwiseProduct(o.symbol_));
  if (kind_ == Kind::Dense && o.kind_ == Kind::Dense) return dense(grid_, matrix_ * o.matrix_);
  return dense(grid_, to_dense() * o.to_dense());
}

SpatialOp SpatialOp::operator+(const SpatialOp& o) const {
  if (!(grid_ == o.grid_)) throw ShapeError("SpatialOp sum: grid mismatch");
  if (kind_ == Kind::Multiplier && o.kind_ == Kind::Multiplier)
    return multiplier(grid_, symbol_ + o.symbol_);
  return dense(grid_, to_dense() + o.to_dense());
}

SpatialOp SpatialOp::operator-(const SpatialOp& o) const { return *this + o.scaled(-1.0); }

SpatialOp SpatialOp::scaled(cplx c) const {
  SpatialOp r = *this;
  if (kind_ == Kind::Multiplier)
    r.symbol_ *= c;
  else
    r.matrix_ *= c;
  return r;
}

// --------------------------------------------------------- WeightedSpectrum

WeightedSpectrum::WeightedSpectrum(const SpatialOp& a, const RVec& weight) : grid_(a.grid()) {
  const int n = grid_.size();
  if (weight.size() != n) throw ShapeError("WeightedSpectrum: weight length mismatch");
  if (a.kind() == SpatialOp::Kind::Multiplier) {
    multiplier_ = true;
    eigenvalues_ = a.symbol().real();
    const double scale = std::max(1.0, a.symbol().cwiseAbs().maxCoeff());
    asymmetry_ = a.symbol().imag().cwiseAbs().maxCoeff() / scale;
    return;
  }
  multiplier_ = false;
  sqrt_w_ = weight.cwiseSqrt();
  const RVec inv = sqrt_w_.cwiseInverse();
  CMat s = sqrt_w_.asDiagonal() * a.matrix() * inv.asDiagonal();
  const double norm = std::max(s.norm(), 1e-300);
  asymmetry_ = (s - s.adjoint()).norm() / norm;
  s = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolve failed");
  eigenvalues_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

SpatialOp WeightedSpectrum::apply_function(const std::function<cplx(double)>& f) const {
  const int n = grid_.size();
  CVec fl(n);
  for (int i = 0; i < n; ++i) fl[i] = f(eigenvalues_[i]);
  if (multiplier_) return SpatialOp::multiplier(grid_, fl);
  const RVec inv = sqrt_w_.cwiseInverse();
  CMat m = inv.asDiagonal() * (vectors_ * fl.asDiagonal() * vectors_.adjoint()) *
           sqrt_w_.asDiagonal();
  return SpatialOp::dense(grid_, std::move(m));
}

// ----------------------------------------------------------- OperatorMatrix

OperatorMatrix OperatorMatrix::from_blocks(const SpatialOp& a, const SpatialOp& b,
                                           const SpatialOp& c, const SpatialOp& d) {
  const SpatialGrid& g = a.grid();
  if (!(b.grid() == g && c.grid() == g && d.grid() == g))
    throw ShapeError("OperatorMatrix blocks on different grids");
  const bool all_mult = a.kind() == SpatialOp::Kind::Multiplier &&
                        b.kind() == SpatialOp::Kind::Multiplier &&
                        c.kind() == SpatialOp::Kind::Multiplier &&
                        d.kind() == SpatialOp::Kind::Multiplier;
  if (all_mult) return mode_blocks(g, a.symbol(), b.symbol(), c.symbol(), d.symbol());
  const int n = g.size();
  CMat m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a.to_dense();
  m.topRightCorner(n, n) = b.to_dense();
  m.bottomLeftCorner(n, n) = c.to_dense();
  m.bottomRightCorner(n, n) = d.to_dense();
  return dense(g, std::move(m));
}

OperatorMatrix OperatorMatrix::mode_blocks(const SpatialGrid& g, CVec a, CVec b, CVec c, CVec d) {
  const int n = g.size();
  if (a.size() != n || b.size() != n || c.size() != n || d.size() != n)
    throw ShapeError("mode block length mismatch");
  OperatorMatrix m(g, Kind::ModeBlocks);
  m.blocks_[0] = std::move(a);
  m.blocks_[1] = std::move(b);
  m.blocks_[2] = std::move(c);
  m.blocks_[3] = std::move(d);
  return m;
}

OperatorMatrix OperatorMatrix::dense(const SpatialGrid& g, CMat mat) {
  if (mat.rows() != 2 * g.size() || mat.cols() != 2 * g.size())
    throw ShapeError("dense operator matrix shape mismatch");
  OperatorMatrix m(g, Kind::Dense);
  m.matrix_ = std::move(mat);
  return m;
}

OperatorMatrix OperatorMatrix::identity(const SpatialGrid& g, Kind k) {
  return constant(g, 1.0, 0.0, 0.0, 1.0, k);
}

OperatorMatrix OperatorMatrix::constant(const SpatialGrid& g, cplx a, cplx b, cplx c, cplx d,
                                        Kind k) {
  const int n = g.size();
  if (k == Kind::ModeBlocks)
    return mode_blocks(g, CVec::Constant(n, a), CVec::Constant(n, b), CVec::Constant(n, c),
                       CVec::Constant(n, d));
  CMat m = CMat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n).diagonal().setConstant(a);
  m.topRightCorner(n, n).diagonal().setConstant(b);
  m.bottomLeftCorner(n, n).diagonal().setConstant(c);
  m.bottomRightCorner(n, n).diagonal().setConstant(d);
  return dense(g, std::move(m));
}

CVec OperatorMatrix::apply(const CVec& v) const {
  const int n = grid_.size();
  if (v.size() != 2 * n) throw ShapeError("OperatorMatrix::apply: size mismatch");
  if (kind_ == Kind::Dense) return matrix_ * v;
  CVec out(2 * n);
  const auto v0 = v.head(n).array();
  const auto v1 = v.tail(n).array();
  out.head(n) = blocks_[0].array() * v0 + blocks_[1].array() * v1;
  out.tail(n) = blocks_[2].array() * v0 + blocks_[3].array() * v1;
  return out;
}

TwoComponent OperatorMatrix::apply(const TwoComponent& f) const {
  if (!(f.grid() == grid_)) throw ShapeError("OperatorMatrix::apply: grid mismatch");
  return from_basis(grid_, apply(to_basis(f, basis())), basis());
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& o) const {
  if (!(grid_ == o.grid_)) throw ShapeError("OperatorMatrix composition: grid mismatch");
  if (kind_ == Kind::ModeBlocks && o.kind_ == Kind::ModeBlocks) {
    const auto& x = blocks_;
    const auto& y = o.blocks_;
    return mode_blocks(grid_,
                       (x[0].array() * y[0].array() + x[1].array() * y[2].array()).matrix(),
                       (x[0].array() * y[1].array() + x[1].array() * y[3].array()).matrix(),
                       (x[2].array() * y[0].array() + x[3].array() * y[2].array()).matrix(),
                       (x[2].array() * y[1].array() + x[3].array() * y[3].array()).matrix());
  }
  if (kind_ == Kind::Dense && o.kind_ == Kind::Dense && block_diagonal(matrix_) &&
      block_diagonal(o.matrix_)) {
    const Eigen::Index n = matrix_.rows() / 2;
    CMat m = CMat::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n).noalias() = matrix_.topLeftCorner(n, n) * o.matrix_.topLeftCorner(n, n);
    m.bottomRightCorner(n, n).noalias() =
        matrix_.bottomRightCorner(n, n) * o.matrix_.bottomRightCorner(n, n);
    return dense(grid_, std::move(m));
  }
  return dense(grid_, to_dense() * o.to_dense());
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& o) const {
  if (!(grid_ == o.grid_)) throw ShapeError("OperatorMatrix sum: grid mismatch");
  if (kind_ == Kind::ModeBlocks && o.kind_ == Kind::ModeBlocks)
    return mode_blocks(grid_, blocks_[0] + o.blocks_[0], blocks_[1] + o.blocks_[1],
                       blocks_[2] + o.blocks_[2], blocks_[3] + o.blocks_[3]);
  return dense(grid_, to_dense() + o.to_dense());
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& o) const {
  return *this + o.scaled(-1.0);
}

OperatorMatrix OperatorMatrix::scaled(cplx c) const {
  OperatorMatrix r = *this;
  if (kind_ == Kind::Dense) {
    r.matrix_ *= c;
  } else {
    for (auto& blk : r.blocks_) blk *= c;
  }
  return r;
}

OperatorMatrix OperatorMatrix::inverse() const {
  if (kind_ == Kind::Dense) {
    if (block_diagonal(matrix_)) {
      const Eigen::Index n = matrix_.rows() / 2;
      CMat m = CMat::Zero(2 * n, 2 * n);
      m.topLeftCorner(n, n) = Eigen::PartialPivLU<CMat>(matrix_.topLeftCorner(n, n)).inverse();
      m.bottomRightCorner(n, n) =
          Eigen::PartialPivLU<CMat>(matrix_.bottomRightCorner(n, n)).inverse();
      return dense(grid_, std::move(m));
    }
    return dense(grid_, Eigen::PartialPivLU<CMat>(matrix_).inverse());
  }
  const CVec det = (blocks_[0].array() * blocks_[3].array() -
                    blocks_[1].array() * blocks_[2].array()).matrix();
  if ((det.array().abs() < 1e-300).any()) throw NumericalError("singular mode block");
  return mode_blocks(grid_, (blocks_[3].array() / det.array()).matrix(),
                     (-blocks_[1].array() / det.array()).matrix(),
                     (-blocks_[2].array() / det.array()).matrix(),
                     (blocks_[0].array() / det.array()).matrix());
}

OperatorMatrix OperatorMatrix::as_dense() const {
  if (kind_ == Kind::Dense) return *this;
  return dense(grid_, to_dense());
}

CMat OperatorMatrix::to_dense() const {
  if (kind_ == Kind::Dense) return matrix_;
  const int n = grid_.size();
  CMat m(2 * n, 2 * n);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m.block(i * n, j * n, n, n) =
          SpatialOp::multiplier(grid_, blocks_[2 * i + j]).to_dense();
  return m;
}

SpatialOp OperatorMatrix::block(int row, int col) const {
  if (row < 0 || row > 1 || col < 0 || col > 1) throw ShapeError("block index out of range");
  if (kind_ == Kind::ModeBlocks) return SpatialOp::multiplier(grid_, blocks_[2 * row + col]);
  const int n = grid_.size();
  return SpatialOp::dense(grid_, matrix_.block(row * n, col * n, n, n));
}

namespace {

// e^{M} for a 2×2 complex matrix via e^{μ}[cosh(s) 1 + sinh(s)/s (M - μ)],
// μ = tr/2, s² = ((a-d)/2)² + bc. Both cosh(s) and sinh(s)/s are even in s.
void exp2x2(cplx a, cplx b, cplx c, cplx d, cplx out[4]) {
  const cplx mu = 0.5 * (a + d);
  const cplx half = 0.5 * (a - d);
  const cplx z = half * half + b * c;
  cplx ch, shc;
  if (std::abs(z) < 1e-8) {
    ch = 1.0 + z / 2.0 + z * z / 24.0;
    shc = 1.0 + z / 6.0 + z * z / 120.0;
  } else {
    const cplx s = std::sqrt(z);
    ch = std::cosh(s);
    shc = std::sinh(s) / s;
  }
  const cplx e = std::exp(mu);
  out[0] = e * (ch + shc * half);
  out[1] = e * shc * b;
  out[2] = e * shc * c;
  out[3] = e * (ch - shc * half);
}

}  // namespace

OperatorMatrix exp_i(const OperatorMatrix& g, double h) {
  const cplx f = kI * h;
  if (g.kind() == OperatorMatrix::Kind::Dense) {
    const CMat& x = g.matrix();
    const Eigen::Index n = x.rows() / 2;
    // Block-diagonal generators exponentiate blockwise; diag(A, -A) needs one exponential.
    if (block_diagonal(x)) {
      CMat m = CMat::Zero(2 * n, 2 * n);
      m.topLeftCorner(n, n) = (f * x.topLeftCorner(n, n)).exp();
      if ((x.bottomRightCorner(n, n) + x.topLeftCorner(n, n)).isZero(0.0))
        m.bottomRightCorner(n, n) = Eigen::PartialPivLU<CMat>(m.topLeftCorner(n, n)).inverse();
      else
        m.bottomRightCorner(n, n) = (f * x.bottomRightCorner(n, n)).exp();
      return OperatorMatrix::dense(g.grid(), std::move(m));
    }
    CMat m = (f * x).exp();
    return OperatorMatrix::dense(g.grid(), std::move(m));
  }
  const int n = g.grid().size();
  CVec a(n), b(n), c(n), d(n);
  for (int s = 0; s < n; ++s) {
    cplx out[4];
    exp2x2(f * g.a()[s], f * g.b()[s], f * g.c()[s], f * g.d()[s], out);
    a[s] = out[0];
    b[s] = out[1];
    c[s] = out[2];
    d[s] = out[3];
  }
  return OperatorMatrix::mode_blocks(g.grid(), a, b, c, d);
}

double max_abs_diff(const OperatorMatrix& x, const OperatorMatrix& y) {
  if (x.kind() == OperatorMatrix::Kind::ModeBlocks && y.kind() == OperatorMatrix::Kind::ModeBlocks) {
    double m = 0.0;
    m = std::max(m, (x.a() - y.a()).cwiseAbs().maxCoeff());
    m = std::max(m, (x.b() - y.b()).cwiseAbs().maxCoeff());
    m = std::max(m, (x.c() - y.c()).cwiseAbs().maxCoeff());
    m = std::max(m, (x.d() - y.d()).cwiseAbs().maxCoeff());
    return m;
  }
  return (x.to_dense() - y.to_dense()).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------------ bases

CVec field_to_basis(const SpatialGrid& g, const CVec& nodal, Basis b) {
  return b == Basis::Modes ? to_modes(g, nodal) : nodal;
}

CVec field_from_basis(const SpatialGrid& g, const CVec& v, Basis b) {
  return b == Basis::Modes ? to_nodes(g, v) : v;
}

CVec to_basis(const TwoComponent& f, Basis b) {
  const int n = f.grid().size();
  CVec v(2 * n);
  v.head(n) = field_to_basis(f.grid(), f.c0.values, b);
  v.tail(n) = field_to_basis(f.grid(), f.c1.values, b);
  return v;
}

TwoComponent from_basis(const SpatialGrid& g, const CVec& v, Basis b) {
  const int n = g.size();
  if (v.size() != 2 * n) throw ShapeError("from_basis: size mismatch");
  return {GridFunction(g, field_from_basis(g, v.head(n), b)),
          GridFunction(g, field_from_basis(g, v.tail(n), b))};
}

const RMat& derivative_matrix(const SpatialGrid& g) {
  static std::map<std::pair<int, double>, RMat> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_pair(g.size(), g.length());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int n = g.size();
  RMat d(n, n);
  for (int j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    d.col(j) = spectral_derivative(g, e, 1).real();
  }
  return cache.emplace(key, std::move(d)).first->second;
}

}  // namespace kgprop
