#pragma once

#include <functional>

#include "kgprop/grid.hpp"

namespace kgprop {

/// Representation of spatial data inside operator algebra: mode coefficients
/// (slot order, as `to_modes`) or nodal samples.
enum class Basis { Modes, Nodes };

/// Linear operator on fields of one SpatialGrid: either a Fourier multiplier
/// (spatially homogeneous) or a dense N×N matrix acting on nodal samples.
class SpatialOp {
 public:
  enum class Kind { Multiplier, Dense };

  static SpatialOp multiplier(const SpatialGrid& g, CVec symbol);
  static SpatialOp scalar(const SpatialGrid& g, cplx c);
  static SpatialOp dense(const SpatialGrid& g, CMat nodal);
  /// Pointwise multiplication by nodal samples f(x_j).
  static SpatialOp pointwise(const SpatialGrid& g, const CVec& f);

  Kind kind() const { return kind_; }
  const SpatialGrid& grid() const { return grid_; }
  const CVec& symbol() const { return symbol_; }
  const CMat& matrix() const { return matrix_; }

  /// Applies to a vector given in basis `b`. Dense operators require Nodes.
  CVec apply(const CVec& v, Basis b) const;
  GridFunction apply(const GridFunction& u) const;
  CMat to_dense() const;

  SpatialOp operator*(const SpatialOp& o) const;
  SpatialOp operator+(const SpatialOp& o) const;
  SpatialOp operator-(const SpatialOp& o) const;
  SpatialOp scaled(cplx c) const;

 private:
  SpatialOp(SpatialGrid g, Kind k) : grid_(g), kind_(k) {}
  SpatialGrid grid_;
  Kind kind_;
  CVec symbol_;
  CMat matrix_;
};

/// Eigendecomposition of an operator selfadjoint for Σ conj(u) v w_j.
/// Multipliers must have a real symbol; dense operators are symmetrized through
/// W^{1/2} A W^{-1/2} before a Hermitian eigensolve.
class WeightedSpectrum {
 public:
  WeightedSpectrum(const SpatialOp& a, const RVec& weight);

  const RVec& eigenvalues() const { return eigenvalues_; }
  double min_eigenvalue() const { return eigenvalues_.minCoeff(); }
  /// f(A) in the same representation as A.
  SpatialOp apply_function(const std::function<cplx(double)>& f) const;
  /// Relative asymmetry ‖S - S*‖/‖S‖ of the symmetrized matrix (0 for multipliers).
  double asymmetry() const { return asymmetry_; }

 private:
  SpatialGrid grid_;
  bool multiplier_ = true;
  RVec eigenvalues_;
  CMat vectors_;
  RVec sqrt_w_;
  double asymmetry_ = 0.0;
};

/// 2×2 block operator on two-component fields. ModeBlocks stores one 2×2
/// matrix per Fourier slot and acts on stacked mode coefficients; Dense stores
/// a 2N×2N matrix acting on stacked nodal samples.
class OperatorMatrix {
 public:
  enum class Kind { ModeBlocks, Dense };

  static OperatorMatrix from_blocks(const SpatialOp& a, const SpatialOp& b, const SpatialOp& c,
                                    const SpatialOp& d);
  static OperatorMatrix mode_blocks(const SpatialGrid& g, CVec a, CVec b, CVec c, CVec d);
  static OperatorMatrix dense(const SpatialGrid& g, CMat m);
  static OperatorMatrix identity(const SpatialGrid& g, Kind k = Kind::ModeBlocks);
  /// Constant matrix [[a,b],[c,d]] ⊗ 1.
  static OperatorMatrix constant(const SpatialGrid& g, cplx a, cplx b, cplx c, cplx d,
                                 Kind k = Kind::ModeBlocks);

  Kind kind() const { return kind_; }
  Basis basis() const { return kind_ == Kind::ModeBlocks ? Basis::Modes : Basis::Nodes; }
  const SpatialGrid& grid() const { return grid_; }

  /// Stacked vector in this operator's basis.
  CVec apply(const CVec& v) const;
  TwoComponent apply(const TwoComponent& f) const;

  OperatorMatrix operator*(const OperatorMatrix& o) const;
  OperatorMatrix operator+(const OperatorMatrix& o) const;
  OperatorMatrix operator-(const OperatorMatrix& o) const;
  OperatorMatrix scaled(cplx c) const;
  OperatorMatrix inverse() const;
  OperatorMatrix as_dense() const;
  /// 2N×2N matrix acting on stacked nodal samples.
  CMat to_dense() const;
  SpatialOp block(int row, int col) const;

  /// Blocks of a ModeBlocks operator.
  const CVec& a() const { return blocks_[0]; }
  const CVec& b() const { return blocks_[1]; }
  const CVec& c() const { return blocks_[2]; }
  const CVec& d() const { return blocks_[3]; }
  const CMat& matrix() const { return matrix_; }

 private:
  OperatorMatrix(SpatialGrid g, Kind k) : grid_(g), kind_(k) {}
  SpatialGrid grid_;
  Kind kind_;
  CVec blocks_[4];
  CMat matrix_;
};

/// exp(i·h·G). Mode blocks use the closed-form 2×2 exponential; dense
/// operators use a scaling-and-squaring Padé exponential.
OperatorMatrix exp_i(const OperatorMatrix& g, double h);

/// Largest entrywise deviation between two operators (compared densely).
double max_abs_diff(const OperatorMatrix& x, const OperatorMatrix& y);

/// Stacked (c0; c1) in the requested basis, and back.
CVec to_basis(const TwoComponent& f, Basis b);
TwoComponent from_basis(const SpatialGrid& g, const CVec& v, Basis b);
CVec field_to_basis(const SpatialGrid& g, const CVec& nodal, Basis b);
CVec field_from_basis(const SpatialGrid& g, const CVec& v, Basis b);

/// Dense first-derivative matrix (spectral, Nyquist slot zeroed); real.
const RMat& derivative_matrix(const SpatialGrid& g);

}  // namespace kgprop
