#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kgprop {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CRowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration. `key()` names the offending setting.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Shape or binding mismatch between grids and fields.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Metric outside the validated regime (non-positive h, negative spectrum).
class InvalidMetricError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: blow-up, non-convergence, singular systems, degenerate fits.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgprop
