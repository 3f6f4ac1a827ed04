#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace hk {

using cplx = std::complex<double>;
using Index = std::size_t;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr cplx I_unit{0.0, 1.0};

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when a requested operation is outside its supported domain
/// (size caps, oracle ranges, geometry constraints).
class DomainError : public Error {
 public:
  using Error::Error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError("dimension mismatch: " + what);
}

}  // namespace hk
