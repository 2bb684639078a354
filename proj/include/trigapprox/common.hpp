#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace trigapprox {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// C^q-valued function sampled on the grid of a group, one vector per node.
using GridFunction = std::vector<CVector>;

/// Relative eigenvalue cutoff used for rank decisions on PSD matrices.
inline constexpr double kDefaultRankTol = 1e-12;

/// Thrown when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown for combinations the solver deliberately does not handle
/// (matrix-valued weights with alpha != 2).
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed lower bound exceeded the matching upper bound.
class SandwichViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

}  // namespace trigapprox
