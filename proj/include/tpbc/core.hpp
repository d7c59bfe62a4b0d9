#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tpbc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed model or scenario document.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid document violating a type invariant; message names the field.
struct ValidationError : Error {
  using Error::Error;
};

// Task Jacobian too close to rank deficiency for the requested quantity.
struct SingularityError : Error {
  using Error::Error;
};

// Euler-angle chart breaks down (pitch at +-pi/2).
struct EulerSingularityError : Error {
  using Error::Error;
};

}  // namespace tpbc
