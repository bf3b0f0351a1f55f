// error.hpp - exception types thrown by the phaseloss library
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace phaseloss {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments: wrong shapes, non-finite entries, out-of-range parameters.
struct InvalidInput : Error {
  using Error::Error;
};

// A density matrix that is not PSD beyond tolerance.
struct InvalidState : Error {
  using Error::Error;
};

// The 2x2 information matrix cannot be inverted. `null_direction` is the
// unit eigenvector of the smallest eigenvalue, in (phi, eta) order.
struct SingularInformation : Error {
  SingularInformation(const std::string& what, Eigen::Vector2d dir)
      : Error(what), null_direction(std::move(dir)) {}
  Eigen::Vector2d null_direction;
};

// eta at 0 or 1 where a closed form is undefined.
struct DegenerateChannel : Error {
  using Error::Error;
};

struct Unsupported : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace phaseloss
