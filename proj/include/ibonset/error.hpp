#pragma once

#include <stdexcept>
#include <string>

namespace ibonset {

// Base for every domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad shapes, negative masses, out-of-range parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The joint carries no usable dependence (I(X;Y) ~ 0, sigma_2 ~ 0, Sigma_XY = 0).
class NoOnsetError : public Error {
 public:
  using Error::Error;
};

// An iterative solver could not reach any acceptable fixed point.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// kappa <= 0: the second-order theory does not fix the scale of the
// linear correction.
class HigherOrderRequired : public Error {
 public:
  explicit HigherOrderRequired(double kappa)
      : Error("kappa = " + std::to_string(kappa) +
              " <= 0; a higher-order expansion is required"),
        kappa_(kappa) {}
  HigherOrderRequired(double kappa, const std::string& why) : Error(why), kappa_(kappa) {}
  double kappa() const noexcept { return kappa_; }

 private:
  double kappa_;
};

}  // namespace ibonset
