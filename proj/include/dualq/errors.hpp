#pragma once

#include <stdexcept>
#include <string>

namespace dualq {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The query point lies outside conv(grid); the local functional is +infinity there.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// The grid spans an affine subspace of dimension < d.
class FlatGridError : public Error {
 public:
  using Error::Error;
};

// Affinely dependent vertices where a simplex was required.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

class SampleOutsideHullError : public Error {
 public:
  using Error::Error;
};

class NonSmoothError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace dualq
