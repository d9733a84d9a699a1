#pragma once

#include <stdexcept>
#include <string>

namespace phsadapt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The polynomial system used for finite-difference null-space vectors is
/// rank deficient, i.e. the nodes are not unisolvent.
class SingularVandermonde : public Error {
 public:
  using Error::Error;
};

/// The local saddle system could not be factorized (duplicate nodes,
/// collinear 2D neighborhoods, ...).
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// The reduced (m+mu) extension matrix is numerically singular.
class DegenerateExtension : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

class InsufficientNodes : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class MaxDepthExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace phsadapt
