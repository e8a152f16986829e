#pragma once

#include <stdexcept>
#include <string>

namespace kemweb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, empty box, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit a singular set: division by zero, log of a non-positive
/// value, sqrt of a negative value, or a non-finite intermediate.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

/// More than half of the requested sample points were singular.
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// A metric component or web factor vanishes (or changes sign) on the box.
class VanishingFactor : public Error {
 public:
  using Error::Error;
};

class DegeneratePlane : public Error {
 public:
  using Error::Error;
};

/// Two constant-eigenvalue blocks share the same constant e_I.
class DuplicateE : public Error {
 public:
  using Error::Error;
};

/// The requested concircular tensor is a constant multiple of the identity.
class TrivialTensor : public Error {
 public:
  using Error::Error;
};

/// A connected web without a connecting coordinate.
class InconsistentWeb : public Error {
 public:
  using Error::Error;
};

}  // namespace kemweb
