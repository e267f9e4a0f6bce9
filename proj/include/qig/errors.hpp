#pragma once

#include <stdexcept>
#include <string>

namespace qig {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (non-Hermitian matrix, bad trace, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Function evaluated outside its domain (negative argument, support violation).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Time stepping produced an unphysical state; the message suggests a smaller step.
class IntegrationError : public Error {
public:
  using Error::Error;
};

/// A QFI term has a vanishing denominator with a nonvanishing numerator.
class DivergentQfiError : public Error {
public:
  using Error::Error;
};

/// Requested operation has no implementation for the given selector.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

}  // namespace qig
