#pragma once

#include <stdexcept>
#include <string>

namespace thetacong {

/// Base for every failure raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

class InvalidRank : public Error {
public:
  using Error::Error;
};

class UnknownLabel : public Error {
public:
  using Error::Error;
};

/// A lattice failed one of its build-time invariants (det, evenness, roots).
class ConstructionFailure : public Error {
public:
  using Error::Error;
};

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

class ShellMissing : public Error {
public:
  using Error::Error;
};

class BoxUnderflow : public Error {
public:
  using Error::Error;
};

class CacheMiss : public Error {
public:
  using Error::Error;
};

class CorruptCache : public Error {
public:
  using Error::Error;
};

}  // namespace thetacong
