#pragma once

#include <stdexcept>
#include <string>

namespace crp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Family parameters that break an assumption of the construction
/// (separation of the anchor points, LASSO/BP parameter ranges).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedNormError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A subject answered differently on replay, or broke the fuel contract.
class DeterminismViolation : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// An emitted certificate failed its own re-check. Never expected.
class EngineBugError : public Error {
 public:
  using Error::Error;
};

/// Malformed record from an external subject.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

}  // namespace crp
