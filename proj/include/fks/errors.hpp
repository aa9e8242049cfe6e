#pragma once

#include <stdexcept>
#include <string>

namespace fks {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid order, parameter or precondition.
class ParameterError : public Error {
  public:
    using Error::Error;
};

// A numerical routine could not reach its tolerance.
class AccuracyError : public Error {
  public:
    AccuracyError(const std::string& what, double estimate)
        : Error(what), estimate_(estimate) {}
    double estimate() const noexcept { return estimate_; }

  private:
    double estimate_;
};

// Malformed input data, e.g. a spectrum that is not Hermitian.
class DataError : public Error {
  public:
    using Error::Error;
};

// The grid cannot resolve the requested feature.
class ResolutionError : public Error {
  public:
    using Error::Error;
};

// Exponents outside the region where a decay law holds.
class DomainError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class ContractionFailure : public Error {
  public:
    using Error::Error;
};

}  // namespace fks
