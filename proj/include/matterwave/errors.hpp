#pragma once

#include <stdexcept>
#include <string>

namespace matterwave {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of the operation (non-slow wave,
/// image at infinity, mismatched grids, non-finite samples, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical guard tripped: the grid cannot represent the request faithfully.
class GuardViolation : public Error {
 public:
  using Error::Error;
};

class SamplingError : public GuardViolation {
 public:
  using GuardViolation::GuardViolation;
};

class SupportError : public GuardViolation {
 public:
  using GuardViolation::GuardViolation;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace matterwave
