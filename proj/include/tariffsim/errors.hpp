#pragma once

#include <stdexcept>
#include <string>

namespace tariffsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyGroup : public Error {
 public:
  using Error::Error;
};

class MixedYearLength : public Error {
 public:
  using Error::Error;
};

class DegenerateWindow : public Error {
 public:
  using Error::Error;
};

class ZeroPeakEnergy : public Error {
 public:
  using Error::Error;
};

class NoSubsidizers : public Error {
 public:
  using Error::Error;
};

class ZeroBaseBill : public Error {
 public:
  using Error::Error;
};

class EmptyCategory : public Error {
 public:
  using Error::Error;
};

class InfeasibleShares : public Error {
 public:
  using Error::Error;
};

}  // namespace tariffsim
