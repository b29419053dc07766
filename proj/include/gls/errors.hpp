#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gls {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid construction parameter or malformed configuration. `field()` names
/// the offending key (dotted path for config files).
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Total mass of an explicit weight list is not 1.
class NormalizationError : public Error {
 public:
  NormalizationError(double mass, const std::string& what)
      : Error(what), mass_(mass) {}
  double mass() const noexcept { return mass_; }

 private:
  double mass_;
};

/// The residual fell into no rank-1 cylinder at `rank()` (1-based).
class DeltaInfinityError : public Error {
 public:
  explicit DeltaInfinityError(std::size_t rank)
      : Error("point lies in Delta_infinity at rank " + std::to_string(rank)),
        rank_(rank) {}
  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

/// The digit required at some rank does not fit in a 64-bit index.
class DigitOverflowError : public Error {
 public:
  explicit DigitOverflowError(std::size_t rank)
      : Error("digit at rank " + std::to_string(rank) + " exceeds the index range"),
        rank_(rank) {}
  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// phi(x) = 1 has no root on [0,1]; use the sup or limit route instead.
class NoRootError : public Error {
 public:
  using Error::Error;
};

/// Budget schedule exhausted while 1 stayed inside the series bracket.
class IndecisiveBoundError : public Error {
 public:
  IndecisiveBoundError(double x, double lower, double upper);
  double x() const noexcept { return x_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double x_, lower_, upper_;
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class UnsupportedSchemeError : public Error {
 public:
  using Error::Error;
};

}  // namespace gls
