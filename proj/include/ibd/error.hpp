#pragma once

#include <stdexcept>
#include <string>

namespace ibd {

/// Input or precondition failures. The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures at runtime. The CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define IBD_DEFINE_ERROR(Name, Base)        \
  class Name : public Base {                \
   public:                                  \
    explicit Name(const std::string& what)  \
        : Base(#Name ": " + what) {}        \
  };

IBD_DEFINE_ERROR(DisconnectedGraph, ValidationError)
IBD_DEFINE_ERROR(InvalidEdge, ValidationError)
IBD_DEFINE_ERROR(IndexOutOfRange, ValidationError)
IBD_DEFINE_ERROR(DimensionMismatch, ValidationError)
IBD_DEFINE_ERROR(AsymmetricA, ValidationError)
IBD_DEFINE_ERROR(NotSymmetric, ValidationError)
IBD_DEFINE_ERROR(StateSpaceTooLarge, ValidationError)
IBD_DEFINE_ERROR(InvalidConfiguration, ValidationError)
IBD_DEFINE_ERROR(InvalidSchedule, ValidationError)
IBD_DEFINE_ERROR(SupportNotCovered, ValidationError)
IBD_DEFINE_ERROR(ConfigError, ValidationError)

IBD_DEFINE_ERROR(RateOverflow, NumericError)
IBD_DEFINE_ERROR(ExponentOverflow, NumericError)
IBD_DEFINE_ERROR(SingularSystem, NumericError)
IBD_DEFINE_ERROR(QuadratureNotConverged, NumericError)
IBD_DEFINE_ERROR(NotHurwitz, NumericError)
IBD_DEFINE_ERROR(InconclusiveSpectrum, NumericError)
IBD_DEFINE_ERROR(BudgetExceeded, NumericError)

#undef IBD_DEFINE_ERROR

/// Raised by validate_interaction; carries the offending vertex pair.
class PatternViolation : public ValidationError {
 public:
  PatternViolation(int x, int y, double value)
      : ValidationError("PatternViolation: entry (" + std::to_string(x) + "," +
                        std::to_string(y) + ") = " + std::to_string(value) +
                        " but the vertices are not adjacent"),
        x_(x),
        y_(y) {}

  int x() const { return x_; }
  int y() const { return y_; }

 private:
  int x_;
  int y_;
};

}  // namespace ibd
