#pragma once

#include <stdexcept>
#include <string>

namespace levinv {

/// Base class for every error raised by the library. Callers that only care
/// about "something went wrong numerically" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LEVINV_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

LEVINV_DEFINE_ERROR(RankDeficient);
LEVINV_DEFINE_ERROR(NotPositiveDefinite);
LEVINV_DEFINE_ERROR(DimensionMismatch);
LEVINV_DEFINE_ERROR(IndexOutOfRange);
LEVINV_DEFINE_ERROR(ParseError);
LEVINV_DEFINE_ERROR(GenerationFailed);
LEVINV_DEFINE_ERROR(NonPositiveWeight);
LEVINV_DEFINE_ERROR(HypothesisViolated);
LEVINV_DEFINE_ERROR(BadRange);
LEVINV_DEFINE_ERROR(ProbeInfeasible);

#undef LEVINV_DEFINE_ERROR

/// Raised when a point x makes some residual s_i = (Ax - b)_i vanish.
class ZeroResidualRow : public Error {
 public:
  ZeroResidualRow(const std::string& what, std::size_t row)
      : Error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace levinv
