#ifndef COQR_ERRORS_HPP
#define COQR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coqr {

// Invalid or inconsistent inputs: bad dimensions, out-of-range parameters,
// malformed files. CLI maps these to exit code 2.
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A computation that cannot be completed: singular systems, iteration
// limits, degenerate selection paths. CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : InputError {
  explicit DimensionMismatch(const std::string& msg) : InputError(msg) {}
};
struct NonFiniteInput : InputError {
  explicit NonFiniteInput(const std::string& msg) : InputError(msg) {}
};
struct TauOutOfRange : InputError {
  explicit TauOutOfRange(const std::string& msg) : InputError(msg) {}
};
struct NonPositiveEntry : InputError {
  explicit NonPositiveEntry(const std::string& msg) : InputError(msg) {}
};
struct EmptyDesign : InputError {
  explicit EmptyDesign(const std::string& msg) : InputError(msg) {}
};
struct DegenerateDesign : InputError {
  explicit DegenerateDesign(const std::string& msg) : InputError(msg) {}
};
struct NegativeLambda : InputError {
  explicit NegativeLambda(const std::string& msg) : InputError(msg) {}
};
struct NonPositiveWeight : InputError {
  explicit NonPositiveWeight(const std::string& msg) : InputError(msg) {}
};
struct UnsupportedDistribution : InputError {
  explicit UnsupportedDistribution(const std::string& msg) : InputError(msg) {}
};
struct OutOfDomain : InputError {
  explicit OutOfDomain(const std::string& msg) : InputError(msg) {}
};
struct FoldTooSmall : InputError {
  explicit FoldTooSmall(const std::string& msg) : InputError(msg) {}
};
struct ConstantResponse : InputError {
  explicit ConstantResponse(const std::string& msg) : InputError(msg) {}
};

// CSV ingestion failure with 1-based row/column location.
struct ParseError : InputError {
  ParseError(const std::string& msg, std::size_t row, std::size_t col)
      : InputError(msg + " (row " + std::to_string(row) + ", column " +
                   std::to_string(col) + ")"),
        row(row), col(col) {}
  std::size_t row;
  std::size_t col;
};

struct IterationLimitExceeded : NumericalError {
  explicit IterationLimitExceeded(const std::string& msg) : NumericalError(msg) {}
};
struct SingularSystem : NumericalError {
  explicit SingularSystem(const std::string& msg) : NumericalError(msg) {}
};
struct FactorizationFailure : NumericalError {
  explicit FactorizationFailure(const std::string& msg) : NumericalError(msg) {}
};
struct ZeroLossDegenerate : NumericalError {
  explicit ZeroLossDegenerate(const std::string& msg) : NumericalError(msg) {}
};
struct AllLambdasDegenerate : NumericalError {
  explicit AllLambdasDegenerate(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace coqr

#endif  // COQR_ERRORS_HPP
