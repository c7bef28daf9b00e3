#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace colombeau {

enum class ErrorCode {
  InvalidArgument,
  EmptyGrid,
  NonFiniteSample,
  GridMismatch,
  KOutsideDomain,
  MissingCertificate,
  GrowthWitnessFailed,
  PointEscapesDomain,
  ProbeNotNearStandard,
  SyntaxError,
  UnknownIdentifier,
  ArityError,
  DomainEvaluationError,
  InvalidProblem,
  UnboundedRhs,
  NonUniformBound,
  EscapeFromLBeta,
  StiffnessFailure,
  PicardNotConverged,
  EtaNotFound,
  MissingLogBound,
  DerivativeUnavailable,
  ConstantsInfeasible,
  IntegrabilityRejected,
  ConfigError,
  QuantityNotApplicable,
};

std::string_view to_string(ErrorCode code);

/// True for errors that mean "the existence hypotheses do not hold"
/// rather than "something went wrong".
bool is_hypothesis_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, SourceSpan span, const std::string& message)
      : Error(code, "line " + std::to_string(span.line) + ", column " +
                        std::to_string(span.column) + ": " + message),
        span_(span) {}

  const SourceSpan& span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

/// Raised when sup |F_eps| over the hypothesis compact grows as eps -> 0.
class UnboundedRhsError : public Error {
 public:
  UnboundedRhsError(ErrorCode code, const std::string& message, double growth_order)
      : Error(code, message), growth_order_(growth_order) {}

  /// Fitted exponent N in sup|F_eps| ~ eps^{-N}.
  double growth_order() const noexcept { return growth_order_; }

 private:
  double growth_order_;
};

class EscapeError : public Error {
 public:
  EscapeError(double eps, double time, const std::string& message)
      : Error(ErrorCode::EscapeFromLBeta, message), eps_(eps), time_(time) {}

  double eps() const noexcept { return eps_; }
  double time() const noexcept { return time_; }

 private:
  double eps_;
  double time_;
};

}  // namespace colombeau
