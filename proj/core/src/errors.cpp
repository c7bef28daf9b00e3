#include "colombeau/errors.hpp"

namespace colombeau {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::KOutsideDomain: return "KOutsideDomain";
    case ErrorCode::MissingCertificate: return "MissingCertificate";
    case ErrorCode::GrowthWitnessFailed: return "GrowthWitnessFailed";
    case ErrorCode::PointEscapesDomain: return "PointEscapesDomain";
    case ErrorCode::ProbeNotNearStandard: return "ProbeNotNearStandard";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::DomainEvaluationError: return "DomainEvaluationError";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::UnboundedRhs: return "UnboundedRHS";
    case ErrorCode::NonUniformBound: return "NonUniformBound";
    case ErrorCode::EscapeFromLBeta: return "EscapeFromLBeta";
    case ErrorCode::StiffnessFailure: return "StiffnessFailure";
    case ErrorCode::PicardNotConverged: return "PicardNotConverged";
    case ErrorCode::EtaNotFound: return "EtaNotFound";
    case ErrorCode::MissingLogBound: return "MissingLogBound";
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::ConstantsInfeasible: return "ConstantsInfeasible";
    case ErrorCode::IntegrabilityRejected: return "IntegrabilityRejected";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::QuantityNotApplicable: return "QuantityNotApplicable";
  }
  return "Unknown";
}

bool is_hypothesis_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnboundedRhs:
    case ErrorCode::NonUniformBound:
    case ErrorCode::EscapeFromLBeta:
    case ErrorCode::MissingLogBound:
    case ErrorCode::ConstantsInfeasible:
    case ErrorCode::IntegrabilityRejected:
      return true;
    default:
      return false;
  }
}

}  // namespace colombeau
