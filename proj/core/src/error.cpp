#include "tweetact/error.hpp"

namespace tweetact {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kIo: return "Io";
    case ErrorKind::kParse: return "Parse";
    case ErrorKind::kDuplicateId: return "DuplicateId";
    case ErrorKind::kUnknownLabel: return "UnknownLabel";
    case ErrorKind::kMissingVotes: return "MissingVotes";
    case ErrorKind::kEmptyClass: return "EmptyClass";
    case ErrorKind::kInserterFailure: return "InserterFailure";
    case ErrorKind::kPlanMismatch: return "PlanMismatch";
    case ErrorKind::kRowNotNormalized: return "RowNotNormalized";
    case ErrorKind::kClassOrderMismatch: return "ClassOrderMismatch";
    case ErrorKind::kIdMismatch: return "IdMismatch";
    case ErrorKind::kWeightCountMismatch: return "WeightCountMismatch";
    case ErrorKind::kEmptyRow: return "EmptyRow";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kEmptyMatrix: return "EmptyMatrix";
    case ErrorKind::kMalformedReport: return "MalformedReport";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kBackendFailure: return "BackendFailure";
    case ErrorKind::kTooShort: return "TooShort";
    case ErrorKind::kBackendUnavailable: return "BackendUnavailable";
    case ErrorKind::kMissingRow: return "MissingRow";
    case ErrorKind::kMalformedResponse: return "MalformedResponse";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace tweetact
