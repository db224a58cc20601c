#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tweetact {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidConfig,
  kIo,
  kParse,
  // normalize / dataset
  kDuplicateId,
  kUnknownLabel,
  kMissingVotes,
  kEmptyClass,
  // augment
  kInserterFailure,
  kPlanMismatch,
  // ensemble
  kRowNotNormalized,
  kClassOrderMismatch,
  kIdMismatch,
  kWeightCountMismatch,
  kEmptyRow,
  // metrics
  kLengthMismatch,
  kEmptyMatrix,
  kMalformedReport,
  // explain
  kSingularSystem,
  kBackendFailure,
  kTooShort,
  // backends
  kBackendUnavailable,
  kMissingRow,
  kMalformedResponse,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported as tweetact::Error; kind() is the
// machine-checkable part, what() carries the offending id/value.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace tweetact
