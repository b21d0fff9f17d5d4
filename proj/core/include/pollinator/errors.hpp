#pragma once

#include <stdexcept>
#include <string>

namespace pollinator {

/// Machine-readable error codes carried by every pollinator::Error.
enum class ErrorCode {
  NoAlternativePlatform,
  UnknownPlatform,
  UnknownPersonality,
  PersonalityNotPresent,
  InvalidTripCount,
  InvalidCutoff,
  NoPoolConfigured,
  InstanceTooLarge,
  InvalidStep,
  FileNotFound,
  MalformedRow,
  DuplicatePlatform,
  NonPositiveValue,
  EmptyDataset,
  NonPositiveLength,
  InvalidLearningRate,
  EmptyProfiles,
  DegenerateInterval,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pollinator
