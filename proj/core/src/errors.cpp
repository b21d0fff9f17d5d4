#include "pollinator/errors.hpp"

namespace pollinator {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoAlternativePlatform: return "NoAlternativePlatform";
    case ErrorCode::UnknownPlatform: return "UnknownPlatform";
    case ErrorCode::UnknownPersonality: return "UnknownPersonality";
    case ErrorCode::PersonalityNotPresent: return "PersonalityNotPresent";
    case ErrorCode::InvalidTripCount: return "InvalidTripCount";
    case ErrorCode::InvalidCutoff: return "InvalidCutoff";
    case ErrorCode::NoPoolConfigured: return "NoPoolConfigured";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::InvalidStep: return "InvalidStep";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicatePlatform: return "DuplicatePlatform";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::InvalidLearningRate: return "InvalidLearningRate";
    case ErrorCode::EmptyProfiles: return "EmptyProfiles";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace pollinator
