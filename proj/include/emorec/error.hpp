#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emorec {

enum class ErrorCode {
  MalformedWav,
  UnsupportedEncoding,
  UnrecognizedName,
  UnknownEmotionCode,
  EmptyCorpus,
  SchemaMismatch,
  IoError,
  ClipTooShort,
  FrameTooShort,
  BadLagRange,
  NegativeFrequency,
  BadRange,
  ZeroDuration,
  SchemaViolation,
  InvalidDataset,
  TooFewInstances,
  DegenerateClass,
  DimensionMismatch,
  NonFiniteLoss,
  UnknownClass,
  EmptySubset,
  EmptyClass,
  InvalidConfig,
  UnsupportedVersion,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedWav: return "MalformedWav";
    case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::UnrecognizedName: return "UnrecognizedName";
    case ErrorCode::UnknownEmotionCode: return "UnknownEmotionCode";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ClipTooShort: return "ClipTooShort";
    case ErrorCode::FrameTooShort: return "FrameTooShort";
    case ErrorCode::BadLagRange: return "BadLagRange";
    case ErrorCode::NegativeFrequency: return "NegativeFrequency";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::ZeroDuration: return "ZeroDuration";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvalidDataset: return "InvalidDataset";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can dispatch on the kind rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace emorec
