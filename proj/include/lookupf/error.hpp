#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lookupf {

enum class ErrorCode {
  UnknownForgeryType,
  DimensionMismatch,
  NotSingleChannel,
  InvalidParams,
  InvalidImage,
  InvariantViolation,
  TooManyOriginals,
  // descriptor / store
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  ChecksumMismatch,
  MalformedFile,
  DuplicateId,
  TooFewSamples,
  // detect
  MissingLabel,
  UnsupportedType,
  // datagen
  PlacementOutOfBounds,
  EmptyObjectMask,
  EmptyCorpus,
  // eval
  EmptyGroundTruth,
  DegenerateGroundTruth,
  MissingProportion,
  DuplicatePrediction,
  // io
  Io,
  Decode,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownForgeryType: return "UnknownForgeryType";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSingleChannel: return "NotSingleChannel";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::TooManyOriginals: return "TooManyOriginals";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::UnsupportedType: return "UnsupportedType";
    case ErrorCode::PlacementOutOfBounds: return "PlacementOutOfBounds";
    case ErrorCode::EmptyObjectMask: return "EmptyObjectMask";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::DegenerateGroundTruth: return "DegenerateGroundTruth";
    case ErrorCode::MissingProportion: return "MissingProportion";
    case ErrorCode::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Decode: return "Decode";
  }
  return "Unknown";
}

// Every domain failure in the library is reported through this type; the
// code is what callers (and the CLI exit-code mapping) branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lookupf
