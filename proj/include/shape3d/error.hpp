#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shape3d {

enum class ErrorCode {
  MalformedHeader,
  IndexOutOfRange,
  EmptyMesh,
  TruncatedFile,
  OpenMesh,
  ZeroArea,
  DegenerateCovariance,
  DegenerateHull,
  NonOrthonormalRotation,
  DegenerateMeasure,
  TooFewValues,
  DegenerateClusters,
  MissingVocabulary,
  EmptyClassifier,
  DegenerateEntity,
  DuplicateModel,
  UnknownPredicate,
  DimensionMismatch,
  AllZeroWeights,
  UnknownModel,
  EmptyIndex,
  EmptyRelevantSet,
  CountMismatch,
  NoModelsFound,
  WriteFailure,
  PortInUse,
  InvalidArgument,
  StoreFrozen,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the error-code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace shape3d
