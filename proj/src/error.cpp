#include "shape3d/error.hpp"

namespace shape3d {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::OpenMesh: return "OpenMesh";
    case ErrorCode::ZeroArea: return "ZeroArea";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::NonOrthonormalRotation: return "NonOrthonormalRotation";
    case ErrorCode::DegenerateMeasure: return "DegenerateMeasure";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::DegenerateClusters: return "DegenerateClusters";
    case ErrorCode::MissingVocabulary: return "MissingVocabulary";
    case ErrorCode::EmptyClassifier: return "EmptyClassifier";
    case ErrorCode::DegenerateEntity: return "DegenerateEntity";
    case ErrorCode::DuplicateModel: return "DuplicateModel";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::EmptyRelevantSet: return "EmptyRelevantSet";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NoModelsFound: return "NoModelsFound";
    case ErrorCode::WriteFailure: return "WriteFailure";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StoreFrozen: return "StoreFrozen";
  }
  return "Unknown";
}

}  // namespace shape3d
