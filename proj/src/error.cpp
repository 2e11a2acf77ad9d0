#include "credrisk/error.hpp"

namespace credrisk {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownStatus: return "UnknownStatus";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateHeader: return "DuplicateHeader";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::UnseenCategory: return "UnseenCategory";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::TooFewMinority: return "TooFewMinority";
    case ErrorCode::SingleClassTrainingSet: return "SingleClassTrainingSet";
    case ErrorCode::InvalidHyperparameters: return "InvalidHyperparameters";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::EmptyNode: return "EmptyNode";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SingleClassInput: return "SingleClassInput";
    case ErrorCode::Io: return "Io";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace credrisk
