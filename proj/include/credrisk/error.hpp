#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace credrisk {

enum class ErrorCode {
  InvalidArgument,
  UnknownStatus,
  EmptyHistory,
  MissingColumn,
  MalformedRow,
  DuplicateHeader,
  NoOverlap,
  UnknownColumn,
  UnseenCategory,
  DegenerateClass,
  TooFewMinority,
  SingleClassTrainingSet,
  InvalidHyperparameters,
  ColumnMismatch,
  EmptyNode,
  LengthMismatch,
  EmptyInput,
  SingleClassInput,
  Io,
  ModelFormat,
  Internal,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code; the
// message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace credrisk
