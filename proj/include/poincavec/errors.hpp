// Typed runtime errors shared across the library and the CLI.
#pragma once

#include <stdexcept>
#include <string>

namespace poincavec {

enum class ErrorCode {
  MissingFile,
  MissingColumn,
  EmptyFile,
  EmptyInput,
  EmptyWindow,
  DegenerateGraph,
  MisalignedInputs,
  ClassTooSmall,
  SingleClassTrain,
  EmptyTest,
  UnknownLabel,
  BadRuleFile,
  BadModelFile,
  BadConfig,
  NonFinite,
};

// Buckets map to CLI exit codes: Usage -> 2, Data -> 3, Numeric -> 4.
enum class ErrorKind { Usage, Data, Numeric };

const char* to_string(ErrorCode code);
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorKind kind() const { return kind_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace poincavec
