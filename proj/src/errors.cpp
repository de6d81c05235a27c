#include "poincavec/errors.hpp"

namespace poincavec {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::DegenerateGraph: return "DegenerateGraph";
    case ErrorCode::MisalignedInputs: return "MisalignedInputs";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::SingleClassTrain: return "SingleClassTrain";
    case ErrorCode::EmptyTest: return "EmptyTest";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::BadRuleFile: return "BadRuleFile";
    case ErrorCode::BadModelFile: return "BadModelFile";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::NonFinite: return "NonFinite";
  }
  return "UnknownError";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadConfig:
      return ErrorKind::Usage;
    case ErrorCode::NonFinite:
    case ErrorCode::DegenerateGraph:
      return ErrorKind::Numeric;
    default:
      return ErrorKind::Data;
  }
}

}  // namespace poincavec
