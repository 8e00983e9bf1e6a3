#pragma once

#include <stdexcept>
#include <string>

namespace abba {

enum class ErrorKind {
  Io,
  Format,
  EmptyDataset,
  SplitInfeasible,
  InvalidInput,
  InvalidParams,
  EmptyInput,
  MissingLabel,
  SingleClassCorpus,
  EmptySearchSpace,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::SplitInfeasible: return "SplitInfeasible";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MissingLabel: return "MissingLabel";
    case ErrorKind::SingleClassCorpus: return "SingleClassCorpus";
    case ErrorKind::EmptySearchSpace: return "EmptySearchSpace";
  }
  return "Error";
}

/// Base of every error raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define ABBA_DEFINE_ERROR(Name, Kind)                                      \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

ABBA_DEFINE_ERROR(IoError, Io)
ABBA_DEFINE_ERROR(FormatError, Format)
ABBA_DEFINE_ERROR(EmptyDatasetError, EmptyDataset)
ABBA_DEFINE_ERROR(SplitInfeasibleError, SplitInfeasible)
ABBA_DEFINE_ERROR(InvalidInputError, InvalidInput)
ABBA_DEFINE_ERROR(InvalidParamsError, InvalidParams)
ABBA_DEFINE_ERROR(EmptyInputError, EmptyInput)
ABBA_DEFINE_ERROR(MissingLabelError, MissingLabel)
ABBA_DEFINE_ERROR(SingleClassCorpusError, SingleClassCorpus)
ABBA_DEFINE_ERROR(EmptySearchSpaceError, EmptySearchSpace)

#undef ABBA_DEFINE_ERROR

/// 2 for input errors, 3 for configurations that cannot be satisfied.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SplitInfeasible:
    case ErrorKind::SingleClassCorpus:
      return 3;
    default:
      return 2;
  }
}

}  // namespace abba
