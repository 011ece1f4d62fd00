#pragma once

#include <exception>
#include <sstream>
#include <string>
#include <vector>

namespace predsym {

enum class Code {
  Ok,
  MissingColumn,
  RatingOutOfRange,
  UnknownVerb,
  CountMismatch,
  MalformedLine,
  EmptyFile,
  DuplicateSentId,
  MultipleRoots,
  NoRoot,
  CycleDetected,
  TokenIndexOutOfRange,
  UnknownSentence,
  TargetNotFound,
  NoSubjectFound,
  DuplicateKey,
  DimensionMismatch,
  LengthMismatch,
  SingularSystem,
  NonFiniteLoss,
  ConstantInput,
  UniverseMismatch,
  TooFewVerbs,
  EmptySubset,
  MissingResource,
  MissingReport,
  AllTokensOov,
  BadConfig,
  IoError,
};

inline const char *code_name(Code c) {
  switch (c) {
    case Code::Ok: return "Ok";
    case Code::MissingColumn: return "MissingColumn";
    case Code::RatingOutOfRange: return "RatingOutOfRange";
    case Code::UnknownVerb: return "UnknownVerb";
    case Code::CountMismatch: return "CountMismatch";
    case Code::MalformedLine: return "MalformedLine";
    case Code::EmptyFile: return "EmptyFile";
    case Code::DuplicateSentId: return "DuplicateSentId";
    case Code::MultipleRoots: return "MultipleRoots";
    case Code::NoRoot: return "NoRoot";
    case Code::CycleDetected: return "CycleDetected";
    case Code::TokenIndexOutOfRange: return "TokenIndexOutOfRange";
    case Code::UnknownSentence: return "UnknownSentence";
    case Code::TargetNotFound: return "TargetNotFound";
    case Code::NoSubjectFound: return "NoSubjectFound";
    case Code::DuplicateKey: return "DuplicateKey";
    case Code::DimensionMismatch: return "DimensionMismatch";
    case Code::LengthMismatch: return "LengthMismatch";
    case Code::SingularSystem: return "SingularSystem";
    case Code::NonFiniteLoss: return "NonFiniteLoss";
    case Code::ConstantInput: return "ConstantInput";
    case Code::UniverseMismatch: return "UniverseMismatch";
    case Code::TooFewVerbs: return "TooFewVerbs";
    case Code::EmptySubset: return "EmptySubset";
    case Code::MissingResource: return "MissingResource";
    case Code::MissingReport: return "MissingReport";
    case Code::AllTokensOov: return "AllTokensOov";
    case Code::BadConfig: return "BadConfig";
    case Code::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::exception {
 public:
  Error(Code code, std::string msg) : code_(code), msg_(std::move(msg)) {
    what_ = std::string(code_name(code_)) + ": " + msg_;
  }
  Code code() const { return code_; }
  const std::string &message() const { return msg_; }
  const char *what() const noexcept override { return what_.c_str(); }

 private:
  Code code_;
  std::string msg_;
  std::string what_;
};

struct Diag {
  Code code = Code::Ok;
  std::string message;
  std::string context;  // e.g. file:line or sentence id
};

// Collects non-fatal warnings; callers that pass nullptr just drop them.
class Diagnostics {
 public:
  void warn(Code code, std::string msg, std::string ctx = "") {
    items.push_back({code, std::move(msg), std::move(ctx)});
  }
  bool empty() const { return items.empty(); }
  std::size_t count(Code c) const {
    std::size_t n = 0;
    for (const auto &d : items)
      if (d.code == c) ++n;
    return n;
  }
  std::vector<Diag> items;
};

inline void warn_or_drop(Diagnostics *diag, Code code, const std::string &msg,
                         const std::string &ctx = "") {
  if (diag) diag->warn(code, msg, ctx);
}

template <typename... Args>
[[noreturn]] inline void fail(Code code, Args &&...parts) {
  std::ostringstream os;
  (os << ... << parts);
  throw Error(code, os.str());
}

}  // namespace predsym
