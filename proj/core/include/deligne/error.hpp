#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace deligne {

// Base class for all typed errors thrown by the library. Each error carries a
// stable machine-readable code (used by the CLI to map failures to exit
// status and report entries) in addition to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define DELIGNE_DEFINE_ERROR(NAME)                                  \
  class NAME : public Error {                                       \
   public:                                                          \
    explicit NAME(const std::string& what) : Error(#NAME, what) {}  \
  }

DELIGNE_DEFINE_ERROR(NotParallel);
DELIGNE_DEFINE_ERROR(NotAdjacent);
DELIGNE_DEFINE_ERROR(HypothesisViolation);
DELIGNE_DEFINE_ERROR(TypeMismatch);
DELIGNE_DEFINE_ERROR(UnknownGenerator);
DELIGNE_DEFINE_ERROR(NegativeLetter);
DELIGNE_DEFINE_ERROR(BallTooLarge);
DELIGNE_DEFINE_ERROR(SameType);
DELIGNE_DEFINE_ERROR(NotClosed);
DELIGNE_DEFINE_ERROR(TypePatternMismatch);
DELIGNE_DEFINE_ERROR(IndexOutOfRange);
DELIGNE_DEFINE_ERROR(ConfigError);

// NotInParabolic additionally records which input word failed the membership
// requirement (0-based position; -1 when not positional).
class NotInParabolic : public Error {
 public:
  explicit NotInParabolic(const std::string& what, int index = -1)
      : Error("NotInParabolic", what), index_(index) {}

  int index() const noexcept { return index_; }

 private:
  int index_;
};

#undef DELIGNE_DEFINE_ERROR

}  // namespace deligne
