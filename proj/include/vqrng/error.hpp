#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vqrng {

enum class ErrorCode {
  invalid_argument = 1,
  integration_diverged,
  filter_design,
  degenerate_frame,
  no_extractable_entropy,
  insufficient_seed,
  length_mismatch,
  io,
  parse,
};

const char* error_code_name(ErrorCode code) noexcept;

/// Every failure surfaced by the library. The C API maps `code()` onto its
/// status enum one-to-one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by orchestration code; the message is prefixed with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

}  // namespace vqrng
