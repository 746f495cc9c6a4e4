#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chipletrank {

enum class ErrorCode {
  MalformedFile,
  InvalidSystem,
  InvalidOrder,
  InvalidConfig,
  Unplaceable,
  TooManyOrders,
  EmptyScatter,
  NoComparablePairs,
  EmptyCorpus,
  EmptyDataset,
  EmptyGraph,
  ShapeMismatch,
  MalformedCheckpoint,
  VersionMismatch,
  MissingSweep,
  IoError,
  UsageError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status and a machine-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chipletrank
