#pragma once

#include <stdexcept>
#include <string>

namespace gvv {

enum class ErrorKind {
  kInvalidArgument,
  kOutOfRange,
  kMismatch,
  kCorruptData,
  kIo,
  kNotFound,
  kVersion,
  kBackend,
  kDiverged,
  kNetwork,
};

const char* error_kind_name(ErrorKind kind);

// Single exception type for the library; `kind()` lets callers branch
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gvv
