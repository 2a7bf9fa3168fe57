#pragma once

#include <stdexcept>
#include <string>

namespace xxlseg {

/// Base class of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class IoErrorKind {
  MissingFile,
  PayloadLengthMismatch,
  UnknownVoxelKind,
  MalformedSidecar,
  IoFailure,
};

class IoError : public Error {
 public:
  IoError(IoErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  IoErrorKind kind() const noexcept { return kind_; }

 private:
  IoErrorKind kind_;
};

/// Raised when an argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace xxlseg
