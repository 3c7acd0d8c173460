#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reidtk {

// Every failure raised by the library derives from Error. The command line
// tool maps the three leaf categories onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters, flag combinations or shape contracts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures: unreadable inputs, unwritable outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a domain invariant (non-finite values,
/// mismatched label counts, no evaluable queries).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input. Carries the byte offset (NPY) or the
/// 1-based line number (CSV) where parsing stopped.
class FormatError : public DataError {
 public:
  enum class Kind {
    kBadMagic,
    kUnsupportedVersion,
    kBadHeader,
    kUnsupportedDtype,
    kUnsupportedRank,
    kFortranOrder,
    kTruncated,
    kTrailingData,
    kNonFinite,
    kEmpty,
    kMissingColumn,
    kBadField,
  };

  FormatError(Kind kind, std::size_t position, const std::string& what)
      : DataError(what), kind_(kind), position_(position) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

}  // namespace reidtk
