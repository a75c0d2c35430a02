#pragma once

#include <stdexcept>
#include <string>

namespace treeaudit {

// Exit codes shared by every CLI subcommand.
enum class ExitCode : int {
  kOk = 0,
  kIo = 1,
  kValidation = 2,
  kInternal = 3,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kValidation; }
};

// Feature vector or schema does not match.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Malformed model, recipe, dataset or profile document. The message carries
// the offending path (e.g. "trees[3].left.threshold").
class ParseError : public Error {
 public:
  using Error::Error;
};

class TrainerError : public Error {
 public:
  using Error::Error;
};

class ThresholdError : public Error {
 public:
  using Error::Error;
};

class ProfileError : public Error {
 public:
  using Error::Error;
};

class PatchError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kIo; }
};

// A condition the algorithms guarantee was found broken at run time.
class InvariantViolation : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInternal; }
};

}  // namespace treeaudit
