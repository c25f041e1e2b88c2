#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opu {

// Numeric values are mirrored by opu_status in include/opu/opu.h.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kModeMismatch = 3,
  kMemoryBudget = 4,
  kNonFinite = 5,
  kSingular = 6,
  kIo = 7,
  kFormat = 8,
  kUnsupportedVersion = 9,
  kIdentityMismatch = 10,
  kDivergence = 11,
  kInvalidConfig = 12,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Container parse failure; offset is the byte position of the offending field.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t offset, const std::string& what)
      : Error(code, what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace opu
