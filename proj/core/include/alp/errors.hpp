#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alp {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  UnsupportedFamilyCombination,
  ToleranceNotReached,
  InfiniteMeasureSet,
  BruteForceTooLarge,
  MissingLimit,
  DominationViolated,
  ImplicationViolation,
  NotMember,
  GridTooCoarse,
  UnknownEntry,
  ParamOutOfDomain,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace alp
