#pragma once

#include <stdexcept>
#include <string>

namespace maskopt {

enum class ErrorKind {
  InputShape,
  Parameter,
  Domain,
  DegenerateMask,
  Placement,
  Generation,
  NoOverlap,
  Aggregation,
  Config,
  Io,
  Sweep,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace maskopt
