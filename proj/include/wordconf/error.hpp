#pragma once

#include <stdexcept>
#include <string>

namespace wordconf {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorKind {
  Usage = 1,    // bad flags or flag combinations
  Data = 2,     // malformed or invariant-violating input
  Numeric = 3,  // degenerate fits and other numerical conditions
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

inline Error usage_error(std::string msg) {
  return Error(ErrorKind::Usage, std::move(msg));
}
inline Error data_error(std::string msg) {
  return Error(ErrorKind::Data, std::move(msg));
}
inline Error numeric_error(std::string msg) {
  return Error(ErrorKind::Numeric, std::move(msg));
}

}  // namespace wordconf
