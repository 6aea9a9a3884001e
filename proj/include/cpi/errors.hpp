#pragma once

#include <stdexcept>
#include <string>

namespace cpi {

// Runtime failures of the simulation pipeline (CLI exit status 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input or violated invariants (CLI exit status 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(int line, const std::string& key, const std::string& what)
      : ValidationError(describe(line, key, what)), line_(line), key_(key) {}

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  static std::string describe(int line, const std::string& key, const std::string& what) {
    std::string out = "parse error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!key.empty()) out += " [" + key + "]";
    return out + ": " + what;
  }

  int line_;
  std::string key_;
};

class UnderresolvedMask : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OverlapError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GridTooSmall : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NoFocusError : public Error {
 public:
  using Error::Error;
};

class InfiniteZeta : public Error {
 public:
  using Error::Error;
};

class ZeroFocal : public Error {
 public:
  using Error::Error;
};

class UndersampledQuadrature : public Error {
 public:
  UndersampledQuadrature(const std::string& integral, double step)
      : Error("undersampled quadrature over " + integral + ": adjacent-sample phase step " +
              std::to_string(step) + " rad reaches pi"),
        integral_(integral) {}

  const std::string& integral() const { return integral_; }

 private:
  std::string integral_;
};

class NonGaussianPump : public Error {
 public:
  using Error::Error;
};

class NotAtFocus : public Error {
 public:
  using Error::Error;
};

class AlphaZero : public Error {
 public:
  using Error::Error;
};

class ZeroReference : public Error {
 public:
  using Error::Error;
};

}  // namespace cpi
