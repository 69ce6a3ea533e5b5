#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpa {

/// Base class for every error caused by caller input (bad data, bad
/// configuration, infeasible request). The CLI maps these to exit code 1.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class index_error : public error {
 public:
  using error::error;
};

class domain_error : public error {
 public:
  using error::error;
};

class split_error : public error {
 public:
  using error::error;
};

class argument_error : public error {
 public:
  using error::error;
};

class range_error : public error {
 public:
  using error::error;
};

class insufficient_history : public error {
 public:
  using error::error;
};

class degenerate_weights : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

/// Malformed input row. `line()` is 1-based.
class parse_error : public error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed row carrying an unacceptable value (negative or fractional count).
class validation_error : public error {
 public:
  validation_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit validation_error(const std::string& what) : error(what), line_(0) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Internal consistency check failed. Never caused by user input; the CLI
/// maps it to exit code 2.
class invariant_violation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lpa
