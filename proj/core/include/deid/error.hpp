#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace deid {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration or resource content. Carries the resource name and,
/// when known, the 1-based line number.
class ConfigError : public Error {
 public:
  ConfigError(std::string resource, std::size_t line, const std::string& what)
      : Error(format(resource, line, what)), resource_(std::move(resource)), line_(line) {}
  explicit ConfigError(const std::string& what) : Error(what) {}

  const std::string& resource() const noexcept { return resource_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& resource, std::size_t line, const std::string& what) {
    std::string s = resource;
    if (line > 0) s += ":" + std::to_string(line);
    return s.empty() ? what : s + ": " + what;
  }

  std::string resource_;
  std::size_t line_ = 0;
};

/// Raised by the date parser when a string matches none of the locale formats.
class NotADateError : public Error {
 public:
  using Error::Error;
};

/// Input text is not valid UTF-8.
class EncodingError : public Error {
 public:
  using Error::Error;
};

/// A vault lookup found nothing for the requested document.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// De-identified text no longer agrees with the vault records.
class IntegrityError : public Error {
 public:
  IntegrityError(const std::string& what, std::size_t record_index)
      : Error(what), record_index_(record_index) {}

  std::size_t record_index() const noexcept { return record_index_; }

 private:
  std::size_t record_index_;
};

/// Storage failure while appending to a vault.
class VaultWriteError : public Error {
 public:
  using Error::Error;
};

/// A stage handed the next one data that breaks its contract. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Aggregates every problem found while validating a language pack.
class PackError : public Error {
 public:
  explicit PackError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string s = "language pack failed validation (" + std::to_string(problems.size()) + " problem(s))";
    for (const auto& p : problems) s += "\n  " + p;
    return s;
  }

  std::vector<std::string> problems_;
};

}  // namespace deid
