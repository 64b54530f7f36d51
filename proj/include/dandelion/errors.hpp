#pragma once

#include <stdexcept>
#include <string>

namespace dandelion {

class InvalidParameters : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class ResamplingExhausted : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace dandelion
