#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tracefold {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by event accessors when a monitor reads an attribute that was
// masked off when the trace was produced.
class AttributeUnavailable : public Error {
 public:
  AttributeUnavailable(std::string attribute, std::uint64_t chrono)
      : Error("attribute '" + attribute + "' is unavailable at event " + std::to_string(chrono) +
              " (masked off at trace time)"),
        attribute_(std::move(attribute)),
        chrono_(chrono) {}

  const std::string& attribute() const noexcept { return attribute_; }
  std::uint64_t chrono() const noexcept { return chrono_; }

 private:
  std::string attribute_;
  std::uint64_t chrono_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column,
             const std::string& source = {})
      : Error((source.empty() ? std::string() : source + ":") + std::to_string(line) + ":" +
              std::to_string(column) + ": " + message),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// I/O failure on a trace or program file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or out-of-order trace data.
class TraceIntegrityError : public Error {
 public:
  using Error::Error;
};

class TraceVersionError : public TraceIntegrityError {
 public:
  TraceVersionError(int found, int supported)
      : TraceIntegrityError("trace format version " + std::to_string(found) +
                            " is not supported (this build reads version " +
                            std::to_string(supported) + ")") {}
};

// A monitor detected a trace that violates the Byrd box discipline it relies on.
class MonitorIntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracefold
