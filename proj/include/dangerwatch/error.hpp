#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dangerwatch {

// Bad caller-supplied data (metric ordering, NaN signals, timestamp regression).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation not allowed in the object's current lifecycle state.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& detail, const std::string& source = {})
        : std::runtime_error((source.empty() ? std::string() : source + ": ") + "line " + std::to_string(line) +
                             ", col " + std::to_string(column) + ": " + detail),
          line_(line),
          column_(column),
          detail_(detail),
          source_(source) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& source() const noexcept { return source_; }

    /// Same error, attributed to a named input (usually a file path).
    ParseError with_source(const std::string& source) const { return ParseError(line_, column_, detail_, source); }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
    std::string source_;
};

}  // namespace dangerwatch
