#pragma once

#include <stdexcept>
#include <string>

namespace proprules {

// Failure while reading one of the text formats; carries a 1-based position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// Raised when an input exceeds the representational or enumeration limits
// (universes wider than 64 values, candidate spaces too large to search).
class SizeLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace proprules
