#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dq {

// A validation finding. `code` is machine readable and stable; `element`
// names the offending model element.
struct Diagnostic {
    std::string code;
    std::string element;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostics(const std::vector<Diagnostic>& ds);

// Syntax-level failure (malformed JSON, bad DDL token, bad CSV cell).
// line/column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line = 0, int column = 0)
        : std::runtime_error(position_prefix(line, column) + message), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string position_prefix(int line, int column);
    int line_;
    int column_;
};

// Structural failure: the document parsed but violates model invariants.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics)
        : std::runtime_error(format_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

// Mismatch between a rule set and the data it is evaluated against.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dq
