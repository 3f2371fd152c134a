#pragma once

#include <stdexcept>
#include <string>

namespace gil {

/// Violated precondition or shape contract on an API call.
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

/// Malformed input file; carries the offending line number when known.
struct ParseError : std::runtime_error {
    ParseError(const std::string& path, long line, const std::string& msg)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + msg),
          line_number(line) {}
    long line_number;
};

/// Structurally valid input that fails a semantic check (index range, row counts, ...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite loss encountered while training.
struct TrainingDiverged : std::runtime_error {
    explicit TrainingDiverged(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace gil
