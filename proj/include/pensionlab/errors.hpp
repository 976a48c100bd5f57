#pragma once

#include <stdexcept>
#include <string>

namespace pensionlab {

// Bad input. `field` names the offending parameter so callers (CLI, HTTP)
// can point at it.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Recognised but not implemented (e.g. Drawdown DC option).
class UnsupportedOption : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require_finite(double v, const char* field);

}  // namespace pensionlab
