#pragma once

#include <stdexcept>
#include <string>

namespace pccseg {

// Bad input values or shapes. `code()` is a stable machine-readable tag
// used by the HTTP service ("no_scribbles", "dimension_mismatch", ...).
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string code, const std::string& message)
        : std::invalid_argument(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Undecodable byte streams (PNG, base64).
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pccseg
