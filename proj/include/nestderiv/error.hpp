#pragma once

#include <stdexcept>
#include <string>

namespace nestderiv {

enum class ErrorCode {
    dimension_mismatch,
    invalid_argument,
    outside_algebra,
    missing_entry,
    invalid_derivation,
    not_applicable,
    format,
    io,
};

/// Single exception type for the library; the code tells callers (the CLI in
/// particular) which class of failure occurred.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace nestderiv
