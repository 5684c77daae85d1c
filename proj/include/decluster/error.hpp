#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace decluster {

enum class ErrorKind {
    invalid_parameter,
    division_by_zero,
    dimension_unsupported,
    construction_invalid,
    incompatible_parameters,
    invalid_net,
    out_of_range,
    budget_exceeded,
    parse_error,
    unsupported_version,
    invariant_violation,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `kind()` lets callers (and tests)
/// distinguish the error classes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace decluster
