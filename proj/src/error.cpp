#include "decluster/error.hpp"

namespace decluster {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::division_by_zero: return "division-by-zero";
        case ErrorKind::dimension_unsupported: return "dimension-unsupported";
        case ErrorKind::construction_invalid: return "construction-invalid";
        case ErrorKind::incompatible_parameters: return "incompatible-parameters";
        case ErrorKind::invalid_net: return "invalid-net";
        case ErrorKind::out_of_range: return "out-of-range";
        case ErrorKind::budget_exceeded: return "budget-exceeded";
        case ErrorKind::parse_error: return "parse-error";
        case ErrorKind::unsupported_version: return "unsupported-version";
        case ErrorKind::invariant_violation: return "invariant-violation";
    }
    return "unknown";
}

}  // namespace decluster
