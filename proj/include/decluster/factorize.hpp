#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace decluster::schemegen {

struct PrimePower {
    std::uint64_t p = 0;
    std::uint32_t k = 0;
    std::uint64_t q = 0;  // p^k

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Canonical prime-power factorization, factors ascending by q.
struct Factorization {
    std::uint64_t M = 0;
    std::vector<PrimePower> factors;

    std::uint64_t q1() const { return factors.front().q; }
    std::vector<std::uint64_t> orders() const;
    std::string to_string() const;  // e.g. "3 * 4"
};

/// Trial division; M >= 2.
Factorization factorize_canonical(std::uint64_t M);

}  // namespace decluster::schemegen
