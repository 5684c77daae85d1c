#pragma once

// Finite fields GF(p^e) with elements addressed by their integer index
// sum_j coeffs[j] * p^j. The index is also the digit value used by the
// digital-net constructions, so the bijection is part of the net format.

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace decluster::gf {

using Poly = std::vector<std::uint32_t>;  // coefficient of x^j at position j

bool is_prime(std::uint64_t n) noexcept;

/// Returns (p, e) with q = p^e, or throws invalid_parameter if q is not a
/// prime power.
std::pair<std::uint32_t, std::uint32_t> split_prime_power(std::uint64_t q);

/// Monic irreducible polynomial of degree e over Z_p whose non-leading
/// coefficients have the smallest encoding sum c_j p^j. For e = 1 this is x.
Poly find_irreducible(std::uint32_t p, std::uint32_t e);

/// Trial division by every monic polynomial of degree 1..deg/2.
bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p);

class Field;

/// A field element bound to the field it lives in. Arithmetic between
/// elements of different fields throws invalid_parameter.
struct FieldElem {
    const Field* field = nullptr;
    std::uint32_t index = 0;

    Poly coeffs() const;

    friend FieldElem operator+(FieldElem a, FieldElem b);
    friend FieldElem operator-(FieldElem a, FieldElem b);
    friend FieldElem operator*(FieldElem a, FieldElem b);
    friend bool operator==(FieldElem a, FieldElem b) noexcept {
        return a.index == b.index && a.field == b.field;
    }
};

enum class ArithKind { add, mul, inv, pow };

/// Dispatches one of the four field operations. For `pow` the exponent is
/// `exponent`; for `inv` only `a` is used.
FieldElem arith(ArithKind kind, FieldElem a, FieldElem b, std::uint64_t exponent = 0);
FieldElem inverse(FieldElem a);
FieldElem power(FieldElem a, std::uint64_t exponent);

/// GF(p^e). Immutable after construction. Hot paths work on raw indices;
/// multiplication is table-driven for q <= 256 and polynomial otherwise,
/// both giving identical results.
class Field {
public:
    static constexpr std::uint64_t max_order = 1u << 16;

    /// Builds GF(q) with the canonical (smallest-encoding) modulus.
    explicit Field(std::uint64_t q);
    Field(std::uint32_t p, std::uint32_t e);
    /// Uses the given monic modulus (validated for irreducibility).
    Field(std::uint32_t p, Poly modulus);

    std::uint32_t characteristic() const noexcept { return p_; }
    std::uint32_t degree() const noexcept { return e_; }
    std::uint32_t order() const noexcept { return q_; }
    const Poly& modulus() const noexcept { return modulus_; }

    FieldElem elem(std::uint32_t index) const;
    FieldElem zero() const noexcept { return {this, 0}; }
    FieldElem one() const noexcept { return {this, 1}; }

    Poly coeffs_of(std::uint32_t index) const;
    std::uint32_t index_of(std::span<const std::uint32_t> coeffs) const;

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const noexcept;
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const noexcept;
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept;
    std::uint32_t inv(std::uint32_t a) const;
    std::uint32_t pow(std::uint32_t a, std::uint64_t exponent) const noexcept;

    /// Polynomial multiplication mod the modulus, bypassing the table.
    std::uint32_t mul_poly(std::uint32_t a, std::uint32_t b) const noexcept;
    /// Extended Euclid on polynomials.
    std::uint32_t inv_poly(std::uint32_t a) const;

    bool same_as(const Field& other) const noexcept {
        return p_ == other.p_ && e_ == other.e_ && modulus_ == other.modulus_;
    }

private:
    void build();

    std::uint32_t p_ = 0;
    std::uint32_t e_ = 0;
    std::uint32_t q_ = 0;
    Poly modulus_;
    std::vector<std::uint32_t> mul_table_;  // q*q entries when q <= 256
    std::vector<std::uint32_t> inv_table_;
};

}  // namespace decluster::gf
