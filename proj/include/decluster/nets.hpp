#pragma once

// Digital (t,m,d)-nets in base b, kept as exact digit arrays.
//
// Digit conventions (part of the file format):
//   * a point index k is expanded into base-q digits least-significant first
//     before multiplying by a generator matrix;
//   * coordinate digits are stored most-significant first, so coordinate j of
//     a point has value sum_r digit[r] * b^-(r+1).
// With these conventions the identity generator yields the radical inverse.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decluster/gf.hpp"

namespace decluster::nets {

using Digit = std::uint32_t;

struct NetParams {
    std::uint32_t b = 2;
    std::uint32_t m = 0;
    std::uint32_t d = 1;
    std::uint32_t t = 0;

    std::uint64_t point_count() const;  // b^m, throws if it overflows
    void validate() const;

    friend bool operator==(const NetParams&, const NetParams&) = default;
};

/// One m-by-m matrix per coordinate; entries are field indices.
struct GeneratorSet {
    gf::Field field;
    std::uint32_t m = 0;
    std::uint32_t d = 0;
    std::vector<std::vector<std::uint32_t>> matrices;  // row-major, m*m each

    std::uint32_t entry(std::uint32_t j, std::uint32_t row, std::uint32_t col) const {
        return matrices[j][static_cast<std::size_t>(row) * m + col];
    }
};

/// Where a net came from; enough to rebuild it.
struct NetProvenance {
    // Generator construction (single prime-power base).
    std::optional<gf::Poly> modulus;
    std::uint32_t p = 0;
    std::uint32_t e = 0;
    std::vector<std::vector<std::uint32_t>> matrices;
    // CRT composition.
    std::vector<NetProvenance> components;
    std::uint32_t base = 0;

    friend bool operator==(const NetProvenance&, const NetProvenance&) = default;
};

class DigitalNet {
public:
    DigitalNet() = default;
    DigitalNet(NetParams params, std::vector<Digit> digits, NetProvenance provenance = {});

    const NetParams& params() const noexcept { return params_; }
    std::uint64_t size() const noexcept { return size_; }
    const NetProvenance& provenance() const noexcept { return provenance_; }

    /// Digits of coordinate `j` of point `k`, most significant first.
    std::span<const Digit> coordinate(std::uint64_t k, std::uint32_t j) const {
        const auto m = params_.m;
        return {digits_.data() + (k * params_.d + j) * m, m};
    }
    Digit digit(std::uint64_t k, std::uint32_t j, std::uint32_t r) const {
        return digits_[(k * params_.d + j) * params_.m + r];
    }
    /// Integer value of the first `level` digits of coordinate j.
    std::uint64_t prefix(std::uint64_t k, std::uint32_t j, std::uint32_t level) const;

    const std::vector<Digit>& digits() const noexcept { return digits_; }

    friend bool operator==(const DigitalNet& a, const DigitalNet& b) {
        return a.params_ == b.params_ && a.digits_ == b.digits_;
    }

private:
    NetParams params_;
    std::uint64_t size_ = 0;
    std::vector<Digit> digits_;
    NetProvenance provenance_;
};

struct ElementaryInterval {
    std::vector<std::uint32_t> levels;
    std::vector<std::uint64_t> offsets;

    friend auto operator<=>(const ElementaryInterval&, const ElementaryInterval&) = default;
};

std::string to_string(const ElementaryInterval& interval);

struct NetVerification {
    bool passed = true;
    std::uint64_t intervals_checked = 0;
    std::optional<ElementaryInterval> violation;  // lexicographically first
    std::uint64_t violation_count = 0;           // points found in `violation`
};

/// Pascal-power generators over GF(q): C^(j)[r][c] = binom(c, r) * alpha_j^(c-r)
/// with alpha_1 = 0, alpha_2 = 1, ... in index order; for d = q + 1 the last
/// matrix is the anti-diagonal reversal.
GeneratorSet pascal_power_generators(std::uint64_t q, std::uint32_t d, std::uint32_t m);

/// Applies the generators to every index k < q^m and gates the result on
/// verify_net(t = 0).
DigitalNet net_from_generators(const GeneratorSet& generators);

/// Digit-wise CRT composition of nets in pairwise coprime prime-power bases.
DigitalNet crt_compose(std::span<const DigitalNet> components, std::uint32_t b);

/// x mod b from residues x mod q_i (pairwise coprime, product b).
std::uint64_t crt_combine(std::span<const std::uint64_t> residues,
                          std::span<const std::uint64_t> moduli);

std::vector<ElementaryInterval> enumerate_elementary_intervals(std::uint32_t b, std::uint32_t m,
                                                               std::uint32_t d, std::uint32_t s);

/// All level vectors of length d summing to s, in lexicographic order.
std::vector<std::vector<std::uint32_t>> level_vectors(std::uint32_t d, std::uint32_t s);

/// Every elementary interval of volume b^(t-m) must hold exactly b^t points.
/// Level shapes are checked in parallel; the reported violation is the
/// lexicographically first and independent of scheduling.
NetVerification verify_net(const DigitalNet& net, std::uint32_t t);
NetVerification verify_net_serial(const DigitalNet& net, std::uint32_t t);

/// Builds a (0,m,d)-net in base b: generator construction for prime powers,
/// per-factor construction plus CRT for composite b. Requires d <= q1 + 1.
DigitalNet build_net(std::uint32_t b, std::uint32_t m, std::uint32_t d);

}  // namespace decluster::nets
