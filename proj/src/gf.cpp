#include "decluster/gf.hpp"

#include <algorithm>
#include <string>

#include "decluster/error.hpp"

namespace decluster::gf {

namespace {

using Coeffs = std::vector<std::int64_t>;

void trim(Coeffs& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

std::int64_t mod(std::int64_t v, std::int64_t p) {
    v %= p;
    return v < 0 ? v + p : v;
}

std::int64_t inv_mod_prime(std::int64_t a, std::int64_t p) {
    // Fermat; p is prime and small.
    std::int64_t result = 1;
    std::int64_t base = mod(a, p);
    for (std::int64_t e = p - 2; e > 0; e >>= 1) {
        if (e & 1) result = result * base % p;
        base = base * base % p;
    }
    return result;
}

// Remainder of a modulo b over Z_p; b non-zero and trimmed.
Coeffs poly_rem(Coeffs a, const Coeffs& b, std::int64_t p, Coeffs* quotient = nullptr) {
    trim(a);
    const std::size_t db = b.size() - 1;
    const std::int64_t lead_inv = inv_mod_prime(b.back(), p);
    if (quotient) quotient->assign(a.size() >= b.size() ? a.size() - db : 0, 0);
    while (!a.empty() && a.size() >= b.size()) {
        const std::size_t shift = a.size() - b.size();
        const std::int64_t factor = a.back() * lead_inv % p;
        if (quotient) (*quotient)[shift] = factor;
        for (std::size_t i = 0; i <= db; ++i) {
            a[shift + i] = mod(a[shift + i] - factor * b[i], p);
        }
        trim(a);
    }
    return a;
}

Coeffs poly_mul(const Coeffs& a, const Coeffs& b, std::int64_t p) {
    if (a.empty() || b.empty()) return {};
    Coeffs out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] = (out[i + j] + a[i] * b[j]) % p;
        }
    }
    trim(out);
    return out;
}

Coeffs poly_sub(const Coeffs& a, const Coeffs& b, std::int64_t p) {
    Coeffs out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::int64_t x = i < a.size() ? a[i] : 0;
        const std::int64_t y = i < b.size() ? b[i] : 0;
        out[i] = mod(x - y, p);
    }
    trim(out);
    return out;
}

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t r = 1;
    while (exp--) r *= base;
    return r;
}

const Field& field_of(FieldElem a, FieldElem b) {
    if (a.field == nullptr || b.field == nullptr) {
        throw Error(ErrorKind::invalid_parameter, "field element without a field");
    }
    if (a.field != b.field && !a.field->same_as(*b.field)) {
        throw Error(ErrorKind::invalid_parameter, "operands belong to different fields");
    }
    return *a.field;
}

}  // namespace

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t f = 3; f <= n / f; f += 2) {
        if (n % f == 0) return false;
    }
    return true;
}

std::pair<std::uint32_t, std::uint32_t> split_prime_power(std::uint64_t q) {
    if (q < 2) {
        throw Error(ErrorKind::invalid_parameter, "field order " + std::to_string(q) + " < 2");
    }
    std::uint64_t p = 0;
    for (std::uint64_t f = 2; f <= q / f; ++f) {
        if (q % f == 0) {
            p = f;
            break;
        }
    }
    if (p == 0) p = q;
    std::uint32_t e = 0;
    std::uint64_t rest = q;
    while (rest % p == 0) {
        rest /= p;
        ++e;
    }
    if (rest != 1) {
        throw Error(ErrorKind::invalid_parameter,
                    std::to_string(q) + " is not a prime power");
    }
    return {static_cast<std::uint32_t>(p), e};
}

bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p) {
    const std::size_t deg = monic.size() - 1;
    if (deg == 0) return false;
    if (deg == 1) return true;
    Coeffs f(monic.begin(), monic.end());
    for (std::size_t dd = 1; dd <= deg / 2; ++dd) {
        const std::uint64_t count = ipow(p, static_cast<std::uint32_t>(dd));
        for (std::uint64_t code = 0; code < count; ++code) {
            Coeffs g(dd + 1, 0);
            std::uint64_t c = code;
            for (std::size_t j = 0; j < dd; ++j) {
                g[j] = static_cast<std::int64_t>(c % p);
                c /= p;
            }
            g[dd] = 1;
            if (poly_rem(f, g, p).empty()) return false;
        }
    }
    return true;
}

Poly find_irreducible(std::uint32_t p, std::uint32_t e) {
    if (!is_prime(p)) {
        throw Error(ErrorKind::invalid_parameter, std::to_string(p) + " is not prime");
    }
    if (e == 0) {
        throw Error(ErrorKind::invalid_parameter, "extension degree must be >= 1");
    }
    if (ipow(p, e) > Field::max_order) {
        throw Error(ErrorKind::invalid_parameter, "field order exceeds 2^16");
    }
    const std::uint64_t count = ipow(p, e);
    Poly poly(e + 1, 0);
    for (std::uint64_t code = 0; code < count; ++code) {
        std::uint64_t c = code;
        for (std::uint32_t j = 0; j < e; ++j) {
            poly[j] = static_cast<std::uint32_t>(c % p);
            c /= p;
        }
        poly[e] = 1;
        if (is_irreducible(poly, p)) return poly;
    }
    throw Error(ErrorKind::invalid_parameter, "no irreducible polynomial found");  // unreachable
}

// ---------------------------------------------------------------------------

Field::Field(std::uint64_t q) {
    const auto [p, e] = split_prime_power(q);
    if (q > max_order) {
        throw Error(ErrorKind::invalid_parameter, "field order exceeds 2^16");
    }
    p_ = p;
    e_ = e;
    modulus_ = find_irreducible(p, e);
    build();
}

Field::Field(std::uint32_t p, std::uint32_t e) : p_(p), e_(e), modulus_(find_irreducible(p, e)) {
    build();
}

Field::Field(std::uint32_t p, Poly modulus) : p_(p), modulus_(std::move(modulus)) {
    if (!is_prime(p)) {
        throw Error(ErrorKind::invalid_parameter, std::to_string(p) + " is not prime");
    }
    if (modulus_.size() < 2 || modulus_.back() != 1 ||
        std::any_of(modulus_.begin(), modulus_.end(), [p](auto c) { return c >= p; })) {
        throw Error(ErrorKind::invalid_parameter, "modulus must be monic with coefficients in [0, p)");
    }
    e_ = static_cast<std::uint32_t>(modulus_.size() - 1);
    if (ipow(p, e_) > max_order) {
        throw Error(ErrorKind::invalid_parameter, "field order exceeds 2^16");
    }
    if (!is_irreducible(modulus_, p)) {
        throw Error(ErrorKind::invalid_parameter, "modulus is reducible");
    }
    build();
}

void Field::build() {
    q_ = static_cast<std::uint32_t>(ipow(p_, e_));
    if (q_ <= 256) {
        mul_table_.resize(static_cast<std::size_t>(q_) * q_);
        for (std::uint32_t a = 0; a < q_; ++a) {
            for (std::uint32_t b = 0; b < q_; ++b) {
                mul_table_[static_cast<std::size_t>(a) * q_ + b] = mul_poly(a, b);
            }
        }
    }
    inv_table_.assign(q_, 0);
    for (std::uint32_t a = 1; a < q_; ++a) inv_table_[a] = inv_poly(a);
}

FieldElem Field::elem(std::uint32_t index) const {
    if (index >= q_) {
        throw Error(ErrorKind::out_of_range,
                    "element index " + std::to_string(index) + " outside GF(" + std::to_string(q_) + ")");
    }
    return {this, index};
}

Poly Field::coeffs_of(std::uint32_t index) const {
    Poly out(e_);
    for (std::uint32_t j = 0; j < e_; ++j) {
        out[j] = index % p_;
        index /= p_;
    }
    return out;
}

std::uint32_t Field::index_of(std::span<const std::uint32_t> coeffs) const {
    if (coeffs.size() > e_) {
        throw Error(ErrorKind::invalid_parameter, "too many coefficients for field degree");
    }
    std::uint32_t index = 0;
    for (std::size_t j = coeffs.size(); j-- > 0;) {
        if (coeffs[j] >= p_) throw Error(ErrorKind::invalid_parameter, "coefficient out of range");
        index = index * p_ + coeffs[j];
    }
    return index;
}

std::uint32_t Field::add(std::uint32_t a, std::uint32_t b) const noexcept {
    if (e_ == 1) return (a + b) % p_;
    if (p_ == 2) return a ^ b;
    std::uint32_t out = 0;
    std::uint32_t scale = 1;
    for (std::uint32_t j = 0; j < e_; ++j) {
        out += ((a % p_ + b % p_) % p_) * scale;
        a /= p_;
        b /= p_;
        scale *= p_;
    }
    return out;
}

std::uint32_t Field::sub(std::uint32_t a, std::uint32_t b) const noexcept {
    if (e_ == 1) return (a + p_ - b) % p_;
    if (p_ == 2) return a ^ b;
    std::uint32_t out = 0;
    std::uint32_t scale = 1;
    for (std::uint32_t j = 0; j < e_; ++j) {
        out += ((a % p_ + p_ - b % p_) % p_) * scale;
        a /= p_;
        b /= p_;
        scale *= p_;
    }
    return out;
}

std::uint32_t Field::mul(std::uint32_t a, std::uint32_t b) const noexcept {
    if (!mul_table_.empty()) return mul_table_[static_cast<std::size_t>(a) * q_ + b];
    return mul_poly(a, b);
}

std::uint32_t Field::mul_poly(std::uint32_t a, std::uint32_t b) const noexcept {
    if (e_ == 1) {
        return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p_);
    }
    const auto ca = coeffs_of(a);
    const auto cb = coeffs_of(b);
    Coeffs prod(2 * e_ - 1, 0);
    for (std::uint32_t i = 0; i < e_; ++i) {
        for (std::uint32_t j = 0; j < e_; ++j) {
            prod[i + j] = (prod[i + j] + static_cast<std::int64_t>(ca[i]) * cb[j]) % p_;
        }
    }
    // Reduce with the monic modulus from the top down.
    for (std::size_t k = prod.size(); k-- > e_;) {
        const std::int64_t c = prod[k];
        if (c == 0) continue;
        for (std::uint32_t j = 0; j <= e_; ++j) {
            prod[k - e_ + j] = mod(prod[k - e_ + j] - c * modulus_[j], p_);
        }
    }
    std::uint32_t index = 0;
    for (std::size_t j = e_; j-- > 0;) index = index * p_ + static_cast<std::uint32_t>(prod[j]);
    return index;
}

std::uint32_t Field::inv_poly(std::uint32_t a) const {
    if (a == 0 || a >= q_) {
        throw Error(ErrorKind::division_by_zero, "inverse of zero in GF(" + std::to_string(q_) + ")");
    }
    const std::int64_t p = p_;
    Coeffs r0(modulus_.begin(), modulus_.end());
    Coeffs r1;
    for (auto c : coeffs_of(a)) r1.push_back(c);
    trim(r1);
    Coeffs s0;       // coefficient of a in r0
    Coeffs s1{1};    // coefficient of a in r1
    while (!r1.empty()) {
        Coeffs q;
        Coeffs r2 = poly_rem(r0, r1, p, &q);
        Coeffs s2 = poly_sub(s0, poly_mul(q, s1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    // r0 is a non-zero constant since the modulus is irreducible.
    const std::int64_t scale = inv_mod_prime(r0[0], p);
    std::uint32_t index = 0;
    for (std::size_t j = s0.size(); j-- > 0;) {
        index = index * p_ + static_cast<std::uint32_t>(s0[j] * scale % p);
    }
    return index;
}

std::uint32_t Field::inv(std::uint32_t a) const {
    if (a == 0 || a >= q_) {
        throw Error(ErrorKind::division_by_zero, "inverse of zero in GF(" + std::to_string(q_) + ")");
    }
    return inv_table_[a];
}

std::uint32_t Field::pow(std::uint32_t a, std::uint64_t exponent) const noexcept {
    std::uint32_t result = 1;
    std::uint32_t base = a;
    for (; exponent > 0; exponent >>= 1) {
        if (exponent & 1) result = mul(result, base);
        base = mul(base, base);
    }
    return result;
}

// ---------------------------------------------------------------------------

Poly FieldElem::coeffs() const {
    if (field == nullptr) throw Error(ErrorKind::invalid_parameter, "field element without a field");
    return field->coeffs_of(index);
}

FieldElem operator+(FieldElem a, FieldElem b) {
    const Field& f = field_of(a, b);
    return {a.field, f.add(a.index, b.index)};
}

FieldElem operator-(FieldElem a, FieldElem b) {
    const Field& f = field_of(a, b);
    return {a.field, f.sub(a.index, b.index)};
}

FieldElem operator*(FieldElem a, FieldElem b) {
    const Field& f = field_of(a, b);
    return {a.field, f.mul(a.index, b.index)};
}

FieldElem inverse(FieldElem a) {
    const Field& f = field_of(a, a);
    return {a.field, f.inv(a.index)};
}

FieldElem power(FieldElem a, std::uint64_t exponent) {
    const Field& f = field_of(a, a);
    return {a.field, f.pow(a.index, exponent)};
}

FieldElem arith(ArithKind kind, FieldElem a, FieldElem b, std::uint64_t exponent) {
    switch (kind) {
        case ArithKind::add: return a + b;
        case ArithKind::mul: return a * b;
        case ArithKind::inv: return inverse(a);
        case ArithKind::pow: return power(a, exponent);
    }
    throw Error(ErrorKind::invalid_parameter, "unknown arithmetic kind");
}

}  // namespace decluster::gf
