#include "decluster/factorize.hpp"

#include <algorithm>

#include "decluster/error.hpp"

namespace decluster::schemegen {

Factorization factorize_canonical(std::uint64_t M) {
    if (M < 2) {
        throw Error(ErrorKind::invalid_parameter, "M=" + std::to_string(M) + " < 2 has no factorization");
    }
    Factorization out{M, {}};
    std::uint64_t rest = M;
    for (std::uint64_t f = 2; f <= rest / f; ++f) {
        if (rest % f != 0) continue;
        PrimePower pp{f, 0, 1};
        while (rest % f == 0) {
            rest /= f;
            pp.q *= f;
            ++pp.k;
        }
        out.factors.push_back(pp);
    }
    if (rest > 1) out.factors.push_back({rest, 1, rest});
    std::sort(out.factors.begin(), out.factors.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.q < b.q; });
    return out;
}

std::vector<std::uint64_t> Factorization::orders() const {
    std::vector<std::uint64_t> out;
    for (const auto& f : factors) out.push_back(f.q);
    return out;
}

std::string Factorization::to_string() const {
    std::string s;
    for (const auto& f : factors) {
        if (!s.empty()) s += " * ";
        s += std::to_string(f.q);
    }
    return s;
}

}  // namespace decluster::schemegen
