#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "decluster/error.hpp"
#include "decluster/nets.hpp"

using namespace decluster;
using namespace decluster::nets;

namespace {

// Brute-force (t,m,d) check straight from the definition: for every elementary
// interval of volume b^(t-m), count points by comparing each coordinate's
// b-adic prefix against the offset.
bool naive_is_net(const DigitalNet& net, std::uint32_t t) {
    const auto& p = net.params();
    const std::uint32_t s = p.m - t;
    for (const auto& iv : enumerate_elementary_intervals(p.b, p.m, p.d, s)) {
        std::uint64_t count = 0;
        for (std::uint64_t k = 0; k < net.size(); ++k) {
            bool in = true;
            for (std::uint32_t j = 0; j < p.d && in; ++j) {
                std::uint64_t v = 0;
                for (std::uint32_t r = 0; r < iv.levels[j]; ++r) v = v * p.b + net.digit(k, j, r);
                in = v == iv.offsets[j];
            }
            count += in;
        }
        std::uint64_t expect = 1;
        for (std::uint32_t i = 0; i < t; ++i) expect *= p.b;
        if (count != expect) return false;
    }
    return true;
}

std::vector<std::uint32_t> identity(std::uint32_t m) {
    std::vector<std::uint32_t> a(m * m, 0);
    for (std::uint32_t i = 0; i < m; ++i) a[i * m + i] = 1;
    return a;
}

}  // namespace

TEST_CASE("pascal-power generator matrices") {
    const auto g = pascal_power_generators(3, 3, 2);
    CHECK(g.matrices[0] == identity(2));
    CHECK(g.matrices[1] == std::vector<std::uint32_t>{1, 1, 0, 1});
    CHECK(g.matrices[2] == std::vector<std::uint32_t>{1, 2, 0, 1});

    CHECK(pascal_power_generators(2, 3, 2).matrices[2] == std::vector<std::uint32_t>{0, 1, 1, 0});

    const auto single = pascal_power_generators(5, 1, 3);
    REQUIRE(single.matrices.size() == 1);
    CHECK(single.matrices[0] == identity(3));

    CHECK_THROWS_AS(pascal_power_generators(3, 5, 2), Error);
}

TEST_CASE("net points from generators") {
    const auto net = net_from_generators(pascal_power_generators(2, 2, 2));
    // Scaled by 4: (0,0), (2,2), (1,3), (3,1)
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> expect{{0, 0}, {2, 2}, {1, 3}, {3, 1}};
    for (std::uint64_t k = 0; k < 4; ++k) {
        CHECK(net.prefix(k, 0, 2) == expect[k].first);
        CHECK(net.prefix(k, 1, 2) == expect[k].second);
    }

    const auto radical = net_from_generators(pascal_power_generators(2, 1, 3));
    CHECK(radical.prefix(1, 0, 3) == 4);  // 1/2
    CHECK(radical.prefix(2, 0, 3) == 2);  // 1/4
    CHECK(radical.prefix(3, 0, 3) == 6);  // 3/4

    const auto empty = net_from_generators(pascal_power_generators(7, 3, 0));
    CHECK(empty.size() == 1);
}

TEST_CASE("elementary interval enumeration") {
    CHECK(enumerate_elementary_intervals(2, 2, 2, 2).size() == 12);
    const auto rows = enumerate_elementary_intervals(3, 1, 2, 1);
    CHECK(rows.size() == 6);
    CHECK(std::is_sorted(rows.begin(), rows.end()));
    const auto unit = enumerate_elementary_intervals(2, 1, 3, 0);
    REQUIRE(unit.size() == 1);
    CHECK(unit[0].levels == std::vector<std::uint32_t>{0, 0, 0});
}

TEST_CASE("verify_net on hand-built point sets") {
    const auto net = net_from_generators(pascal_power_generators(2, 2, 2));
    CHECK(verify_net(net, 0).passed);

    // identity permutation in base 4
    std::vector<Digit> ident;
    for (Digit k = 0; k < 4; ++k) ident.insert(ident.end(), {k, k});
    CHECK(verify_net(DigitalNet({4, 1, 2, 0}, ident), 0).passed);

    // duplicated origin
    const DigitalNet dup({2, 1, 2, 0}, {0, 0, 0, 0});
    const auto bad = verify_net(dup, 0);
    CHECK_FALSE(bad.passed);
    REQUIRE(bad.violation);
    CHECK(bad.violation->levels == std::vector<std::uint32_t>{0, 1});
    CHECK(bad.violation->offsets == std::vector<std::uint64_t>{0, 0});
    CHECK(bad.violation_count == 2);
    CHECK(verify_net_serial(dup, 0).violation == bad.violation);
}

TEST_CASE("verifier agrees with the definition-level oracle") {
    for (std::uint64_t q : {2, 3, 4, 5}) {
        for (std::uint32_t d = 1; d <= q + 1; ++d) {
            for (std::uint32_t m = 0; m <= 3; ++m) {
                const auto net = net_from_generators(pascal_power_generators(q, d, m));
                CAPTURE(q);
                CAPTURE(d);
                CAPTURE(m);
                CHECK(naive_is_net(net, 0));
                CHECK(verify_net(net, 0).passed);
            }
        }
    }
    // A digit-scrambled set that is not a net: both verifiers reject it.
    std::vector<Digit> digits;
    for (Digit k = 0; k < 4; ++k) digits.insert(digits.end(), {Digit(k & 1), Digit(k >> 1), Digit(k & 1), Digit(0)});
    const DigitalNet broken({2, 2, 2, 0}, digits);
    CHECK_FALSE(naive_is_net(broken, 0));
    CHECK_FALSE(verify_net(broken, 0).passed);
    CHECK(verify_net(broken, 1).passed == naive_is_net(broken, 1));
}

TEST_CASE("parallel and serial verifiers agree") {
    for (std::uint64_t q : {3, 4, 7}) {
        const auto net = build_net(static_cast<std::uint32_t>(q), 3, static_cast<std::uint32_t>(q));
        const auto a = verify_net(net, 0), b = verify_net_serial(net, 0);
        CHECK(a.passed == b.passed);
        CHECK(a.intervals_checked == b.intervals_checked);
    }
}

TEST_CASE("CRT composition") {
    const std::vector<std::uint64_t> res{1, 2}, mod{2, 3};
    CHECK(crt_combine(res, mod) == 5);

    std::vector<DigitalNet> parts;
    for (std::uint32_t q : {2u, 3u}) {
        std::vector<Digit> digits;
        for (Digit k = 0; k < q; ++k) digits.insert(digits.end(), {k, k});
        parts.emplace_back(NetParams{q, 1, 2, 0}, digits);
    }
    const auto six = crt_compose(parts, 6);
    for (std::uint64_t k = 0; k < 6; ++k) CHECK(six.digit(k, 0, 0) == six.digit(k, 1, 0));
    std::set<Digit> seen;
    for (std::uint64_t k = 0; k < 6; ++k) seen.insert(six.digit(k, 0, 0));
    CHECK(seen.size() == 6);

    const auto single = build_net(4, 2, 3);
    const std::vector<DigitalNet> one{single};
    CHECK(crt_compose(one, 4) == single);

    std::vector<DigitalNet> clash{build_net(2, 1, 2), build_net(4, 1, 2)};
    try {
        (void)crt_compose(clash, 8);
        FAIL("non-coprime bases accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::incompatible_parameters);
    }
}

TEST_CASE("build_net on composite bases") {
    for (std::uint32_t b : {6u, 10u, 12u}) {
        for (std::uint32_t m = 0; m <= 2; ++m) {
            const auto net = build_net(b, m, 3);
            CHECK(net.params().b == b);
            CHECK(naive_is_net(net, 0));
        }
    }
    try {
        (void)build_net(6, 2, 4);
        FAIL("d > q1+1 accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::dimension_unsupported);
    }
}
