#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "decluster/discrepancy.hpp"
#include "decluster/error.hpp"
#include "decluster/nets.hpp"
#include "decluster/schemegen.hpp"
#include "oracle.hpp"

using namespace decluster;
using namespace decluster::discrepancy;
using coloring::LatinColoring;

namespace {

Box box2(Coord l1, Coord h1, Coord l2, Coord h2) { return {{l1, l2}, {h1, h2}}; }

std::vector<LatinColoring> small_colorings() {
    std::vector<LatinColoring> out;
    for (std::uint32_t M = 2; M <= 6; ++M) {
        for (std::uint32_t d = 2; d <= 3; ++d) {
            out.push_back(coloring::make_baseline(coloring::BaselineKind::cyclic, M, d).coloring);
            out.push_back(coloring::make_baseline(coloring::BaselineKind::random, M, d, {{}, 11}).coloring);
            try {
                out.push_back(schemegen::generate_scheme(M, d, coloring::Mode::paper).coloring);
            } catch (const Error&) {
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("box helpers") {
    const auto b = parse_box("1:4,2:3");
    CHECK(b == box2(1, 4, 2, 3));
    CHECK(b.to_string() == "[1..4]x[2..3]");
    CHECK(b.cardinality() == 8);
    CHECK(Box::empty(2).is_empty());
    CHECK(Box::empty(2).cardinality() == 0);
    CHECK_THROWS_AS(parse_box("1-4"), Error);
    CHECK_THROWS_AS(parse_box("3:2"), Error);
    CHECK(ScaledValue{2, 4}.to_string() == "1/2");
    CHECK(ScaledValue{8, 4}.to_string() == "2");
    CHECK(Rational::make(-3, 6).to_string() == "-1/2");
}

TEST_CASE("counts and response time") {
    const auto four = schemegen::generate_scheme(4, 3, coloring::Mode::paper);
    const GridEvaluator ev(four.coloring, 4);
    for (std::uint32_t c = 1; c <= 4; ++c) {
        CHECK(ev.count_in_box(Box::cube(3, 4), c) == 16);
        CHECK(ev.count_in_box(Box{{1, 2, 3}, {4, 2, 3}}, c) == 1);  // row
        CHECK(ev.count_in_box(Box::empty(3), c) == 0);
    }
    CHECK(ev.response_time(Box{{2, 1, 4}, {2, 4, 4}}) == 1);
    CHECK(ev.response_time(Box::cube(3, 4)) == 16);

    const auto checker = coloring::make_baseline(coloring::BaselineKind::checkerboard, 2, 2);
    CHECK(response_time(checker, 4, box2(3, 3, 2, 2)) == 1);
    CHECK_THROWS_AS(ev.count_in_box(Box{{1, 1, 1}, {5, 1, 1}}, 1), Error);
}

TEST_CASE("periodic counter agrees with the tabulated grid") {
    for (const auto& c : small_colorings()) {
        const Coord N = 2 * c.disks() + 1;
        if (c.dim() == 3 && c.disks() > 4) continue;
        const GridEvaluator ev(c, N);
        const PeriodicCounter pc(c);
        for (Coord l = 1; l <= N; l += 2) {
            for (Coord h = l; h <= N; h += 3) {
                Box b{std::vector<Coord>(c.dim(), l), std::vector<Coord>(c.dim(), h)};
                b.lo[0] = 1;
                REQUIRE(pc.counts_in_box(b) == ev.counts_in_box(b));
                REQUIRE(pc.response_time(b) == ev.response_time(b));
            }
        }
    }
    const auto c = coloring::make_baseline(coloring::BaselineKind::cyclic, 7, 2).coloring;
    const PeriodicCounter pc(c);
    const auto far = pc.counts_in_box(box2(1'000'000, 1'000'006, 5, 11));
    for (auto n : far) CHECK(n == 7);
}

TEST_CASE("worked discrepancy values") {
    for (Coord N : {2, 3, 5, 8}) {
        const auto checker = coloring::make_baseline(coloring::BaselineKind::checkerboard, 2, 2);
        const auto r = disc_report(checker, N);
        CHECK(r.disc_plus == ScaledValue{1, 2});
        CHECK(r.disc_plus_witness.box.cardinality() == 1);
    }
    const auto cyc = coloring::make_baseline(coloring::BaselineKind::cyclic, 8, 2);
    const auto r = disc_report(cyc, 8);
    CHECK(r.disc_plus == ScaledValue{16, 8});
    CHECK(r.disc_plus_witness.box == box2(1, 4, 1, 4));
    CHECK(r.sandwich_holds());
    CHECK(r.sum_zero_ok);

    const auto pos = disc_report(cyc, 8, true);
    CHECK_FALSE(pos.disc);
    CHECK(pos.disc_plus == r.disc_plus);
}

TEST_CASE("sweep matches the naive all-boxes oracle") {
    for (const auto& c : small_colorings()) {
        for (Coord N : {Coord{1}, Coord{c.disks()}, Coord{c.disks() + 2}}) {
            if (c.dim() == 3 && N > 8) continue;
            CAPTURE(c.disks());
            CAPTURE(c.dim());
            CAPTURE(N);
            const auto naive = oracle::naive_disc(c, N);
            const auto r = disc_report(c, N);
            REQUIRE(r.disc);
            CHECK(r.disc_plus.num == naive.plus.value);
            CHECK(r.disc->num == naive.abs.value);
            CHECK(r.disc_plus_witness.box == naive.plus.box);
            CHECK(r.disc_plus_witness.color == naive.plus.color);
            CHECK(r.disc_witness->box == naive.abs.box);
            CHECK(r.disc_witness->color == naive.abs.color);
            CHECK(r.sandwich_holds());
            CHECK(r.sum_zero_ok);
        }
    }
}

TEST_CASE("parallel and serial sweeps agree") {
    for (const auto& c : small_colorings()) {
        const Coord N = c.dim() == 2 ? 3 * c.disks() : c.disks() + 1;
        const auto a = disc_report(c, N), b = disc_report_serial(c, N);
        CHECK(a.disc->num == b.disc->num);
        CHECK(a.disc_plus == b.disc_plus);
        CHECK(a.disc_plus_witness.box == b.disc_plus_witness.box);
        CHECK(a.disc_witness->box == b.disc_witness->box);
        for (std::size_t i = 0; i < a.per_color.size(); ++i) {
            CHECK(a.per_color[i].plus_num == b.per_color[i].plus_num);
            CHECK(a.per_color[i].abs_num == b.per_color[i].abs_num);
        }
    }
}

TEST_CASE("budget guard") {
    const auto c = coloring::make_baseline(coloring::BaselineKind::cyclic, 5, 3).coloring;
    try {
        (void)disc_report(c, 40, false, Budget{1000});
        FAIL("budget ignored");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::budget_exceeded);
    }
}

TEST_CASE("reduction of a box to one period") {
    const std::uint32_t M = 4;
    CHECK(reduce_box_to_period(box2(1, 4, 1, 4), M) == box2(1, 4, 1, 4));
    CHECK(reduce_box_to_period(box2(5, 8, 1, 4), M) == box2(1, 4, 1, 4));
    CHECK(reduce_box_to_period(box2(2, 5, 1, 4), M).is_empty());

    // Deviation of a box equals (up to sign per wrapped axis) the deviation of its reduction.
    for (const auto& c : small_colorings()) {
        if (c.dim() != 2) continue;
        const std::uint32_t m = c.disks();
        const GridEvaluator big(c, 2 * m), small(c, m);
        for (Coord l1 = 1; l1 <= 2 * m; ++l1) {
            for (Coord h1 = l1; h1 <= 2 * m; ++h1) {
                for (Coord l2 = 1; l2 <= 2 * m; l2 += 2) {
                    for (Coord h2 = l2; h2 <= 2 * m; h2 += 3) {
                        const auto b = box2(l1, h1, l2, h2);
                        const auto r = reduce_box_to_period(b, m);
                        const int sign = wrapped_axes(b, m) % 2 ? -1 : 1;
                        for (std::uint32_t col = 1; col <= m; ++col) {
                            const std::int64_t lhs = big.scaled_deviation(b, col);
                            const std::int64_t rhs = r.is_empty() ? 0 : small.scaled_deviation(r, col);
                            REQUIRE(lhs == sign * rhs);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("geometric discrepancy") {
    PointSet none{2, {}};
    CHECK(geometric_discrepancy(none, 3).value == Rational{0, 1});

    PointSet centre{2, {{Rational{1, 2}, Rational{1, 2}}}};
    const auto g = geometric_discrepancy(centre, 2);
    CHECK(g.value == Rational{3, 4});
    CHECK(g.witness == box2(2, 2, 2, 2));
    CHECK(g.signed_value == Rational{3, 4});

    const auto net = nets::net_from_generators(nets::pascal_power_generators(2, 2, 2));
    const auto ps = PointSet::from_net(net);
    CHECK(geometric_discrepancy(ps, 4).value <= Rational{1, 1});
    const auto col = coloring::coloring_from_net(net, 4);
    const GridEvaluator ev(col, 4);
    std::size_t boxes = 0;
    for (Coord l1 = 1; l1 <= 4; ++l1)
        for (Coord h1 = l1; h1 <= 4; ++h1)
            for (Coord l2 = 1; l2 <= 4; ++l2)
                for (Coord h2 = l2; h2 <= 4; ++h2) {
                    const auto b = box2(l1, h1, l2, h2);
                    CHECK(ev.count_in_box(b, 1) == geometric_count(ps, 4, b));
                    ++boxes;
                }
    CHECK(boxes == 100);

    PointSet outside{1, {{Rational{1, 1}}}};
    CHECK_THROWS_AS(geometric_discrepancy(outside, 2), Error);
}

TEST_CASE("complement decomposition") {
    const auto parts = complement_decompose(box2(2, 3, 2, 3), 4);
    const std::vector<Box> expect{box2(1, 1, 1, 4), box2(4, 4, 1, 4), box2(2, 3, 1, 1), box2(2, 3, 4, 4)};
    CHECK(parts == expect);
    CHECK(complement_decompose(box2(1, 4, 1, 4), 4).empty());
    CHECK(complement_decompose(box2(1, 2, 1, 4), 4) == std::vector<Box>{box2(3, 4, 1, 4)});

    // Pieces are disjoint and, with the box, tile the cube.
    const Box b{{2, 1, 3}, {3, 4, 3}};
    std::uint64_t total = b.cardinality();
    for (const auto& p : complement_decompose(b, 4)) total += p.cardinality();
    CHECK(total == 64);
}

TEST_CASE("witness pipeline") {
    CHECK(subgrid_extent(16, 2) == 16);
    CHECK(subgrid_extent(16, 3) == 4);
    CHECK(subgrid_extent(9, 3) == 3);

    const auto checker = coloring::make_baseline(coloring::BaselineKind::checkerboard, 2, 2);
    const auto cc = witness_pipeline(checker.coloring);
    CHECK(cc.value == ScaledValue{1, 2});
    CHECK(cc.box.cardinality() == 1);

    for (std::uint32_t M : {8u, 16u}) {
        const auto cyc = coloring::make_baseline(coloring::BaselineKind::cyclic, M, 2).coloring;
        const auto cert = witness_pipeline(cyc);
        CHECK(cert.value.num >= 2 * static_cast<std::int64_t>(M));
        const GridEvaluator ev(cyc, M);
        CHECK(ev.scaled_deviation(cert.box, cert.box_color) == cert.value.num);
        CHECK(cert.value == disc_report(cyc, M, true).disc_plus);
        if (cert.chain_value.num > 0) {
            CHECK(ev.scaled_deviation(cert.chain_box, cert.chain_color) == cert.chain_value.num);
        }
    }

    const auto p = schemegen::generate_scheme(9, 3, coloring::Mode::paper).coloring;
    const auto cert = witness_pipeline(p);
    CHECK(cert.value.num > 0);
    const GridEvaluator ev(p, cert.subgrid);
    if (cert.box.inside(cert.subgrid)) CHECK(ev.scaled_deviation(cert.box, cert.box_color) == cert.value.num);
}
