// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "decluster/discrepancy.hpp"
#include "decluster/error.hpp"
#include "decluster/nets.hpp"
#include "decluster/schemegen.hpp"
#include "oracle.hpp"

using namespace decluster;
using coloring::Mode;
using discrepancy::Box;
using discrepancy::Coord;
using discrepancy::DiscReport;
using discrepancy::Rational;

namespace {

// Every report produced by criteria 1-8, re-checked by criterion 5.
std::vector<DiscReport> g_reports;

DiscReport report(const coloring::LatinColoring& c, Coord N, bool positive_only = false) {
    auto r = discrepancy::disc_report(c, N, positive_only, discrepancy::Budget{std::uint64_t{1} << 40});
    g_reports.push_back(r);
    return r;
}

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

Rational as_rational(const discrepancy::ScaledValue& v) { return Rational::make(v.num, v.den); }

Outcome checkerboard_exactness() {
    Outcome o;
    for (std::uint32_t d : {2u, 3u}) {
        const auto s = schemegen::generate_scheme(2, d, Mode::checkerboard);
        for (Coord N : {2, 3, 5, 8}) {
            const auto r = report(s.coloring, N);
            if (r.disc_plus.num != 1 || r.disc_plus.den != 2) {
                o.fail("d=" + std::to_string(d) + " N=" + std::to_string(N) + " disc+=" + r.disc_plus.to_string());
            }
        }
    }
    o.detail = o.ok ? "disc+ = 1/2 at every (d, N)" : o.detail;
    return o;
}

Outcome net_sweep() {
    Outcome o;
    std::size_t nets_checked = 0;
    for (std::uint32_t b : {2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
        for (std::uint32_t d = 1; d <= b + 1; ++d) {
            for (std::uint32_t m = 0, pts = 1; pts <= 100000; ++m, pts *= b) {
                const auto net = nets::build_net(b, m, d);
                const auto v = nets::verify_net(net, 0);
                ++nets_checked;
                if (!v.passed) o.fail("b=" + std::to_string(b) + " m=" + std::to_string(m) + " d=" + std::to_string(d));
            }
        }
    }
    for (std::uint32_t b : {6u, 10u, 12u, 15u}) {
        const auto q1 = static_cast<std::uint32_t>(schemegen::factorize_canonical(b).q1());
        for (std::uint32_t d = 1; d <= q1 + 1; ++d) {
            for (std::uint32_t m = 0; m <= 3; ++m) {
                const auto net = nets::build_net(b, m, d);
                ++nets_checked;
                if (!nets::verify_net(net, 0).passed) {
                    o.fail("b=" + std::to_string(b) + " m=" + std::to_string(m) + " d=" + std::to_string(d));
                }
            }
        }
    }
    if (o.ok) o.detail = std::to_string(nets_checked) + " nets are (0,m,d)-nets";
    return o;
}

Outcome latin_rows() {
    Outcome o;
    std::size_t schemes = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cases;
    for (std::uint32_t M = 3; M <= 32; ++M) {
        for (std::uint32_t d : {2u, 3u}) {
            if (d <= schemegen::factorize_canonical(M).q1() + 1) cases.emplace_back(M, d);
        }
    }
    cases.insert(cases.end(), {{4, 4}, {5, 4}, {8, 5}, {16, 5}});
    for (const auto& [M, d] : cases) {
        const auto s = schemegen::generate_scheme(M, d, Mode::paper);
        ++schemes;
        const auto rep = coloring::verify_latin(s.coloring);
        if (!rep.passed) o.fail("M=" + std::to_string(M) + " d=" + std::to_string(d) + ": " + rep.describe());
    }
    if (o.ok) o.detail = std::to_string(schemes) + " paper-mode schemes latin";
    return o;
}

Outcome tiling_equality() {
    Outcome o;
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> cases{{4, 2}, {5, 2}, {6, 2}, {7, 2}, {3, 3}, {4, 3}};
    std::size_t evaluated = 0;
    for (const auto& [M, d] : cases) {
        for (Mode mode : {Mode::paper, Mode::cyclic}) {
            const auto s = schemegen::generate_scheme(M, d, mode);
            const auto base = report(s.coloring, M);
            const Coord m = M;
            for (Coord N : {m, m + 1, 2 * m - 1, 2 * m, 3 * m + 2}) {
                const auto r = report(s.coloring, N);
                ++evaluated;
                if (*r.disc != *base.disc) {
                    o.fail("M=" + std::to_string(M) + " d=" + std::to_string(d) + " N=" + std::to_string(N) +
                           " disc " + r.disc->to_string() + " vs " + base.disc->to_string());
                }
            }
        }
    }
    if (o.ok) o.detail = std::to_string(evaluated) + " extents match disc over [M]^d";
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    std::size_t instances = 0;
    for (std::uint32_t d = 1; d <= 3; ++d) {
        for (std::uint32_t M = 1; M <= 6; ++M) {
            std::vector<coloring::LatinColoring> colorings;
            try {
                colorings.push_back(schemegen::generate_scheme(M, d, Mode::paper).coloring);
            } catch (const Error&) {
                // d exceeds q1+1 for this M
            }
            colorings.push_back(schemegen::generate_scheme(M, d, Mode::cyclic).coloring);
            for (std::uint64_t seed : {1, 2, 3}) {
                colorings.push_back(schemegen::generate_scheme(M, d, Mode::random, {seed, {}}).coloring);
            }
            for (const auto& c : colorings) {
                for (Coord N = 1; N <= 12; ++N) {
                    const auto naive = oracle::naive_disc(c, N);
                    const auto r = report(c, N);
                    ++instances;
                    const bool same = r.disc_plus.num == naive.plus.value && r.disc->num == naive.abs.value &&
                                      r.disc_plus_witness.box == naive.plus.box &&
                                      r.disc_plus_witness.color == naive.plus.color &&
                                      r.disc_witness->box == naive.abs.box && r.disc_witness->color == naive.abs.color;
                    if (!same) {
                        o.fail("M=" + std::to_string(M) + " d=" + std::to_string(d) + " N=" + std::to_string(N));
                    }
                }
            }
        }
    }
    if (o.ok) o.detail = std::to_string(instances) + " instances match the naive enumerator";
    return o;
}

Outcome net_transfer() {
    Outcome o;
    std::size_t boxes = 0;
    for (const auto& [M, d] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{8, 2}, {9, 2}, {4, 3}}) {
        const auto net = schemegen::scheme_net(M, d, Mode::paper);
        const auto c = coloring::coloring_from_net(net, M);
        const auto points = discrepancy::PointSet::from_net(net);
        const discrepancy::GridEvaluator ev(c, M);
        Box box{std::vector<Coord>(d, 1), std::vector<Coord>(d, 1)};
        std::function<void(std::uint32_t)> walk = [&](std::uint32_t axis) {
            if (axis == d) {
                ++boxes;
                if (ev.count_in_box(box, 1) != discrepancy::geometric_count(points, M, box)) {
                    o.fail("M=" + std::to_string(M) + " box " + box.to_string());
                }
                return;
            }
            for (Coord lo = 1; lo <= static_cast<Coord>(M); ++lo) {
                for (Coord hi = lo; hi <= static_cast<Coord>(M); ++hi) {
                    box.lo[axis] = lo;
                    box.hi[axis] = hi;
                    walk(axis + 1);
                }
            }
        };
        walk(0);
        const auto r = report(c, M);
        const auto geo = discrepancy::geometric_discrepancy(points, M);
        if (as_rational(*r.disc) > geo.value) {
            o.fail("M=" + std::to_string(M) + " d=" + std::to_string(d) + " disc " + r.disc->to_string() + " > D " +
                   geo.value.to_string());
        }
    }
    if (o.ok) o.detail = std::to_string(boxes) + " grid boxes agree; disc <= geometric D";
    return o;
}

Outcome growth_separation() {
    Outcome o;
    std::ostringstream table;
    Rational prev{-1, 1};
    for (std::uint32_t k = 2; k <= 7; ++k) {
        const std::uint32_t M = 1u << k;
        const auto net_scheme = schemegen::generate_scheme(M, 2, Mode::smallbase);
        const auto cyc = schemegen::generate_scheme(M, 2, Mode::cyclic);
        const auto rn = report(net_scheme.coloring, M, true);
        const auto rc = report(cyc.coloring, M, true);
        const auto dn = as_rational(rn.disc_plus), dc = as_rational(rc.disc_plus);
        table << " M=" << M << ":" << dn.to_string() << "/" << dc.to_string();

        if (prev.num >= 0 && Rational::make(static_cast<__int128>(dn.num) * prev.den - static_cast<__int128>(prev.num) * dn.den,
                                            static_cast<__int128>(dn.den) * prev.den) > Rational{2, 1}) {
            o.fail("disc+ jumps by more than 2 at M=" + std::to_string(M));
        }
        prev = dn;

        // Certificate box [1..ceil(M/2)]^2 for the baseline, checked directly.
        const discrepancy::GridEvaluator ev(cyc.coloring, M);
        const Coord h = (M + 1) / 2;
        const Box cert{{1, 1}, {h, h}};
        std::int64_t best = 0;
        for (std::uint32_t c = 1; c <= M; ++c) best = std::max(best, ev.scaled_deviation(cert, c));
        // best / M >= M/4 - 1  <=>  4 best >= M^2 - 4M
        const std::int64_t mm = M;
        if (4 * best < mm * mm - 4 * mm) o.fail("baseline certificate too small at M=" + std::to_string(M));
        if (M >= 16 && !(dn < dc)) o.fail("scheme does not beat baseline at M=" + std::to_string(M));
    }
    o.detail = (o.ok ? std::string("smallbase/cyclic disc+:") : o.detail + ";") + table.str();
    return o;
}

Outcome witness_pipeline() {
    Outcome o;
    std::ostringstream out;
    for (std::uint32_t M : {8u, 16u, 32u}) {
        const auto cyc = schemegen::generate_scheme(M, 2, Mode::cyclic);
        const auto cert = discrepancy::witness_pipeline(cyc.coloring);
        const auto exhaustive = discrepancy::disc_report(cyc.coloring, M, true);
        const discrepancy::GridEvaluator ev(cyc.coloring, M);
        out << " M=" << M << ":" << cert.value.to_string();
        if (cert.value.num < 2 * static_cast<std::int64_t>(M)) o.fail("value below 2 at M=" + std::to_string(M));
        if (ev.scaled_deviation(cert.box, cert.box_color) != cert.value.num) {
            o.fail("certificate box does not attain its value at M=" + std::to_string(M));
        }
        if (cert.value != exhaustive.disc_plus) o.fail("certificate differs from exhaustive disc+ at M=" + std::to_string(M));
    }
    o.detail = (o.ok ? std::string("certificates:") : o.detail + ";") + out.str();
    return o;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "decluster_acceptance";
    std::filesystem::create_directories(dir);
    const std::string cli = DECLUSTER_CLI;
    const std::vector<std::string> invocations{
        "--disks 12 --dim 3 --mode paper", "--disks 9 --dim 4 --mode smallbase", "--disks 7 --dim 3 --mode cyclic",
        "--disks 10 --dim 2 --mode random --seed 17", "--disks 2 --dim 3 --mode checkerboard"};
    int idx = 0;
    for (const auto& args : invocations) {
        const auto a = dir / ("a" + std::to_string(idx) + ".json");
        const auto b = dir / ("b" + std::to_string(idx) + ".json");
        ++idx;
        for (const auto& path : {a, b}) {
            const std::string cmd = "\"" + cli + "\" generate " + args + " --out \"" + path.string() + "\" > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) o.fail("generate failed: " + args);
        }
        const auto text = read_file(a);
        if (text.empty() || text != read_file(b)) o.fail("non-identical output: " + args);

        const auto scheme = schemegen::read_scheme(a.string());
        if (schemegen::dump(schemegen::scheme_to_json(scheme)) != text) o.fail("re-export differs: " + args);
        std::ostringstream m1, m2;
        schemegen::export_map(scheme, 2 * scheme.disks(), m1);
        schemegen::export_map(schemegen::generate_scheme(scheme.disks(), scheme.dim(), scheme.provenance.requested_mode,
                                                         {scheme.provenance.seed, scheme.provenance.skews}),
                              2 * scheme.disks(), m2);
        if (m1.str() != m2.str()) o.fail("exported map differs after import: " + args);
    }
    if (o.ok) o.detail = std::to_string(invocations.size()) + " invocations byte-identical; roundtrip lossless";
    return o;
}

Outcome report_invariants() {
    Outcome o;
    for (const auto& r : g_reports) {
        if (!r.sandwich_holds() || !r.sum_zero_ok) {
            o.fail("M=" + std::to_string(r.M) + " d=" + std::to_string(r.d) + " N=" + std::to_string(r.N));
        }
    }
    if (o.ok) o.detail = std::to_string(g_reports.size()) + " reports satisfy sandwich and sum-zero";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    // Criterion 5 audits the reports of the others, so it runs last.
    const std::vector<Criterion> criteria{
        {1, "checkerboard exactness", 1, checkerboard_exactness},
        {2, "net sweep", 300, net_sweep},
        {3, "latin rows", 60, latin_rows},
        {4, "tiling equality", 300, tiling_equality},
        {6, "oracle equivalence", 600, oracle_equivalence},
        {7, "net transfer", 60, net_transfer},
        {8, "growth separation", 600, growth_separation},
        {9, "witness pipeline", 120, witness_pipeline},
        {10, "determinism", 60, determinism},
        {5, "sandwich and sum-zero", 60, report_invariants},
    };
    std::vector<std::string> lines(11);
    bool all = true;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_s) out.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_s) + " s");
        all = all && out.ok;
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        lines[c.id] = "criterion " + std::to_string(c.id) + " " + (out.ok ? "PASS" : "FAIL") + "  " + c.name + " (" +
                      timing + "): " + out.detail;
    }
    for (int i = 1; i <= 10; ++i) std::cout << lines[i] << '\n';
    return all ? 0 : 1;
}
