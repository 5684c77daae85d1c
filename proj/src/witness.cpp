// Lower-bound certificate for a latin coloring: restrict to a small subgrid,
// scale one color class into the unit cube, take its worst box, and turn it
// into a box of the coloring with strictly positive deviation.

#include <algorithm>
#include <limits>

#include "decluster/discrepancy.hpp"
#include "decluster/error.hpp"

namespace decluster::discrepancy {

namespace {

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t r = 1;
    while (exp--) r *= base;
    return r;
}

// Lexicographically first box of [L]^d maximizing `score`; ties keep the first.
template <typename Score>
std::pair<Box, __int128> best_box(std::uint32_t d, Coord L, Score&& score) {
    std::vector<std::pair<Coord, Coord>> ranges;
    for (Coord lo = 1; lo <= L; ++lo) {
        for (Coord hi = lo; hi <= L; ++hi) ranges.emplace_back(lo, hi);
    }
    Box box{std::vector<Coord>(d), std::vector<Coord>(d)};
    Box best;
    __int128 best_value = std::numeric_limits<std::int64_t>::min();
    std::vector<std::size_t> idx(d, 0);
    for (;;) {
        for (std::uint32_t j = 0; j < d; ++j) {
            box.lo[j] = ranges[idx[j]].first;
            box.hi[j] = ranges[idx[j]].second;
        }
        const __int128 v = score(box);
        if (v > best_value || (v == best_value && box < best)) {
            best_value = v;
            best = box;
        }
        std::size_t j = d;
        while (j-- > 0) {
            if (++idx[j] < ranges.size()) break;
            idx[j] = 0;
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
    return {best, best_value};
}

}  // namespace

Coord subgrid_extent(std::uint32_t M, std::uint32_t d) {
    if (d < 2) throw Error(ErrorKind::invalid_parameter, "witness pipeline needs d >= 2");
    if (d == 2) return M;
    // s = j/M with M^-(d-2)/(d-1) <= j/M  <=>  j^(d-1) >= M; the smallest such j
    // also satisfies j <= 2 M^(1/(d-1)) and j <= M.
    Coord j = 1;
    while (ipow(static_cast<std::uint64_t>(j), d - 1) < M) ++j;
    return j;
}

WitnessCertificate witness_pipeline(const coloring::LatinColoring& coloring) {
    const std::uint32_t M = coloring.disks();
    const std::uint32_t d = coloring.dim();
    if (d >= 3 && M < 3) {
        throw Error(ErrorKind::invalid_parameter, "witness pipeline needs M >= 3 for d >= 3");
    }
    const Coord sm = subgrid_extent(M, d);
    if (sm < 1) throw Error(ErrorKind::invalid_parameter, "degenerate subgrid: s*M < 1");

    WitnessCertificate cert;
    cert.M = M;
    cert.d = d;
    cert.subgrid = sm;
    cert.s = {sm, M};

    const GridEvaluator sub(coloring, sm, Budget{std::numeric_limits<std::uint64_t>::max()});
    const Box whole = Box::cube(d, sm);
    const std::uint64_t cells = whole.cardinality();

    // A color with at least the average share s^d M^(d-1) = (sM)^d / M of the subgrid.
    const auto class_sizes = sub.counts_in_box(whole);
    cert.color = 0;
    for (std::uint32_t c = 1; c <= M; ++c) {
        if (static_cast<std::uint64_t>(M) * class_sizes[c - 1] >= cells) {
            cert.color = c;
            break;
        }
    }
    cert.points = class_sizes[cert.color - 1];
    const auto n = static_cast<__int128>(cert.points);

    // Points x_z = (2z-1)/(2sM) against boxes with corners on the 1/(sM) grid: a
    // real box and its rounding hold the same points, so the grid box
    // [lo..hi] <-> prod [(lo-1)/(sM), hi/(sM)) covers every case.
    // Scaled by (sM)^d: (sM)^d |P cap R| - n prod(len).
    const __int128 gd = static_cast<__int128>(cells);
    auto geometric = [&](const Box& b) {
        return gd * static_cast<__int128>(sub.count_in_box(b, cert.color)) -
               n * static_cast<__int128>(b.cardinality());
    };
    auto [gbox, gmag] = best_box(d, sm, [&](const Box& b) {
        const __int128 v = geometric(b);
        return v < 0 ? -v : v;
    });
    cert.geometric_box = gbox;
    cert.geometric_deviation = Rational::make(geometric(gbox), gd);
    (void)gmag;

    const std::int64_t grid_dev = sub.scaled_deviation(gbox, cert.color);
    cert.grid_deviation = {grid_dev, M};

    cert.chain_box = Box::empty(d);
    if (grid_dev > 0) {
        cert.chain_box = gbox;
        cert.chain_color = cert.color;
        cert.chain_value = {grid_dev, M};
    } else if (grid_dev < 0) {
        // Deficit in the grid box: take the best positive piece of its complement.
        cert.used_complement = true;
        std::int64_t best = 0;
        for (const auto& piece : complement_decompose(gbox, sm)) {
            const std::int64_t v = sub.scaled_deviation(piece, cert.color);
            if (v > best) {
                best = v;
                cert.chain_box = piece;
            }
        }
        if (best > 0) {
            cert.chain_color = cert.color;
            cert.chain_value = {best, M};
        }
    }
    cert.box = cert.chain_box;
    cert.box_color = cert.chain_color;
    cert.value = cert.chain_value;

    // Exhaustive search over the same subgrid; its box replaces the chain's when larger.
    const auto unlimited = Budget{std::numeric_limits<std::uint64_t>::max()};
    auto report = disc_report(coloring, sm, true, unlimited);
    if (report.disc_plus.num <= 0 && sm < static_cast<Coord>(M)) report = disc_report(coloring, M, true, unlimited);
    if (report.disc_plus.num > cert.value.num) {
        cert.refined = true;
        cert.box = report.disc_plus_witness.box;
        cert.box_color = report.disc_plus_witness.color;
        cert.value = report.disc_plus;
    }
    return cert;
}

}  // namespace decluster::discrepancy
