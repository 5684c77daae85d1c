#include "decluster/coloring.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "decluster/error.hpp"

namespace decluster::coloring {

namespace {

std::uint64_t lines_for(std::uint32_t M, std::uint32_t d) {
    std::uint64_t n = 1;
    for (std::uint32_t i = 1; i < d; ++i) {
        if (n > (std::uint64_t{1} << 40) / M) {
            throw Error(ErrorKind::invalid_parameter, "M^(d-1) too large for an anchor map");
        }
        n *= M;
    }
    return n;
}

// Uniform integer in [0, n) from raw 64-bit engine output. std::uniform_int_distribution
// is implementation-defined, which would break cross-platform determinism.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t x = gen();
        if (x >= threshold) return x % n;
    }
}

std::vector<std::uint32_t> random_permutation(std::mt19937_64& gen, std::uint32_t M) {
    std::vector<std::uint32_t> perm(M);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::uint32_t i = M; i > 1; --i) {
        const auto j = static_cast<std::uint32_t>(uniform_below(gen, i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

std::uint32_t mod_positive(std::int64_t v, std::uint32_t M) {
    const std::int64_t r = v % static_cast<std::int64_t>(M);
    return static_cast<std::uint32_t>(r < 0 ? r + M : r);
}

}  // namespace

LatinColoring::LatinColoring(std::uint32_t M, std::uint32_t d, std::vector<std::uint32_t> anchor)
    : M_(M), d_(d), anchor_(std::move(anchor)) {
    if (M < 1) throw Error(ErrorKind::invalid_parameter, "disk count must be >= 1");
    if (d < 1) throw Error(ErrorKind::invalid_parameter, "dimension must be >= 1");
    if (anchor_.size() != lines_for(M, d)) {
        throw Error(ErrorKind::invalid_parameter,
                    "anchor map has " + std::to_string(anchor_.size()) + " entries, expected M^(d-1)=" +
                        std::to_string(lines_for(M, d)));
    }
    for (auto a : anchor_) {
        if (a < 1 || a > M) {
            throw Error(ErrorKind::invalid_parameter, "anchor value " + std::to_string(a) + " outside [1.." +
                                                          std::to_string(M) + "]");
        }
    }
}

std::uint64_t LatinColoring::line_index(std::span<const Coord> rest) const {
    if (rest.size() + 1 != d_) {
        throw Error(ErrorKind::invalid_parameter, "line needs d-1 coordinates");
    }
    std::uint64_t idx = 0;
    for (auto x : rest) {
        if (x < 1 || x > static_cast<Coord>(M_)) {
            throw Error(ErrorKind::out_of_range, "coordinate " + std::to_string(x) + " outside [1.." +
                                                     std::to_string(M_) + "]");
        }
        idx = idx * M_ + static_cast<std::uint64_t>(x - 1);
    }
    return idx;
}

std::uint32_t LatinColoring::color_of(std::span<const Coord> cell) const {
    if (cell.size() != d_) {
        throw Error(ErrorKind::invalid_parameter, "cell has wrong dimension");
    }
    if (cell[0] < 1 || cell[0] > static_cast<Coord>(M_)) {
        throw Error(ErrorKind::out_of_range, "coordinate " + std::to_string(cell[0]) + " outside [1.." +
                                                 std::to_string(M_) + "]");
    }
    const auto line = line_index(cell.subspan(1));
    return color_fast(static_cast<std::uint32_t>(cell[0] - 1), line);
}

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::paper: return "paper";
        case Mode::smallbase: return "smallbase";
        case Mode::cyclic: return "cyclic";
        case Mode::random: return "random";
        case Mode::checkerboard: return "checkerboard";
    }
    return "unknown";
}

Mode parse_mode(const std::string& text) {
    for (auto m : {Mode::paper, Mode::smallbase, Mode::cyclic, Mode::random, Mode::checkerboard}) {
        if (to_string(m) == text) return m;
    }
    throw Error(ErrorKind::invalid_parameter, "unknown mode '" + text + "'");
}

LatinColoring coloring_from_net(const nets::DigitalNet& net, std::uint32_t M) {
    const auto& p = net.params();
    std::uint32_t k = 0;
    std::uint64_t power = 1;
    while (power < M) {
        power *= p.b;
        ++k;
    }
    if (power != M || k == 0) {
        throw Error(ErrorKind::incompatible_parameters,
                    "M=" + std::to_string(M) + " is not a power b^k (k >= 1) of the net base b=" +
                        std::to_string(p.b));
    }
    if (p.m != static_cast<std::uint64_t>(k) * (p.d - 1)) {
        throw Error(ErrorKind::incompatible_parameters,
                    "net depth m=" + std::to_string(p.m) + " differs from k(d-1)=" +
                        std::to_string(k * (p.d - 1)) + " for M=" + std::to_string(M));
    }
    const std::uint32_t d = p.d;
    const std::uint64_t lines = lines_for(M, d);
    std::vector<std::uint32_t> anchor(lines, 0);
    for (std::uint64_t pt = 0; pt < net.size(); ++pt) {
        std::uint64_t line = 0;
        for (std::uint32_t j = 1; j < d; ++j) line = line * M + net.prefix(pt, j, k);
        const auto x1 = static_cast<std::uint32_t>(net.prefix(pt, 0, k) + 1);
        if (anchor[line] != 0) {
            throw Error(ErrorKind::invalid_net,
                        "two net points fall on one axis-1 line (index " + std::to_string(line) +
                            "); the input is not a (0,m,d)-net");
        }
        anchor[line] = x1;
    }
    if (net.size() != lines) {
        throw Error(ErrorKind::invalid_net, "net has " + std::to_string(net.size()) +
                                                " points, expected M^(d-1)=" + std::to_string(lines));
    }
    return LatinColoring(M, d, std::move(anchor));
}

std::uint32_t disk_of(const LatinColoring& coloring, std::span<const Coord> block) {
    const std::uint32_t M = coloring.disks();
    if (block.size() != coloring.dim()) {
        throw Error(ErrorKind::invalid_parameter, "block has wrong dimension");
    }
    std::uint64_t line = 0;
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (block[i] < 1) {
            throw Error(ErrorKind::out_of_range, "block coordinate " + std::to_string(block[i]) + " < 1");
        }
        if (i > 0) line = line * M + static_cast<std::uint64_t>((block[i] - 1) % M);
    }
    return coloring.color_fast(static_cast<std::uint32_t>((block[0] - 1) % M), line);
}

std::uint32_t disk_of(const Scheme& scheme, std::span<const Coord> block) {
    return disk_of(scheme.coloring, block);
}

LatinColoring randomize(const LatinColoring& base, std::uint64_t seed) {
    const std::uint32_t M = base.disks();
    const std::uint32_t d = base.dim();
    std::mt19937_64 gen(seed);
    const auto rotation = static_cast<std::uint32_t>(uniform_below(gen, M));
    std::vector<std::vector<std::uint32_t>> perms;
    for (std::uint32_t i = 1; i < d; ++i) perms.push_back(random_permutation(gen, M));

    // new(x_1, u) = base(x_1 + rotation, pi(u))  =>  anchor'(u) = anchor(pi(u)) - rotation.
    std::vector<std::uint32_t> anchor(base.line_count());
    std::vector<std::uint32_t> u(d - 1, 0);
    for (std::uint64_t line = 0; line < anchor.size(); ++line) {
        std::uint64_t src = 0;
        for (std::uint32_t j = 0; j + 1 < d; ++j) src = src * M + perms[j][u[j]];
        const std::uint32_t a = base.anchor()[src] - 1;
        anchor[line] = mod_positive(static_cast<std::int64_t>(a) - rotation, M) + 1;
        for (std::size_t j = u.size(); j-- > 0;) {
            if (++u[j] < M) break;
            u[j] = 0;
        }
    }
    return LatinColoring(M, d, std::move(anchor));
}

Scheme make_baseline(BaselineKind kind, std::uint32_t M, std::uint32_t d, const BaselineParams& params) {
    Scheme scheme;
    const std::uint64_t lines = lines_for(M, d);
    std::vector<std::uint32_t> anchor(lines);
    std::vector<Coord> u(d - 1, 1);
    auto advance = [&] {
        for (std::size_t j = u.size(); j-- > 0;) {
            if (++u[j] <= static_cast<Coord>(M)) return;
            u[j] = 1;
        }
    };

    switch (kind) {
        case BaselineKind::checkerboard: {
            if (M != 2) {
                throw Error(ErrorKind::invalid_parameter,
                            "checkerboard requires M=2, got M=" + std::to_string(M));
            }
            // color(x) = (sum (x_i - 1) mod 2) + 1, so cell (1,..,1) has color 1.
            for (std::uint64_t line = 0; line < lines; ++line, advance()) {
                Coord s = 0;
                for (auto x : u) s += x - 1;
                anchor[line] = static_cast<std::uint32_t>(s % 2) + 1;
            }
            scheme.mode = Mode::checkerboard;
            scheme.provenance.requested_mode = Mode::checkerboard;
            break;
        }
        case BaselineKind::cyclic: {
            std::vector<std::uint32_t> skews = params.skews;
            if (skews.empty()) skews.assign(d - 1, 1);
            if (skews.size() != d - 1) {
                throw Error(ErrorKind::invalid_parameter,
                            "cyclic needs d-1=" + std::to_string(d - 1) + " skews, got " +
                                std::to_string(skews.size()));
            }
            for (auto s : skews) {
                if (std::gcd<std::uint64_t>(s, M) != 1) {
                    throw Error(ErrorKind::invalid_parameter,
                                "cyclic skew " + std::to_string(s) + " is not coprime to M=" +
                                    std::to_string(M) + "; rows would repeat colors");
                }
            }
            for (std::uint64_t line = 0; line < lines; ++line, advance()) {
                std::uint64_t s = 0;
                for (std::size_t j = 0; j < u.size(); ++j) s += static_cast<std::uint64_t>(skews[j]) * u[j];
                anchor[line] = static_cast<std::uint32_t>(s % M) + 1;
            }
            scheme.mode = Mode::cyclic;
            scheme.provenance.requested_mode = Mode::cyclic;
            scheme.provenance.skews = std::move(skews);
            break;
        }
        case BaselineKind::random: {
            const auto base = make_baseline(BaselineKind::cyclic, M, d, {});
            scheme.coloring = randomize(base.coloring, params.seed);
            scheme.mode = Mode::random;
            scheme.provenance.requested_mode = Mode::random;
            scheme.provenance.seed = params.seed;
            return scheme;
        }
    }
    scheme.coloring = LatinColoring(M, d, std::move(anchor));
    return scheme;
}

std::string LatinReport::describe() const {
    if (passed) return "latin: pass (" + std::to_string(rows_checked) + " rows)";
    std::string s = "latin: fail at axis-" + std::to_string(axis) + " row through (";
    for (std::size_t i = 0; i < cell.size(); ++i) {
        if (i) s += ",";
        s += (i + 1 == axis) ? std::string("*") : std::to_string(cell[i]);
    }
    s += ") with colors {";
    for (std::size_t i = 0; i < colors.size(); ++i) s += (i ? "," : "") + std::to_string(colors[i]);
    return s + "}";
}

LatinReport verify_latin(const LatinColoring& coloring) {
    const std::uint32_t M = coloring.disks();
    const std::uint32_t d = coloring.dim();
    LatinReport report;
    std::vector<Coord> cell(d, 1);
    std::vector<std::uint32_t> colors(M);
    std::vector<char> seen(M + 1);
    for (std::uint32_t axis = 0; axis < d; ++axis) {
        // Odometer over the d-1 fixed coordinates, lexicographic with x_1 slowest.
        std::fill(cell.begin(), cell.end(), 1);
        for (;;) {
            std::fill(seen.begin(), seen.end(), 0);
            bool ok = true;
            for (std::uint32_t x = 1; x <= M; ++x) {
                cell[axis] = x;
                const auto c = coloring.color_of(cell);
                colors[x - 1] = c;
                if (seen[c]) ok = false;
                seen[c] = 1;
            }
            ++report.rows_checked;
            if (!ok) {
                report.passed = false;
                report.axis = axis + 1;
                report.cell = cell;
                report.cell[axis] = 0;
                report.colors = colors;
                return report;
            }
            cell[axis] = 1;
            std::size_t j = d;
            bool done = true;
            while (j-- > 0) {
                if (j == axis) continue;
                if (++cell[j] <= static_cast<Coord>(M)) {
                    done = false;
                    break;
                }
                cell[j] = 1;
            }
            if (done) break;
        }
    }
    return report;
}

}  // namespace decluster::coloring
