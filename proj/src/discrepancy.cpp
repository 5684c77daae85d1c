#include "decluster/discrepancy.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "decluster/error.hpp"

namespace decluster::discrepancy {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        throw Error(ErrorKind::budget_exceeded, std::string(what) + " overflows 64 bits");
    }
    return a * b;
}

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

// --- Box / values ----------------------------------------------------------

Box Box::empty(std::size_t d) { return {std::vector<Coord>(d, 1), std::vector<Coord>(d, 0)}; }

Box Box::cube(std::size_t d, Coord extent) {
    return {std::vector<Coord>(d, 1), std::vector<Coord>(d, extent)};
}

bool Box::is_empty() const noexcept {
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) return true;
    }
    return false;
}

std::uint64_t Box::cardinality() const {
    if (is_empty()) return 0;
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        c = checked_mul(c, static_cast<std::uint64_t>(hi[i] - lo[i] + 1), "box cardinality");
    }
    return c;
}

bool Box::inside(Coord extent) const noexcept {
    if (is_empty()) return true;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] < 1 || hi[i] > extent) return false;
    }
    return true;
}

std::string Box::to_string() const {
    if (is_empty()) return "empty";
    std::string s;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (i) s += "x";
        s += "[" + std::to_string(lo[i]) + ".." + std::to_string(hi[i]) + "]";
    }
    return s;
}

Box parse_box(const std::string& text) {
    Box box;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) {
            throw Error(ErrorKind::parse_error, "box range '" + part + "' is not of the form lo:hi");
        }
        try {
            std::size_t used = 0;
            const Coord lo = std::stoll(part.substr(0, colon), &used);
            if (used != colon) throw std::invalid_argument(part);
            const std::string hs = part.substr(colon + 1);
            const Coord hi = std::stoll(hs, &used);
            if (used != hs.size()) throw std::invalid_argument(part);
            box.lo.push_back(lo);
            box.hi.push_back(hi);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::parse_error, "box range '" + part + "' is not numeric");
        }
    }
    if (box.lo.empty()) throw Error(ErrorKind::parse_error, "empty box specification");
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
        if (box.lo[i] < 1 || box.lo[i] > box.hi[i]) {
            throw Error(ErrorKind::parse_error, "box range " + std::to_string(box.lo[i]) + ":" +
                                                    std::to_string(box.hi[i]) + " must satisfy 1 <= lo <= hi");
        }
    }
    return box;
}

std::string ScaledValue::to_string() const { return Rational::make(num, den).to_string(); }

Rational Rational::make(__int128 num, __int128 den) {
    if (den == 0) throw Error(ErrorKind::division_by_zero, "rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
    if (num > lim || num < -lim || den > lim) {
        throw Error(ErrorKind::budget_exceeded, "rational value exceeds 64-bit range");
    }
    return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

std::string Rational::to_string() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Budget Budget::from_env() {
    Budget b;
    if (const char* env = std::getenv("DECLUSTER_MAX_CELLS")) {
        try {
            b.max_cells = std::stoull(env);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::parse_error, std::string("DECLUSTER_MAX_CELLS='") + env + "' is not a number");
        }
    }
    return b;
}

// --- GridEvaluator ---------------------------------------------------------

GridEvaluator::GridEvaluator(const coloring::LatinColoring& coloring, Coord extent, Budget budget)
    : M_(coloring.disks()), d_(coloring.dim()), N_(extent) {
    if (extent < 1) throw Error(ErrorKind::invalid_parameter, "extent N must be >= 1");
    std::uint64_t cells = M_;
    for (std::uint32_t i = 0; i < d_; ++i) cells = checked_mul(cells, static_cast<std::uint64_t>(N_), "N^d*M");
    if (cells > budget.max_cells) {
        throw Error(ErrorKind::budget_exceeded,
                    "N^d*M = " + std::to_string(cells) + " exceeds the cell budget " +
                        std::to_string(budget.max_cells) + " (set DECLUSTER_MAX_CELLS to raise it)");
    }
    const auto side = static_cast<std::uint64_t>(N_ + 1);
    inner_ = 1;
    for (std::uint32_t i = 1; i < d_; ++i) inner_ *= side;
    const std::uint64_t total = side * inner_;
    table_.assign(total * M_, 0);

    // Cell colors; slots with a zero coordinate stay empty.
    std::vector<Coord> x(d_, 0);
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        bool interior = true;
        std::uint64_t line = 0;
        for (std::uint32_t i = 0; i < d_; ++i) {
            if (x[i] == 0) interior = false;
            if (i > 0) line = line * M_ + static_cast<std::uint64_t>((x[i] - 1) % M_);
        }
        if (interior) {
            const auto c = coloring.color_fast(static_cast<std::uint32_t>((x[0] - 1) % M_), line);
            table_[flat * M_ + c - 1] = 1;
        }
        for (std::size_t i = d_; i-- > 0;) {
            if (++x[i] <= N_) break;
            x[i] = 0;
        }
    }
    // Running sums along each axis.
    std::uint64_t stride = inner_;
    for (std::uint32_t axis = 0; axis < d_; ++axis) {
        for (std::uint64_t flat = 0; flat < total; ++flat) {
            if ((flat / stride) % side == 0) continue;
            std::uint32_t* dst = table_.data() + flat * M_;
            const std::uint32_t* src = table_.data() + (flat - stride) * M_;
            for (std::uint32_t c = 0; c < M_; ++c) dst[c] += src[c];
        }
        stride /= side;
    }
}

std::uint64_t GridEvaluator::flat_index(std::span<const Coord> corner) const noexcept {
    std::uint64_t flat = 0;
    for (auto c : corner) flat = flat * static_cast<std::uint64_t>(N_ + 1) + static_cast<std::uint64_t>(c);
    return flat;
}

void GridEvaluator::check_box(const Box& box) const {
    if (box.dim() != d_ || box.hi.size() != d_) {
        throw Error(ErrorKind::invalid_parameter, "box dimension differs from scheme dimension");
    }
    if (!box.inside(N_)) {
        throw Error(ErrorKind::out_of_range, "box " + box.to_string() + " leaves [1.." + std::to_string(N_) + "]^" +
                                                 std::to_string(d_));
    }
}

std::vector<std::uint64_t> GridEvaluator::counts_in_box(const Box& box) const {
    check_box(box);
    std::vector<std::uint64_t> out(M_, 0);
    if (box.is_empty()) return out;
    std::vector<std::int64_t> acc(M_, 0);
    std::vector<Coord> corner(d_);
    for (std::uint32_t mask = 0; mask < (1u << d_); ++mask) {
        int sign = 1;
        for (std::uint32_t i = 0; i < d_; ++i) {
            if (mask & (1u << i)) {
                corner[i] = box.lo[i] - 1;
                sign = -sign;
            } else {
                corner[i] = box.hi[i];
            }
        }
        const std::uint64_t flat = flat_index(corner);
        for (std::uint32_t c = 0; c < M_; ++c) acc[c] += sign * static_cast<std::int64_t>(table_[flat * M_ + c]);
    }
    for (std::uint32_t c = 0; c < M_; ++c) out[c] = static_cast<std::uint64_t>(acc[c]);
    return out;
}

std::uint64_t GridEvaluator::count_in_box(const Box& box, std::uint32_t color) const {
    if (color < 1 || color > M_) {
        throw Error(ErrorKind::out_of_range, "color " + std::to_string(color) + " outside [1.." +
                                                 std::to_string(M_) + "]");
    }
    return counts_in_box(box)[color - 1];
}

std::uint64_t GridEvaluator::response_time(const Box& box) const {
    const auto counts = counts_in_box(box);
    return *std::max_element(counts.begin(), counts.end());
}

std::int64_t GridEvaluator::scaled_deviation(const Box& box, std::uint32_t color) const {
    return static_cast<std::int64_t>(M_) * static_cast<std::int64_t>(count_in_box(box, color)) -
           static_cast<std::int64_t>(box.cardinality());
}

std::uint64_t count_in_box(const coloring::Scheme& scheme, Coord extent, const Box& box, std::uint32_t color,
                           Budget budget) {
    return GridEvaluator(scheme.coloring, extent, budget).count_in_box(box, color);
}

std::uint64_t response_time(const coloring::Scheme& scheme, Coord extent, const Box& box, Budget budget) {
    return GridEvaluator(scheme.coloring, extent, budget).response_time(box);
}

// --- PeriodicCounter -------------------------------------------------------

PeriodicCounter::PeriodicCounter(const coloring::LatinColoring& coloring, Budget budget)
    : period_(coloring, coloring.disks(), budget) {}

__int128 PeriodicCounter::prefix(std::span<const Coord> corner, std::uint32_t color) const {
    // Counting over [1..x_i] splits per axis into q_i full periods plus [1..r_i],
    // and the prefix count is multilinear in those pieces.
    const std::uint32_t d = period_.dim();
    const Coord M = period_.disks();
    std::vector<Coord> y(d);
    __int128 total = 0;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        __int128 weight = 1;
        for (std::uint32_t i = 0; i < d; ++i) {
            const Coord q = corner[i] / M;
            const Coord r = corner[i] % M;
            if (mask & (1u << i)) {
                weight *= q;
                y[i] = M;
            } else {
                y[i] = r;
            }
        }
        if (weight == 0) continue;
        total += weight * period_.prefix(period_.flat_index(y), color);
    }
    return total;
}

std::vector<std::uint64_t> PeriodicCounter::counts_in_box(const Box& box) const {
    const std::uint32_t d = period_.dim();
    if (box.dim() != d) throw Error(ErrorKind::invalid_parameter, "box dimension differs from scheme dimension");
    std::vector<std::uint64_t> out(period_.disks(), 0);
    if (box.is_empty()) return out;
    for (std::uint32_t i = 0; i < d; ++i) {
        if (box.lo[i] < 1) throw Error(ErrorKind::out_of_range, "block coordinate < 1 in " + box.to_string());
    }
    std::vector<Coord> corner(d);
    for (std::uint32_t c = 1; c <= period_.disks(); ++c) {
        __int128 acc = 0;
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
            int sign = 1;
            for (std::uint32_t i = 0; i < d; ++i) {
                if (mask & (1u << i)) {
                    corner[i] = box.lo[i] - 1;
                    sign = -sign;
                } else {
                    corner[i] = box.hi[i];
                }
            }
            acc += sign * prefix(corner, c);
        }
        if (acc < 0 || acc > static_cast<__int128>(std::numeric_limits<std::uint64_t>::max())) {
            throw Error(ErrorKind::budget_exceeded, "count exceeds 64-bit range");
        }
        out[c - 1] = static_cast<std::uint64_t>(acc);
    }
    return out;
}

std::uint64_t PeriodicCounter::response_time(const Box& box) const {
    const auto counts = counts_in_box(box);
    return *std::max_element(counts.begin(), counts.end());
}

// --- disc / disc+ sweep ----------------------------------------------------

namespace {

struct Best {
    std::int64_t value = std::numeric_limits<std::int64_t>::min();
    Box box;
    std::uint32_t color = 0;

    bool improves(std::int64_t v, const Box& b, std::uint32_t c) const {
        if (v != value) return v > value;
        return std::tie(b.lo, b.hi, c) < std::tie(box.lo, box.hi, color);
    }
    void offer(std::int64_t v, const Box& b, std::uint32_t c) {
        if (improves(v, b, c)) {
            value = v;
            box = b;
            color = c;
        }
    }
    void merge(const Best& other) {
        if (other.color != 0) offer(other.value, other.box, other.color);
    }
};

// Lexicographically first (a, b), a < b, with s[b] - s[a] == v (sign = +1) or
// s[a] - s[b] == v (sign = -1). `scratch` receives suffix extrema.
std::pair<std::size_t, std::size_t> first_pair(std::span<const std::int64_t> s, std::int64_t v, int sign,
                                               std::vector<std::int64_t>& scratch) {
    const std::size_t n = s.size();  // indices 0..n-1, n >= 2
    scratch.resize(n);
    // scratch[a] = best s[b] over b > a (max for sign +1, min for sign -1).
    scratch[n - 1] = s[n - 1];
    std::int64_t run = s[n - 1];
    for (std::size_t a = n - 1; a-- > 0;) {
        scratch[a] = run;
        run = sign > 0 ? std::max(run, s[a]) : std::min(run, s[a]);
    }
    for (std::size_t a = 0; a + 1 < n; ++a) {
        const std::int64_t gain = sign > 0 ? scratch[a] - s[a] : s[a] - scratch[a];
        if (gain != v) continue;
        const std::int64_t target = sign > 0 ? s[a] + v : s[a] - v;
        for (std::size_t b = a + 1; b < n; ++b) {
            if (s[b] == target) return {a, b};
        }
    }
    return {0, 0};  // unreachable when v is attained
}

struct ThreadState {
    Best plus;
    Best abs;
    std::vector<std::int64_t> color_plus;
    std::vector<std::int64_t> color_abs;
    std::vector<std::int64_t> sums;     // M rows of N+1 prefix values
    std::vector<std::int64_t> scratch;
};

template <bool Parallel>
DiscReport sweep(const coloring::LatinColoring& coloring, Coord N, bool positive_only, Budget budget) {
    const auto start = std::chrono::steady_clock::now();
    const GridEvaluator eval(coloring, N, budget);
    const std::uint32_t M = coloring.disks();
    const std::uint32_t d = coloring.dim();
    const std::uint64_t side = static_cast<std::uint64_t>(N + 1);
    const std::uint64_t inner = eval.stride_outer();

    // All ranges of one axis, lo ascending then hi ascending.
    std::vector<std::pair<Coord, Coord>> ranges;
    for (Coord lo = 1; lo <= N; ++lo) {
        for (Coord hi = lo; hi <= N; ++hi) ranges.emplace_back(lo, hi);
    }
    std::uint64_t tuples = 1;
    for (std::uint32_t i = 1; i < d; ++i) tuples = checked_mul(tuples, ranges.size(), "range tuple count");

    // Axis strides inside the (N+1)^(d-1) block, axis 2 most significant.
    std::vector<std::uint64_t> stride(d, 1);
    for (std::size_t i = 1; i < d; ++i) {
        std::uint64_t s = 1;
        for (std::size_t j = i + 1; j < d; ++j) s *= side;
        stride[i] = s;
    }

    ThreadState global;
    global.color_plus.assign(M, std::numeric_limits<std::int64_t>::min());
    global.color_abs.assign(M, std::numeric_limits<std::int64_t>::min());
    const auto n_tuples = static_cast<std::int64_t>(tuples);
    const std::uint32_t corner_count = 1u << (d - 1);

#pragma omp parallel if (Parallel)
    {
        ThreadState ts;
        ts.color_plus.assign(M, std::numeric_limits<std::int64_t>::min());
        ts.color_abs.assign(M, std::numeric_limits<std::int64_t>::min());
        ts.sums.assign(static_cast<std::size_t>(M) * side, 0);
        std::vector<std::uint64_t> corner_flat(corner_count);
        std::vector<int> corner_sign(corner_count);
        Box box{std::vector<Coord>(d), std::vector<Coord>(d)};

#pragma omp for schedule(dynamic, 16)
        for (std::int64_t t = 0; t < n_tuples; ++t) {
            // Decode the ranges of axes 2..d.
            std::uint64_t rest = static_cast<std::uint64_t>(t);
            std::int64_t rsize = 1;
            for (std::size_t i = d; i-- > 1;) {
                const auto& r = ranges[rest % ranges.size()];
                rest /= ranges.size();
                box.lo[i] = r.first;
                box.hi[i] = r.second;
                rsize *= r.second - r.first + 1;
            }
            for (std::uint32_t mask = 0; mask < corner_count; ++mask) {
                std::uint64_t flat = 0;
                int sign = 1;
                for (std::uint32_t i = 1; i < d; ++i) {
                    if (mask & (1u << (i - 1))) {
                        flat += static_cast<std::uint64_t>(box.lo[i] - 1) * stride[i];
                        sign = -sign;
                    } else {
                        flat += static_cast<std::uint64_t>(box.hi[i]) * stride[i];
                    }
                }
                corner_flat[mask] = flat;
                corner_sign[mask] = sign;
            }
            // sums[c][b] = M * |[1..b] x R on color c| - b * |R|
            for (std::uint64_t b = 0; b < side; ++b) {
                for (std::uint32_t c = 0; c < M; ++c) ts.sums[c * side + b] = -static_cast<std::int64_t>(b) * rsize;
                for (std::uint32_t mask = 0; mask < corner_count; ++mask) {
                    const std::uint64_t flat = b * inner + corner_flat[mask];
                    const std::int64_t sgn = corner_sign[mask] * static_cast<std::int64_t>(M);
                    for (std::uint32_t c = 0; c < M; ++c) {
                        ts.sums[c * side + b] += sgn * eval.prefix(flat, c + 1);
                    }
                }
            }
            for (std::uint32_t c = 0; c < M; ++c) {
                const std::span<const std::int64_t> s(ts.sums.data() + c * side, side);
                std::int64_t lo_min = s[0], lo_max = s[0];
                std::int64_t best_pos = std::numeric_limits<std::int64_t>::min();
                std::int64_t best_neg = std::numeric_limits<std::int64_t>::min();
                for (std::uint64_t b = 1; b < side; ++b) {
                    best_pos = std::max(best_pos, s[b] - lo_min);
                    best_neg = std::max(best_neg, lo_max - s[b]);
                    lo_min = std::min(lo_min, s[b]);
                    lo_max = std::max(lo_max, s[b]);
                }
                ts.color_plus[c] = std::max(ts.color_plus[c], best_pos);
                if (best_pos >= ts.plus.value) {
                    const auto [a, bb] = first_pair(s, best_pos, +1, ts.scratch);
                    box.lo[0] = static_cast<Coord>(a) + 1;
                    box.hi[0] = static_cast<Coord>(bb);
                    ts.plus.offer(best_pos, box, c + 1);
                }
                if (positive_only) continue;
                const std::int64_t best_abs = std::max(best_pos, best_neg);
                ts.color_abs[c] = std::max(ts.color_abs[c], best_abs);
                if (best_abs >= ts.abs.value) {
                    if (best_pos == best_abs) {
                        const auto [a, bb] = first_pair(s, best_abs, +1, ts.scratch);
                        box.lo[0] = static_cast<Coord>(a) + 1;
                        box.hi[0] = static_cast<Coord>(bb);
                        ts.abs.offer(best_abs, box, c + 1);
                    }
                    if (best_neg == best_abs) {
                        const auto [a, bb] = first_pair(s, best_abs, -1, ts.scratch);
                        box.lo[0] = static_cast<Coord>(a) + 1;
                        box.hi[0] = static_cast<Coord>(bb);
                        ts.abs.offer(best_abs, box, c + 1);
                    }
                }
            }
        }

#pragma omp critical
        {
            global.plus.merge(ts.plus);
            global.abs.merge(ts.abs);
            for (std::uint32_t c = 0; c < M; ++c) {
                global.color_plus[c] = std::max(global.color_plus[c], ts.color_plus[c]);
                global.color_abs[c] = std::max(global.color_abs[c], ts.color_abs[c]);
            }
        }
    }

    DiscReport report;
    report.M = M;
    report.d = d;
    report.N = N;
    report.disc_plus = {global.plus.value, M};
    report.disc_plus_witness = {global.plus.box, global.plus.color};
    if (!positive_only) {
        report.disc = ScaledValue{global.abs.value, M};
        report.disc_witness = Witness{global.abs.box, global.abs.color};
    }
    for (std::uint32_t c = 0; c < M; ++c) {
        report.per_color.push_back({c + 1, global.color_plus[c], positive_only ? 0 : global.color_abs[c]});
    }
    auto sum_zero = [&](const Box& b) {
        const auto counts = eval.counts_in_box(b);
        std::int64_t total = 0;
        for (auto cnt : counts) total += static_cast<std::int64_t>(M) * static_cast<std::int64_t>(cnt) -
                                         static_cast<std::int64_t>(b.cardinality());
        return total == 0;
    };
    report.sum_zero_ok = sum_zero(report.disc_plus_witness.box);
    if (report.disc_witness) report.sum_zero_ok = report.sum_zero_ok && sum_zero(report.disc_witness->box);
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace

bool DiscReport::sandwich_holds() const {
    if (!disc) return true;
    // disc/(M-1) <= disc+ <= disc, all with denominator M.
    if (disc_plus.num > disc->num) return false;
    if (M <= 1) return disc->num == 0;
    return disc->num <= static_cast<std::int64_t>(M - 1) * disc_plus.num;
}

DiscReport disc_report(const coloring::LatinColoring& coloring, Coord extent, bool positive_only, Budget budget) {
    return sweep<true>(coloring, extent, positive_only, budget);
}

DiscReport disc_report(const coloring::Scheme& scheme, Coord extent, bool positive_only, Budget budget) {
    return sweep<true>(scheme.coloring, extent, positive_only, budget);
}

DiscReport disc_report_serial(const coloring::LatinColoring& coloring, Coord extent, bool positive_only,
                              Budget budget) {
    return sweep<false>(coloring, extent, positive_only, budget);
}

}  // namespace decluster::discrepancy
