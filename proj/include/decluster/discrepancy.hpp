#pragma once

// Exact multi-color discrepancy of declustering schemes over range queries.
//
// All deviations are carried as integers scaled by M: for a box B and color i
// the scaled deviation is M * |B on disk i| - |B|, so disc and disc+ are exact
// multiples of 1/M and no floating point enters any verdict.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decluster/coloring.hpp"

namespace decluster::discrepancy {

using coloring::Coord;

/// Integer box prod [lo_i..hi_i], 1-based and inclusive.
struct Box {
    std::vector<Coord> lo;
    std::vector<Coord> hi;

    static Box empty(std::size_t d);
    static Box cube(std::size_t d, Coord extent);  // [1..extent]^d

    std::size_t dim() const noexcept { return lo.size(); }
    bool is_empty() const noexcept;
    std::uint64_t cardinality() const;
    bool inside(Coord extent) const noexcept;  // within [1..extent]^d (empty boxes count as inside)
    std::string to_string() const;             // "[1..4]x[2..3]"

    friend auto operator<=>(const Box&, const Box&) = default;
};

/// Parses "l1:h1,l2:h2,...".
Box parse_box(const std::string& text);

struct ScaledValue {
    std::int64_t num = 0;
    std::int64_t den = 1;

    std::string to_string() const;  // reduced fraction, e.g. "1/2" or "2"
    friend bool operator==(const ScaledValue&, const ScaledValue&) = default;
};

/// Exact rational, always reduced with a positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(__int128 num, __int128 den);
    std::string to_string() const;
    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 l = static_cast<__int128>(a.num) * b.den;
        const __int128 r = static_cast<__int128>(b.num) * a.den;
        return l < r ? std::strong_ordering::less
                     : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
};

/// Upper bound on N^d * M for materialized evaluation; DECLUSTER_MAX_CELLS
/// overrides the default of 10^8.
struct Budget {
    std::uint64_t max_cells = 100'000'000;
    static Budget from_env();
};

/// Per-color prefix-sum table over [N]^d for a tiled scheme. Immutable after
/// construction; queries are 2^d-term inclusion-exclusion.
class GridEvaluator {
public:
    GridEvaluator(const coloring::LatinColoring& coloring, Coord extent, Budget budget = Budget::from_env());

    std::uint32_t disks() const noexcept { return M_; }
    std::uint32_t dim() const noexcept { return d_; }
    Coord extent() const noexcept { return N_; }

    std::uint64_t count_in_box(const Box& box, std::uint32_t color) const;
    std::vector<std::uint64_t> counts_in_box(const Box& box) const;
    std::uint64_t response_time(const Box& box) const;
    /// M * count - |B| for one color.
    std::int64_t scaled_deviation(const Box& box, std::uint32_t color) const;

    /// Prefix count over [1..x_1] x ... (x_i in [0..N]), raw table access.
    std::uint32_t prefix(std::uint64_t flat, std::uint32_t color) const noexcept {
        return table_[flat * M_ + (color - 1)];
    }
    std::uint64_t stride_outer() const noexcept { return inner_; }  // (N+1)^(d-1)
    std::uint64_t flat_index(std::span<const Coord> corner) const noexcept;

private:
    void check_box(const Box& box) const;

    std::uint32_t M_ = 1;
    std::uint32_t d_ = 1;
    Coord N_ = 0;
    std::uint64_t inner_ = 1;
    std::vector<std::uint32_t> table_;
};

/// Counts on the unbounded tiled grid from one [M]^d period; used when no
/// extent is given. Agrees with GridEvaluator inside [N]^d.
class PeriodicCounter {
public:
    explicit PeriodicCounter(const coloring::LatinColoring& coloring, Budget budget = Budget::from_env());

    std::vector<std::uint64_t> counts_in_box(const Box& box) const;
    std::uint64_t response_time(const Box& box) const;

private:
    __int128 prefix(std::span<const Coord> corner, std::uint32_t color) const;

    GridEvaluator period_;
};

std::uint64_t count_in_box(const coloring::Scheme& scheme, Coord extent, const Box& box, std::uint32_t color,
                           Budget budget = Budget::from_env());
std::uint64_t response_time(const coloring::Scheme& scheme, Coord extent, const Box& box,
                            Budget budget = Budget::from_env());

struct Witness {
    Box box;
    std::uint32_t color = 0;
};

struct ColorMaxima {
    std::uint32_t color = 0;
    std::int64_t plus_num = 0;  // max of M*count - |B|
    std::int64_t abs_num = 0;   // max of |M*count - |B||, absent in positive-only runs
};

struct DiscReport {
    std::uint32_t M = 1;
    std::uint32_t d = 1;
    Coord N = 0;
    std::optional<ScaledValue> disc;  // absent in positive-only runs
    ScaledValue disc_plus;
    std::optional<Witness> disc_witness;
    Witness disc_plus_witness;
    std::vector<ColorMaxima> per_color;
    bool sum_zero_ok = true;  // sum over colors of the witnesses' deviations is 0
    double elapsed_ms = 0.0;

    /// disc/(M-1) <= disc+ <= disc; vacuous when disc is absent.
    bool sandwich_holds() const;
};

/// Exhaustive disc and disc+ over every box of [N]^d. Ranges of axes 2..d are
/// enumerated (in parallel) and each is closed by a maximum-subarray sweep
/// along axis 1. Witnesses are the lexicographically smallest (lo, hi, color)
/// attaining each maximum, independent of scheduling.
DiscReport disc_report(const coloring::Scheme& scheme, Coord extent, bool positive_only = false,
                       Budget budget = Budget::from_env());
DiscReport disc_report(const coloring::LatinColoring& coloring, Coord extent, bool positive_only = false,
                       Budget budget = Budget::from_env());
/// Single-threaded reference of the same sweep.
DiscReport disc_report_serial(const coloring::LatinColoring& coloring, Coord extent,
                              bool positive_only = false, Budget budget = Budget::from_env());

/// Folds a box of the tiled [N]^d grid into [M]^d: per axis take the
/// representatives of lo and hi mod M and, when they wrap, the complementary
/// segment between them. Absolute deviations are preserved for latin colorings.
Box reduce_box_to_period(const Box& box, std::uint32_t M);
/// Number of axes on which reduce_box_to_period took the complementary segment.
std::uint32_t wrapped_axes(const Box& box, std::uint32_t M);

/// Points with exact rational coordinates in [0,1)^d.
struct PointSet {
    std::uint32_t d = 1;
    std::vector<std::vector<Rational>> points;

    static PointSet from_net(const nets::DigitalNet& net);
};

struct GeometricResult {
    Rational value;        // max | |P cap R| - n vol(R) |
    Rational signed_value; // deviation of the witness box
    Box witness;           // grid cells [lo..hi] <-> real box prod [(lo-1)/G, hi/G)
};

/// Discrepancy over half-open boxes whose corners are multiples of 1/G.
GeometricResult geometric_discrepancy(const PointSet& points, Coord grid);
/// |P cap R| for the real box associated with a grid box.
std::uint64_t geometric_count(const PointSet& points, Coord grid, const Box& grid_box);

/// Disjoint boxes covering [L]^d minus B, peeled axis by axis (at most 2d).
std::vector<Box> complement_decompose(const Box& box, Coord extent);

struct WitnessCertificate {
    std::uint32_t M = 1;
    std::uint32_t d = 1;
    Coord subgrid = 0;              // sM
    ScaledValue s;                  // subgrid / M
    std::uint32_t color = 0;        // color whose class seeds the point set
    std::uint64_t points = 0;       // class size inside [sM]^d
    Box geometric_box;              // max-deviation box of the scaled point set
    Rational geometric_deviation;   // signed |P cap R| - n vol(R)
    ScaledValue grid_deviation;     // signed deviation of the same box in the coloring
    bool used_complement = false;
    Box chain_box;                  // positive box produced by the scaling chain (empty if none)
    std::uint32_t chain_color = 0;
    ScaledValue chain_value;        // its deviation, 0 when the chain found nothing positive
    bool refined = false;           // exhaustive subgrid search beat the chain
    Box box;                        // certificate box
    std::uint32_t box_color = 0;
    ScaledValue value;              // positive deviation of (box, box_color)
};

/// Smallest s in [M^-(d-2)/(d-1), 2 M^-(d-2)/(d-1)] that is a multiple of
/// 1/M, returned as sM; 1 * M for d = 2.
Coord subgrid_extent(std::uint32_t M, std::uint32_t d);

/// Lower-bound certificate: a concrete box and color with positive deviation.
WitnessCertificate witness_pipeline(const coloring::LatinColoring& coloring);

}  // namespace decluster::discrepancy
