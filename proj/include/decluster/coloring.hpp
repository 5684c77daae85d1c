#pragma once

// Latin-hypercube M-colorings of [M]^d in anchor form, and their periodic
// extension to arbitrary grids.
//
// A coloring stores only color class 1: for every line u = (x_2..x_d) the
// axis-1 coordinate anchor(u) of its unique color-1 cell. Every other class is
// a cyclic shift of class 1 along axis 1:
//
//     color(x_1, u) = ((x_1 - anchor(u)) mod M) + 1.
//
// Coordinates are 1-based throughout.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decluster/nets.hpp"

namespace decluster::coloring {

using Coord = std::int64_t;

class LatinColoring {
public:
    LatinColoring() = default;
    /// `anchor` has M^(d-1) entries in [1..M], indexed lexicographically by
    /// (x_2..x_d) with x_2 most significant. Only ranges are checked here;
    /// use verify_latin for the row property.
    LatinColoring(std::uint32_t M, std::uint32_t d, std::vector<std::uint32_t> anchor);

    std::uint32_t disks() const noexcept { return M_; }
    std::uint32_t dim() const noexcept { return d_; }
    std::uint64_t line_count() const noexcept { return anchor_.size(); }
    const std::vector<std::uint32_t>& anchor() const noexcept { return anchor_; }

    /// Index of the line (x_2..x_d); coordinates in [1..M].
    std::uint64_t line_index(std::span<const Coord> rest) const;
    std::uint32_t anchor_at(std::span<const Coord> rest) const { return anchor_[line_index(rest)]; }

    /// Color of a cell of [M]^d; throws out_of_range.
    std::uint32_t color_of(std::span<const Coord> cell) const;

    /// Hot-path variant: zero-based x_1 and precomputed line index.
    std::uint32_t color_fast(std::uint32_t x1_zero, std::uint64_t line) const noexcept {
        const std::uint32_t a = anchor_[line] - 1;
        return (x1_zero + M_ - a) % M_ + 1;
    }

    friend bool operator==(const LatinColoring&, const LatinColoring&) = default;

private:
    std::uint32_t M_ = 1;
    std::uint32_t d_ = 1;
    std::vector<std::uint32_t> anchor_;
};

enum class Mode { paper, smallbase, cyclic, random, checkerboard };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// Construction inputs sufficient to regenerate a scheme.
struct SchemeProvenance {
    Mode requested_mode = Mode::cyclic;
    std::uint32_t base = 0;  // net base (paper/smallbase)
    std::uint32_t m = 0;     // net depth
    std::uint32_t k = 0;     // digits per cell coordinate, base^k = M
    std::optional<std::uint64_t> seed;
    std::vector<std::uint32_t> skews;
    std::optional<nets::NetProvenance> net;

    friend bool operator==(const SchemeProvenance&, const SchemeProvenance&) = default;
};

struct Scheme {
    LatinColoring coloring;
    Mode mode = Mode::cyclic;
    SchemeProvenance provenance;
    std::vector<std::string> warnings;

    std::uint32_t disks() const noexcept { return coloring.disks(); }
    std::uint32_t dim() const noexcept { return coloring.dim(); }
};

/// Coloring whose class 1 is the set of cells hit by the net's points; the
/// remaining classes are its axis-1 shifts. Needs b^k = M with m = k(d-1).
LatinColoring coloring_from_net(const nets::DigitalNet& net, std::uint32_t M);

/// Disk of a block of the unbounded grid; coordinates >= 1, reduced mod M.
std::uint32_t disk_of(const Scheme& scheme, std::span<const Coord> block);
std::uint32_t disk_of(const LatinColoring& coloring, std::span<const Coord> block);

enum class BaselineKind { checkerboard, cyclic, random };

struct BaselineParams {
    std::vector<std::uint32_t> skews;  // cyclic; empty means all ones
    std::uint64_t seed = 0;            // random
};

Scheme make_baseline(BaselineKind kind, std::uint32_t M, std::uint32_t d,
                     const BaselineParams& params = {});

/// Applies a random rotation along axis 1 and independent uniform
/// permutations of the coordinate values of axes 2..d. Deterministic per seed
/// on every platform.
LatinColoring randomize(const LatinColoring& base, std::uint64_t seed);

struct LatinReport {
    bool passed = true;
    std::uint32_t axis = 0;            // 1-based axis of the violating row
    std::vector<Coord> cell;           // the row's fixed coordinates; cell[axis-1] = 0
    std::vector<std::uint32_t> colors; // colors along that row
    std::uint64_t rows_checked = 0;

    std::string describe() const;
};

/// Walks every row in every axis direction and checks it carries all M colors.
LatinReport verify_latin(const LatinColoring& coloring);

}  // namespace decluster::coloring
