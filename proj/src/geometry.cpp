#include <algorithm>
#include <limits>
#include <tuple>

#include "decluster/discrepancy.hpp"
#include "decluster/error.hpp"

namespace decluster::discrepancy {

Box reduce_box_to_period(const Box& box, std::uint32_t M) {
    if (box.is_empty()) throw Error(ErrorKind::invalid_parameter, "cannot reduce an empty box");
    const Coord m = M;
    Box out{std::vector<Coord>(box.dim()), std::vector<Coord>(box.dim())};
    for (std::size_t i = 0; i < box.dim(); ++i) {
        if (box.lo[i] < 1) throw Error(ErrorKind::out_of_range, "box coordinate < 1");
        const Coord xr = (box.lo[i] - 1) % m + 1;
        const Coord yr = (box.hi[i] - 1) % m + 1;
        if (xr <= yr) {
            out.lo[i] = xr;
            out.hi[i] = yr;
        } else {
            out.lo[i] = yr + 1;
            out.hi[i] = xr - 1;
        }
    }
    if (out.is_empty()) return Box::empty(box.dim());
    return out;
}

std::uint32_t wrapped_axes(const Box& box, std::uint32_t M) {
    std::uint32_t n = 0;
    for (std::size_t i = 0; i < box.dim(); ++i) {
        if ((box.lo[i] - 1) % M > (box.hi[i] - 1) % M) ++n;
    }
    return n;
}

std::vector<Box> complement_decompose(const Box& box, Coord extent) {
    const std::size_t d = box.dim();
    if (!box.is_empty() && !box.inside(extent)) {
        throw Error(ErrorKind::out_of_range,
                    "box " + box.to_string() + " is not inside [1.." + std::to_string(extent) + "]^" + std::to_string(d));
    }
    std::vector<Box> out;
    if (box.is_empty()) {
        out.push_back(Box::cube(d, extent));
        return out;
    }
    Box base = Box::cube(d, extent);
    for (std::size_t i = 0; i < d; ++i) {
        if (box.lo[i] > 1) {
            Box lower = base;
            lower.lo[i] = 1;
            lower.hi[i] = box.lo[i] - 1;
            out.push_back(std::move(lower));
        }
        if (box.hi[i] < extent) {
            Box upper = base;
            upper.lo[i] = box.hi[i] + 1;
            upper.hi[i] = extent;
            out.push_back(std::move(upper));
        }
        base.lo[i] = box.lo[i];
        base.hi[i] = box.hi[i];
    }
    return out;
}

PointSet PointSet::from_net(const nets::DigitalNet& net) {
    const auto& p = net.params();
    PointSet ps;
    ps.d = p.d;
    const std::uint64_t scale = p.point_count();
    for (std::uint64_t k = 0; k < net.size(); ++k) {
        std::vector<Rational> pt;
        for (std::uint32_t j = 0; j < p.d; ++j) {
            pt.push_back(Rational::make(net.prefix(k, j, p.m), scale));
        }
        ps.points.push_back(std::move(pt));
    }
    return ps;
}

namespace {

// Per-axis cell floor(x * G) of every point.
std::vector<std::vector<Coord>> bin_points(const PointSet& points, Coord grid) {
    if (grid < 1) throw Error(ErrorKind::invalid_parameter, "grid resolution G must be a positive integer");
    std::vector<std::vector<Coord>> cells;
    cells.reserve(points.points.size());
    for (const auto& pt : points.points) {
        if (pt.size() != points.d) throw Error(ErrorKind::invalid_parameter, "point has wrong dimension");
        std::vector<Coord> cell(points.d);
        for (std::uint32_t j = 0; j < points.d; ++j) {
            const auto& x = pt[j];
            if (x.den <= 0 || x.num < 0 || x.num >= x.den) {
                throw Error(ErrorKind::invalid_parameter, "coordinate " + x.to_string() + " outside [0,1)");
            }
            cell[j] = static_cast<Coord>(static_cast<__int128>(x.num) * grid / x.den);
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace

std::uint64_t geometric_count(const PointSet& points, Coord grid, const Box& grid_box) {
    if (grid_box.is_empty()) return 0;
    std::uint64_t n = 0;
    for (const auto& cell : bin_points(points, grid)) {
        bool in = true;
        for (std::uint32_t j = 0; j < points.d && in; ++j) {
            // x in [(lo-1)/G, hi/G)  <=>  lo-1 <= floor(xG) < hi
            in = cell[j] >= grid_box.lo[j] - 1 && cell[j] < grid_box.hi[j];
        }
        n += in;
    }
    return n;
}

GeometricResult geometric_discrepancy(const PointSet& points, Coord grid) {
    const auto cells = bin_points(points, grid);
    const std::uint32_t d = points.d;
    const auto n = static_cast<std::int64_t>(points.points.size());
    const std::uint64_t side = static_cast<std::uint64_t>(grid + 1);
    std::uint64_t total = 1;
    for (std::uint32_t j = 0; j < d; ++j) {
        if (total > (std::uint64_t{1} << 32) / side) {
            throw Error(ErrorKind::budget_exceeded, "grid too fine for exhaustive geometric discrepancy");
        }
        total *= side;
    }
    // Prefix counts over (G+1)^d, axis 1 most significant.
    std::vector<std::int64_t> pre(total, 0);
    auto flat_of = [&](std::span<const Coord> c) {
        std::uint64_t f = 0;
        for (auto v : c) f = f * side + static_cast<std::uint64_t>(v);
        return f;
    };
    std::vector<Coord> shifted(d);
    for (const auto& cell : cells) {
        for (std::uint32_t j = 0; j < d; ++j) shifted[j] = cell[j] + 1;
        ++pre[flat_of(shifted)];
    }
    std::uint64_t stride = total / side;
    for (std::uint32_t axis = 0; axis < d; ++axis) {
        for (std::uint64_t f = 0; f < total; ++f) {
            if ((f / stride) % side != 0) pre[f] += pre[f - stride];
        }
        stride /= side;
    }

    // G^d * (count - n vol) = G^d count - n prod(len)
    __int128 gd = 1;
    for (std::uint32_t j = 0; j < d; ++j) gd *= grid;

    std::vector<std::pair<Coord, Coord>> ranges;
    for (Coord lo = 1; lo <= grid; ++lo) {
        for (Coord hi = lo; hi <= grid; ++hi) ranges.emplace_back(lo, hi);
    }
    __int128 best = -1;
    __int128 best_signed = 0;
    Box best_box;
    Box box{std::vector<Coord>(d), std::vector<Coord>(d)};
    std::vector<std::size_t> idx(d, 0);
    std::vector<Coord> corner(d);
    for (;;) {
        for (std::uint32_t j = 0; j < d; ++j) std::tie(box.lo[j], box.hi[j]) = ranges[idx[j]];
        std::int64_t count = 0;
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
            int sign = 1;
            for (std::uint32_t j = 0; j < d; ++j) {
                if (mask & (1u << j)) {
                    corner[j] = box.lo[j] - 1;
                    sign = -sign;
                } else {
                    corner[j] = box.hi[j];
                }
            }
            count += sign * pre[flat_of(corner)];
        }
        __int128 vol = 1;
        for (std::uint32_t j = 0; j < d; ++j) vol *= box.hi[j] - box.lo[j] + 1;
        const __int128 dev = gd * count - static_cast<__int128>(n) * vol;
        const __int128 mag = dev < 0 ? -dev : dev;
        if (mag > best || (mag == best && box < best_box)) {
            best = mag;
            best_signed = dev;
            best_box = box;
        }
        std::size_t j = d;
        while (j-- > 0) {
            if (++idx[j] < ranges.size()) break;
            idx[j] = 0;
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
    GeometricResult r;
    if (n == 0) {
        r.value = {0, 1};
        r.signed_value = {0, 1};
        r.witness = Box::cube(d, 1);
        return r;
    }
    r.value = Rational::make(best, gd);
    r.signed_value = Rational::make(best_signed, gd);
    r.witness = best_box;
    return r;
}

}  // namespace decluster::discrepancy
