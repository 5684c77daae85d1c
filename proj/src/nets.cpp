#include "decluster/nets.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "decluster/error.hpp"
#include "decluster/factorize.hpp"

namespace decluster::nets {

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / base) {
            throw Error(ErrorKind::invalid_parameter,
                        std::to_string(base) + "^" + std::to_string(exp) + " overflows 64 bits");
        }
        r *= base;
    }
    return r;
}

// Digits of points in one flat array: (k * d + j) * m + r.
std::size_t digit_slots(const NetParams& p) {
    const std::uint64_t n = p.point_count();
    const std::uint64_t slots = n * p.d * p.m;
    constexpr std::uint64_t limit = std::uint64_t{1} << 32;
    if (n > limit || slots > limit) {
        throw Error(ErrorKind::invalid_parameter, "net too large to materialize");
    }
    return static_cast<std::size_t>(slots);
}

void level_vectors_rec(std::uint32_t d, std::uint32_t s, std::vector<std::uint32_t>& cur,
                       std::vector<std::vector<std::uint32_t>>& out) {
    if (cur.size() + 1 == d) {
        cur.push_back(s);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::uint32_t v = 0; v <= s; ++v) {
        cur.push_back(v);
        level_vectors_rec(d, s - v, cur, out);
        cur.pop_back();
    }
}

ElementaryInterval decode_interval(std::uint32_t b, const std::vector<std::uint32_t>& levels,
                                   std::uint64_t bucket) {
    ElementaryInterval e{levels, std::vector<std::uint64_t>(levels.size(), 0)};
    for (std::size_t j = levels.size(); j-- > 0;) {
        const std::uint64_t radix = checked_pow(b, levels[j]);
        e.offsets[j] = bucket % radix;
        bucket /= radix;
    }
    return e;
}

struct LevelCheck {
    bool ok = true;
    std::uint64_t bucket = 0;
    std::uint64_t count = 0;
};

// Counts the points in every interval of one level shape; the bucket index
// puts a_1 in the most significant place, so bucket order is offset order.
LevelCheck check_levels(const DigitalNet& net, const std::vector<std::uint32_t>& levels,
                        const std::vector<std::uint64_t>& prefixes, std::uint32_t max_level,
                        std::uint64_t expected, std::vector<std::uint64_t>& counts) {
    const auto& p = net.params();
    std::vector<std::uint64_t> mult(p.d, 1);
    std::uint64_t buckets = 1;
    for (std::size_t j = p.d; j-- > 0;) {
        mult[j] = buckets;
        buckets *= checked_pow(p.b, levels[j]);
    }
    counts.assign(buckets, 0);
    const std::size_t stride = max_level + 1;
    for (std::uint64_t k = 0; k < net.size(); ++k) {
        const std::uint64_t* pk = prefixes.data() + k * p.d * stride;
        std::uint64_t bucket = 0;
        for (std::uint32_t j = 0; j < p.d; ++j) bucket += pk[j * stride + levels[j]] * mult[j];
        ++counts[bucket];
    }
    for (std::uint64_t bkt = 0; bkt < buckets; ++bkt) {
        if (counts[bkt] != expected) return {false, bkt, counts[bkt]};
    }
    return {};
}

template <bool Parallel>
NetVerification verify_impl(const DigitalNet& net, std::uint32_t t) {
    const auto& p = net.params();
    if (t > p.m) {
        throw Error(ErrorKind::invalid_parameter, "t must not exceed m");
    }
    const std::uint32_t s = p.m - t;
    const std::uint64_t expected = checked_pow(p.b, t);
    const auto shapes = level_vectors(p.d, s);

    // prefix[k][j][l] = integer value of the first l digits of coordinate j.
    const std::size_t stride = s + 1;
    std::vector<std::uint64_t> prefixes(net.size() * p.d * stride);
    for (std::uint64_t k = 0; k < net.size(); ++k) {
        for (std::uint32_t j = 0; j < p.d; ++j) {
            std::uint64_t* out = prefixes.data() + (k * p.d + j) * stride;
            std::uint64_t v = 0;
            out[0] = 0;
            for (std::uint32_t l = 1; l <= s; ++l) {
                v = v * p.b + net.digit(k, j, l - 1);
                out[l] = v;
            }
        }
    }

    const auto n_shapes = static_cast<std::int64_t>(shapes.size());
    std::int64_t first_bad = n_shapes;
    LevelCheck first_check;
    std::uint64_t checked = 0;

#pragma omp parallel if (Parallel)
    {
        std::vector<std::uint64_t> counts;
        std::int64_t local_bad = n_shapes;
        LevelCheck local_check;
        std::uint64_t local_checked = 0;
#pragma omp for schedule(dynamic)
        for (std::int64_t i = 0; i < n_shapes; ++i) {
            if (i > local_bad) continue;
            const auto r = check_levels(net, shapes[i], prefixes, s, expected, counts);
            local_checked += counts.size();
            if (!r.ok && i < local_bad) {
                local_bad = i;
                local_check = r;
            }
        }
#pragma omp critical
        {
            checked += local_checked;
            if (local_bad < first_bad) {
                first_bad = local_bad;
                first_check = local_check;
            }
        }
    }

    NetVerification report;
    report.intervals_checked = checked;
    if (first_bad < n_shapes) {
        report.passed = false;
        report.violation = decode_interval(p.b, shapes[first_bad], first_check.bucket);
        report.violation_count = first_check.count;
    }
    return report;
}

std::vector<std::uint32_t> binomials_mod(std::uint32_t n_max, std::uint32_t p) {
    // Row-major (n_max+1)^2 table of binom(n, k) mod p.
    const std::size_t w = n_max + 1;
    std::vector<std::uint32_t> t(w * w, 0);
    for (std::uint32_t n = 0; n <= n_max; ++n) {
        t[n * w] = 1 % p;
        for (std::uint32_t k = 1; k <= n; ++k) {
            t[n * w + k] = (t[(n - 1) * w + k - 1] + t[(n - 1) * w + k]) % p;
        }
    }
    return t;
}

}  // namespace

std::uint64_t NetParams::point_count() const { return checked_pow(b, m); }

void NetParams::validate() const {
    if (b < 2) throw Error(ErrorKind::invalid_parameter, "net base must be >= 2");
    if (d < 1) throw Error(ErrorKind::invalid_parameter, "net dimension must be >= 1");
    if (t > m) throw Error(ErrorKind::invalid_parameter, "net quality t must not exceed m");
    (void)point_count();
}

DigitalNet::DigitalNet(NetParams params, std::vector<Digit> digits, NetProvenance provenance)
    : params_(params), digits_(std::move(digits)), provenance_(std::move(provenance)) {
    params_.validate();
    size_ = params_.point_count();
    if (digits_.size() != digit_slots(params_)) {
        throw Error(ErrorKind::invalid_parameter, "digit array does not match b^m * d * m");
    }
    for (auto dg : digits_) {
        if (dg >= params_.b) {
            throw Error(ErrorKind::invalid_parameter, "digit " + std::to_string(dg) + " outside base");
        }
    }
}

std::uint64_t DigitalNet::prefix(std::uint64_t k, std::uint32_t j, std::uint32_t level) const {
    std::uint64_t v = 0;
    for (std::uint32_t r = 0; r < level; ++r) v = v * params_.b + (r < params_.m ? digit(k, j, r) : 0);
    return v;
}

std::string to_string(const ElementaryInterval& interval) {
    std::string s = "levels=(";
    for (std::size_t i = 0; i < interval.levels.size(); ++i) {
        s += (i ? "," : "") + std::to_string(interval.levels[i]);
    }
    s += ") offsets=(";
    for (std::size_t i = 0; i < interval.offsets.size(); ++i) {
        s += (i ? "," : "") + std::to_string(interval.offsets[i]);
    }
    return s + ")";
}

std::vector<std::vector<std::uint32_t>> level_vectors(std::uint32_t d, std::uint32_t s) {
    std::vector<std::vector<std::uint32_t>> out;
    if (d == 0) return out;
    std::vector<std::uint32_t> cur;
    level_vectors_rec(d, s, cur, out);
    return out;
}

std::vector<ElementaryInterval> enumerate_elementary_intervals(std::uint32_t b, std::uint32_t m,
                                                               std::uint32_t d, std::uint32_t s) {
    if (s > static_cast<std::uint64_t>(m) * d) {
        throw Error(ErrorKind::invalid_parameter, "level sum exceeds m*d");
    }
    std::vector<ElementaryInterval> out;
    const std::uint64_t per_shape = checked_pow(b, s);
    for (const auto& levels : level_vectors(d, s)) {
        if (std::any_of(levels.begin(), levels.end(), [m](auto l) { return l > m; })) continue;
        for (std::uint64_t bucket = 0; bucket < per_shape; ++bucket) {
            out.push_back(decode_interval(b, levels, bucket));
        }
    }
    return out;
}

NetVerification verify_net(const DigitalNet& net, std::uint32_t t) { return verify_impl<true>(net, t); }

NetVerification verify_net_serial(const DigitalNet& net, std::uint32_t t) {
    return verify_impl<false>(net, t);
}

GeneratorSet pascal_power_generators(std::uint64_t q, std::uint32_t d, std::uint32_t m) {
    GeneratorSet g{gf::Field(q), m, d, {}};
    if (d < 1) throw Error(ErrorKind::invalid_parameter, "dimension must be >= 1");
    if (d > q + 1) {
        throw Error(ErrorKind::dimension_unsupported,
                    "d=" + std::to_string(d) + " > q+1=" + std::to_string(q + 1) + " for GF(" +
                        std::to_string(q) + ")");
    }
    const auto& f = g.field;
    const auto binom = binomials_mod(m, f.characteristic());
    const std::size_t w = m + 1;
    const std::uint32_t pascal_count = std::min<std::uint64_t>(d, q);
    for (std::uint32_t j = 0; j < pascal_count; ++j) {
        const std::uint32_t alpha = j;  // alpha_1 = 0, then index order
        std::vector<std::uint32_t> mat(static_cast<std::size_t>(m) * m, 0);
        for (std::uint32_t c = 0; c < m; ++c) {
            for (std::uint32_t r = 0; r <= c; ++r) {
                const std::uint32_t coeff = binom[c * w + r];  // prime-subfield element
                mat[r * m + c] = f.mul(coeff, f.pow(alpha, c - r));
            }
        }
        g.matrices.push_back(std::move(mat));
    }
    if (d == q + 1) {
        std::vector<std::uint32_t> mat(static_cast<std::size_t>(m) * m, 0);
        for (std::uint32_t r = 0; r < m; ++r) mat[r * m + (m - 1 - r)] = 1;
        g.matrices.push_back(std::move(mat));
    }
    return g;
}

DigitalNet net_from_generators(const GeneratorSet& generators) {
    const auto& f = generators.field;
    const std::uint32_t q = f.order();
    const std::uint32_t m = generators.m;
    const std::uint32_t d = generators.d;
    if (generators.matrices.size() != d) {
        throw Error(ErrorKind::invalid_parameter, "generator set must hold d matrices");
    }
    for (const auto& mat : generators.matrices) {
        if (mat.size() != static_cast<std::size_t>(m) * m) {
            throw Error(ErrorKind::invalid_parameter, "generator matrix is not m x m");
        }
    }
    NetParams params{q, m, d, 0};
    std::vector<Digit> digits(digit_slots(params));
    const std::uint64_t n = params.point_count();
    std::vector<std::uint32_t> in(m);
    for (std::uint64_t k = 0; k < n; ++k) {
        std::uint64_t rest = k;
        for (std::uint32_t c = 0; c < m; ++c) {
            in[c] = static_cast<std::uint32_t>(rest % q);
            rest /= q;
        }
        for (std::uint32_t j = 0; j < d; ++j) {
            Digit* out = digits.data() + (k * d + j) * m;
            for (std::uint32_t r = 0; r < m; ++r) {
                std::uint32_t acc = 0;
                for (std::uint32_t c = 0; c < m; ++c) {
                    acc = f.add(acc, f.mul(generators.entry(j, r, c), in[c]));
                }
                out[r] = acc;
            }
        }
    }
    NetProvenance prov;
    prov.base = q;
    prov.p = f.characteristic();
    prov.e = f.degree();
    prov.modulus = f.modulus();
    prov.matrices = generators.matrices;
    DigitalNet net(params, std::move(digits), std::move(prov));
    const auto report = verify_net(net, 0);
    if (!report.passed) {
        throw Error(ErrorKind::construction_invalid,
                    "generated net fails the (0," + std::to_string(m) + "," + std::to_string(d) +
                        ") property in base " + std::to_string(q) + " at " +
                        to_string(*report.violation));
    }
    return net;
}

std::uint64_t crt_combine(std::span<const std::uint64_t> residues,
                          std::span<const std::uint64_t> moduli) {
    if (residues.size() != moduli.size() || moduli.empty()) {
        throw Error(ErrorKind::invalid_parameter, "residue/modulus count mismatch");
    }
    std::uint64_t x = 0;
    std::uint64_t mod = 1;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        const std::uint64_t q = moduli[i];
        if (std::gcd(mod, q) != 1) {
            throw Error(ErrorKind::invalid_parameter, "CRT moduli are not pairwise coprime");
        }
        // Find x' = x + mod * t with x' = r_i (mod q); brute force over t < q.
        const std::uint64_t r = residues[i] % q;
        std::uint64_t t = 0;
        while ((x + mod * t) % q != r) ++t;
        x += mod * t;
        mod *= q;
    }
    return x;
}

DigitalNet crt_compose(std::span<const DigitalNet> components, std::uint32_t b) {
    if (components.empty()) throw Error(ErrorKind::invalid_parameter, "no components to compose");
    const auto m = components.front().params().m;
    const auto d = components.front().params().d;
    std::vector<std::uint64_t> moduli;
    std::uint64_t product = 1;
    for (const auto& c : components) {
        if (c.params().m != m || c.params().d != d) {
            throw Error(ErrorKind::incompatible_parameters, "CRT components must share m and d");
        }
        const std::uint64_t q = c.params().b;
        for (auto prev : moduli) {
            if (std::gcd(prev, q) != 1) {
                throw Error(ErrorKind::incompatible_parameters,
                            "CRT component bases " + std::to_string(prev) + " and " +
                                std::to_string(q) + " are not coprime");
            }
        }
        moduli.push_back(q);
        product *= q;
    }
    if (product != b) {
        throw Error(ErrorKind::incompatible_parameters,
                    "component bases multiply to " + std::to_string(product) + ", not " + std::to_string(b));
    }
    if (components.size() == 1) return components.front();

    const std::size_t u = components.size();
    // Mixed-radix residue tuple -> value in Z_b.
    std::vector<std::uint32_t> combine(b);
    for (std::uint64_t v = 0; v < b; ++v) {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < u; ++i) key = key * moduli[i] + v % moduli[i];
        combine[key] = static_cast<std::uint32_t>(v);
    }
    NetParams params{b, m, d, 0};
    std::vector<Digit> digits(digit_slots(params));
    const std::uint64_t n = params.point_count();
    std::vector<std::uint64_t> comp_index(u);
    for (std::uint64_t k = 0; k < n; ++k) {
        std::fill(comp_index.begin(), comp_index.end(), 0);
        std::vector<std::uint64_t> scale(u, 1);
        std::uint64_t rest = k;
        for (std::uint32_t r = 0; r < m; ++r) {
            const std::uint64_t digit = rest % b;
            rest /= b;
            for (std::size_t i = 0; i < u; ++i) {
                comp_index[i] += (digit % moduli[i]) * scale[i];
                scale[i] *= moduli[i];
            }
        }
        for (std::uint32_t j = 0; j < d; ++j) {
            for (std::uint32_t r = 0; r < m; ++r) {
                std::uint64_t key = 0;
                for (std::size_t i = 0; i < u; ++i) {
                    key = key * moduli[i] + components[i].digit(comp_index[i], j, r);
                }
                digits[(k * d + j) * m + r] = combine[key];
            }
        }
    }
    NetProvenance prov;
    prov.base = b;
    for (const auto& c : components) prov.components.push_back(c.provenance());
    DigitalNet net(params, std::move(digits), std::move(prov));
    const auto report = verify_net(net, 0);
    if (!report.passed) {
        throw Error(ErrorKind::construction_invalid,
                    "CRT-composed net fails the (0," + std::to_string(m) + "," + std::to_string(d) +
                        ") property in base " + std::to_string(b) + " at " + to_string(*report.violation));
    }
    return net;
}

DigitalNet build_net(std::uint32_t b, std::uint32_t m, std::uint32_t d) {
    const auto fact = schemegen::factorize_canonical(b);
    if (d > fact.q1() + 1) {
        throw Error(ErrorKind::dimension_unsupported,
                    "d=" + std::to_string(d) + " > q1+1=" + std::to_string(fact.q1() + 1) +
                        " for b=" + std::to_string(b) + " (b = " + fact.to_string() + ")");
    }
    std::vector<DigitalNet> parts;
    for (const auto& f : fact.factors) {
        parts.push_back(net_from_generators(pascal_power_generators(f.q, d, m)));
    }
    if (parts.size() == 1) return std::move(parts.front());
    return crt_compose(parts, b);
}

}  // namespace decluster::nets
