#include "decluster/schemegen.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "decluster/error.hpp"

namespace decluster::schemegen {

using nlohmann::json;

namespace {

Error condition_error(const std::string& msg) { return Error(ErrorKind::incompatible_parameters, msg); }

std::string degenerate_warning() {
    return "degenerate construction: m = d-1 = 1, so the net is a permutation and the "
           "identity-type point set has error growing linearly in M";
}

coloring::LatinColoring coloring_for_net_mode(std::uint32_t M, std::uint32_t d, Mode mode,
                                              coloring::SchemeProvenance& prov) {
    const auto net = scheme_net(M, d, mode);
    prov.base = net.params().b;
    prov.m = net.params().m;
    prov.k = 0;
    for (std::uint64_t pw = 1; pw < M; pw *= prov.base) ++prov.k;
    prov.net = net.provenance();
    return coloring::coloring_from_net(net, M);
}

}  // namespace

nets::DigitalNet scheme_net(std::uint32_t M, std::uint32_t d, Mode mode) {
    const auto fact = factorize_canonical(M);
    if (mode == Mode::paper) {
        if (d > fact.q1() + 1) {
            throw condition_error("paper mode needs d <= q1+1: d=" + std::to_string(d) + " > q1+1=" +
                                  std::to_string(fact.q1() + 1) + " for M=" + std::to_string(M) +
                                  " (M = " + fact.to_string() + ")");
        }
        return nets::build_net(M, d - 1, d);
    }
    if (mode == Mode::smallbase) {
        if (fact.factors.size() != 1) {
            throw condition_error("smallbase mode needs M = p^k for a prime p: M=" + std::to_string(M) + " = " +
                                  fact.to_string());
        }
        const auto& f = fact.factors.front();
        if (d > f.p + 1) {
            throw condition_error("smallbase mode needs d <= p+1: d=" + std::to_string(d) + " > p+1=" +
                                  std::to_string(f.p + 1) + " for M=" + std::to_string(M) + " = " +
                                  std::to_string(f.p) + "^" + std::to_string(f.k));
        }
        const auto m = f.k * (d - 1);
        return nets::net_from_generators(nets::pascal_power_generators(f.p, d, m));
    }
    throw Error(ErrorKind::invalid_parameter, "mode " + coloring::to_string(mode) + " is not net-based");
}

Scheme generate_scheme(std::uint32_t M, std::uint32_t d, Mode mode, const GenerateOptions& options) {
    if (M < 1) throw Error(ErrorKind::invalid_parameter, "disk count M must be >= 1");
    if (d < 1) throw Error(ErrorKind::invalid_parameter, "dimension d must be >= 1");

    Scheme scheme;
    if (M == 1) {
        std::uint64_t lines = 1;  // 1^(d-1)
        scheme.coloring = coloring::LatinColoring(1, d, std::vector<std::uint32_t>(lines, 1));
        scheme.mode = mode;
        scheme.provenance.requested_mode = mode;
        if (mode == Mode::random) scheme.provenance.seed = options.seed.value_or(0);
        scheme.warnings.push_back("M=1: trivial scheme, every deviation is 0");
        return scheme;
    }

    switch (mode) {
        case Mode::paper:
        case Mode::smallbase:
            if (M == 2) {
                scheme = coloring::make_baseline(coloring::BaselineKind::checkerboard, 2, d);
                scheme.provenance.requested_mode = mode;
                scheme.warnings.push_back("M=2 routed to the checkerboard coloring");
                break;
            }
            scheme.mode = mode;
            scheme.provenance.requested_mode = mode;
            scheme.coloring = coloring_for_net_mode(M, d, mode, scheme.provenance);
            if (mode == Mode::paper && d == 2) scheme.warnings.push_back(degenerate_warning());
            break;
        case Mode::cyclic:
            scheme = coloring::make_baseline(coloring::BaselineKind::cyclic, M, d, {options.skews, 0});
            break;
        case Mode::random:
            scheme = coloring::make_baseline(coloring::BaselineKind::random, M, d, {{}, options.seed.value_or(0)});
            break;
        case Mode::checkerboard:
            if (M != 2) {
                throw condition_error("checkerboard needs M=2, got M=" + std::to_string(M));
            }
            scheme = coloring::make_baseline(coloring::BaselineKind::checkerboard, M, d);
            break;
    }
    const auto latin = coloring::verify_latin(scheme.coloring);
    if (!latin.passed) {
        throw Error(ErrorKind::invariant_violation, "generated scheme is not latin: " + latin.describe());
    }
    return scheme;
}

// --- JSON ------------------------------------------------------------------

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json provenance_to_json(const nets::NetProvenance& prov) {
    json j;
    j["base"] = prov.base;
    if (!prov.components.empty()) {
        j["components"] = json::array();
        for (const auto& c : prov.components) j["components"].push_back(provenance_to_json(c));
        return j;
    }
    j["field"] = {{"p", prov.p}, {"e", prov.e}, {"modulus", prov.modulus.value_or(gf::Poly{})}};
    j["matrices"] = json::array();
    const std::size_t m = prov.matrices.empty() ? 0 : static_cast<std::size_t>(std::llround(
                                                          std::sqrt(static_cast<double>(prov.matrices.front().size()))));
    for (const auto& mat : prov.matrices) {
        json grid = json::array();
        for (std::size_t r = 0; r < m; ++r) {
            grid.push_back(std::vector<std::uint32_t>(mat.begin() + r * m, mat.begin() + (r + 1) * m));
        }
        j["matrices"].push_back(grid);
    }
    return j;
}

nets::NetProvenance provenance_from_json(const json& j) {
    nets::NetProvenance prov;
    prov.base = j.at("base").get<std::uint32_t>();
    if (j.contains("components")) {
        for (const auto& c : j.at("components")) prov.components.push_back(provenance_from_json(c));
        return prov;
    }
    const auto& f = j.at("field");
    prov.p = f.at("p").get<std::uint32_t>();
    prov.e = f.at("e").get<std::uint32_t>();
    prov.modulus = f.at("modulus").get<gf::Poly>();
    for (const auto& grid : j.at("matrices")) {
        std::vector<std::uint32_t> flat;
        for (const auto& row : grid) {
            for (const auto& v : row) flat.push_back(v.get<std::uint32_t>());
        }
        prov.matrices.push_back(std::move(flat));
    }
    return prov;
}

json net_to_json(const nets::DigitalNet& net) {
    const auto& p = net.params();
    json j;
    j["b"] = p.b;
    j["m"] = p.m;
    j["d"] = p.d;
    j["t"] = p.t;
    json points = json::array();
    for (std::uint64_t k = 0; k < net.size(); ++k) {
        json pt = json::array();
        for (std::uint32_t c = 0; c < p.d; ++c) {
            const auto digits = net.coordinate(k, c);
            pt.push_back(std::vector<std::uint32_t>(digits.begin(), digits.end()));
        }
        points.push_back(std::move(pt));
    }
    j["points"] = std::move(points);
    j["provenance"] = provenance_to_json(net.provenance());
    return j;
}

json scheme_to_json(const Scheme& scheme) {
    json j;
    j["version"] = scheme_format_version;
    j["M"] = scheme.disks();
    j["d"] = scheme.dim();
    j["mode"] = coloring::to_string(scheme.mode);
    j["anchor"] = scheme.coloring.anchor();
    const auto& p = scheme.provenance;
    json prov;
    prov["requested_mode"] = coloring::to_string(p.requested_mode);
    if (p.net) {
        prov["base"] = p.base;
        prov["m"] = p.m;
        prov["k"] = p.k;
        prov["net"] = provenance_to_json(*p.net);
    }
    if (p.seed) prov["seed"] = *p.seed;
    if (!p.skews.empty()) prov["skews"] = p.skews;
    prov["warnings"] = scheme.warnings;
    j["provenance"] = std::move(prov);
    return j;
}

Scheme scheme_from_json(const json& j) {
    Scheme scheme;
    try {
        if (!j.is_object()) throw Error(ErrorKind::parse_error, "scheme file is not a JSON object");
        const auto version = j.at("version").get<int>();
        if (version != scheme_format_version) {
            throw Error(ErrorKind::unsupported_version,
                        "scheme format version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(scheme_format_version) + ")");
        }
        const auto M = j.at("M").get<std::uint32_t>();
        const auto d = j.at("d").get<std::uint32_t>();
        scheme.mode = coloring::parse_mode(j.at("mode").get<std::string>());
        auto anchor = j.at("anchor").get<std::vector<std::uint32_t>>();
        try {
            scheme.coloring = coloring::LatinColoring(M, d, std::move(anchor));
        } catch (const Error& e) {
            throw Error(ErrorKind::invariant_violation, std::string("invalid anchor map: ") + e.what());
        }
        const auto& prov = j.at("provenance");
        auto& p = scheme.provenance;
        p.requested_mode = coloring::parse_mode(prov.at("requested_mode").get<std::string>());
        if (prov.contains("net")) {
            p.base = prov.at("base").get<std::uint32_t>();
            p.m = prov.at("m").get<std::uint32_t>();
            p.k = prov.at("k").get<std::uint32_t>();
            p.net = provenance_from_json(prov.at("net"));
        }
        if (prov.contains("seed")) p.seed = prov.at("seed").get<std::uint64_t>();
        if (prov.contains("skews")) p.skews = prov.at("skews").get<std::vector<std::uint32_t>>();
        if (prov.contains("warnings")) scheme.warnings = prov.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse_error, std::string("malformed scheme file: ") + e.what());
    }
    const auto latin = coloring::verify_latin(scheme.coloring);
    if (!latin.passed) {
        throw Error(ErrorKind::invariant_violation, "scheme anchor is not latin: " + latin.describe());
    }
    return scheme;
}

void write_scheme(const Scheme& scheme, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::invalid_parameter, "cannot write " + path);
    out << dump(scheme_to_json(scheme));
}

Scheme read_scheme(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::invalid_parameter, "cannot read " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse_error, path + ": " + e.what());
    }
    return scheme_from_json(j);
}

json report_to_json(const discrepancy::DiscReport& report) {
    auto witness_json = [](const discrepancy::Witness& w) {
        return json{{"lo", w.box.lo}, {"hi", w.box.hi}, {"color", w.color}};
    };
    json j;
    j["M"] = report.M;
    j["d"] = report.d;
    j["N"] = report.N;
    j["denominator"] = report.M;
    j["disc_num"] = report.disc ? json(report.disc->num) : json(nullptr);
    j["disc_plus_num"] = report.disc_plus.num;
    j["witness"] = witness_json(report.disc_plus_witness);
    if (report.disc_witness) j["disc_witness"] = witness_json(*report.disc_witness);
    json per = json::array();
    for (const auto& c : report.per_color) {
        json e{{"color", c.color}, {"plus_num", c.plus_num}};
        if (report.disc) e["abs_num"] = c.abs_num;
        per.push_back(std::move(e));
    }
    j["per_color"] = std::move(per);
    j["sum_zero_ok"] = report.sum_zero_ok;
    j["sandwich_ok"] = report.sandwich_holds();
    j["elapsed_ms"] = report.elapsed_ms;
    return j;
}

void export_map(const Scheme& scheme, discrepancy::Coord extent, std::ostream& out) {
    const std::uint32_t d = scheme.dim();
    if (extent < 1) throw Error(ErrorKind::invalid_parameter, "extent N must be >= 1");
    for (std::uint32_t i = 1; i <= d; ++i) out << 'x' << i << ',';
    out << "disk\n";
    std::vector<discrepancy::Coord> x(d, 1);
    for (;;) {
        for (auto v : x) out << v << ',';
        out << coloring::disk_of(scheme, x) << '\n';
        std::size_t i = d;
        while (i-- > 0) {
            if (++x[i] <= extent) break;
            x[i] = 1;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
}

VerifyOutcome verify_scheme(const Scheme& scheme) {
    VerifyOutcome out;
    const auto latin = coloring::verify_latin(scheme.coloring);
    out.latin_ok = latin.passed;
    out.messages.push_back(latin.describe());

    const auto& prov = scheme.provenance;
    if (prov.net) {
        // Rebuild the net from the stored field and matrices.
        std::function<nets::DigitalNet(const nets::NetProvenance&)> rebuild =
            [&](const nets::NetProvenance& np) -> nets::DigitalNet {
            if (!np.components.empty()) {
                std::vector<nets::DigitalNet> parts;
                for (const auto& c : np.components) parts.push_back(rebuild(c));
                return nets::crt_compose(parts, np.base);
            }
            nets::GeneratorSet g{gf::Field(np.p, np.modulus.value_or(gf::Poly{})), 0,
                                 static_cast<std::uint32_t>(np.matrices.size()), np.matrices};
            g.m = prov.m;
            return nets::net_from_generators(g);
        };
        try {
            const auto net = rebuild(*prov.net);
            const auto check = nets::verify_net(net, 0);
            out.net_ok = check.passed;
            out.messages.push_back(check.passed ? "net: pass (" + std::to_string(check.intervals_checked) +
                                                      " elementary intervals)"
                                                : "net: fail at " + nets::to_string(*check.violation));
            if (coloring::coloring_from_net(net, scheme.disks()) != scheme.coloring) {
                out.net_ok = false;
                out.messages.push_back("net: provenance net does not reproduce the anchor map");
            }
        } catch (const Error& e) {
            out.net_ok = false;
            out.messages.push_back(std::string("net: ") + e.what());
        }
    }

    try {
        GenerateOptions opts{prov.seed, prov.skews};
        const auto again = generate_scheme(scheme.disks(), scheme.dim(), prov.requested_mode, opts);
        out.regenerated_ok = again.coloring == scheme.coloring && again.mode == scheme.mode;
        out.messages.push_back(out.regenerated_ok ? "provenance: regenerates identically"
                                                  : "provenance: regeneration differs from stored anchor map");
    } catch (const Error& e) {
        out.regenerated_ok = false;
        out.messages.push_back(std::string("provenance: ") + e.what());
    }
    return out;
}

// --- Sweep -----------------------------------------------------------------

std::string to_csv(const SweepRow& row) {
    std::ostringstream s;
    s << row.M << ',' << row.d << ',' << row.N << ',' << coloring::to_string(row.mode) << ',' << row.disc_num << ','
      << row.disc_plus_num;
    return s.str();
}

SweepResult run_sweep(const SweepSpec& spec, std::ostream* sink) {
    SweepResult result;
    for (auto d : spec.dims) {
        for (std::uint32_t M = spec.disks_lo; M <= spec.disks_hi; ++M) {
            for (auto mode : spec.modes) {
                const std::string cell = "M=" + std::to_string(M) + " d=" + std::to_string(d) + " mode=" +
                                         coloring::to_string(mode);
                try {
                    const auto scheme = generate_scheme(M, d, mode, {spec.seed, {}});
                    const discrepancy::Coord N = static_cast<discrepancy::Coord>(spec.extent_multiplier) * M;
                    const auto report = discrepancy::disc_report(scheme, N, false, spec.budget);
                    SweepRow row{M, d, N, mode, report.disc->num, report.disc_plus.num, report.elapsed_ms};
                    if (sink) *sink << to_csv(row) << '\n' << std::flush;
                    result.rows.push_back(row);
                } catch (const Error& e) {
                    result.skipped.push_back(cell + ": " + e.what());
                }
            }
        }
    }
    return result;
}

void append_sweep_csv(const std::string& path, const SweepSpec& spec, SweepResult* result) {
    bool fresh = true;
    {
        std::ifstream probe(path, std::ios::binary | std::ios::ate);
        if (probe && probe.tellg() > 0) fresh = false;
    }
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorKind::invalid_parameter, "cannot write " + path);
    if (fresh) out << sweep_header << '\n';
    auto r = run_sweep(spec, &out);
    if (result) *result = std::move(r);
}

}  // namespace decluster::schemegen
