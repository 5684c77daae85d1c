// Command-line front end: generate, verify and evaluate declustering schemes.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decluster/discrepancy.hpp"
#include "decluster/error.hpp"
#include "decluster/schemegen.hpp"

namespace dc = decluster;
namespace disc = decluster::discrepancy;
namespace sg = decluster::schemegen;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::uint32_t parse_u32(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const auto v = std::stoul(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
        throw dc::Error(dc::ErrorKind::parse_error, "bad " + what + ": '" + text + "'");
    }
}

disc::Budget budget_from(std::optional<std::uint64_t> max_cells) {
    auto b = disc::Budget::from_env();
    if (max_cells) b.max_cells = *max_cells;
    return b;
}

void print_warnings(const dc::coloring::Scheme& scheme) {
    for (const auto& w : scheme.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decluster: latin-hypercube declustering schemes from digital nets"};
    app.require_subcommand(1);
    std::optional<std::uint64_t> max_cells;
    app.add_option("--max-cells", max_cells, "Cell budget for exhaustive evaluation (env DECLUSTER_MAX_CELLS)");

    // generate
    auto* gen = app.add_subcommand("generate", "Build a scheme and write scheme.json");
    std::uint32_t gen_m = 0, gen_d = 0;
    std::string gen_mode, gen_out, gen_skews;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--disks", gen_m, "Number of disks M")->required();
    gen->add_option("--dim", gen_d, "Dimension d")->required();
    gen->add_option("--mode", gen_mode, "paper|smallbase|cyclic|random|checkerboard")->required();
    gen->add_option("--seed", gen_seed, "Seed for random mode");
    gen->add_option("--skews", gen_skews, "Cyclic skews s2,...,sd");
    gen->add_option("--out", gen_out, "Output scheme.json")->required();

    // verify
    auto* ver = app.add_subcommand("verify", "Check the latin property and provenance of a scheme");
    std::string ver_scheme;
    ver->add_option("--scheme", ver_scheme)->required();

    // net
    auto* net = app.add_subcommand("net", "Construct and verify a (0,m,d)-net");
    std::uint32_t net_b = 0, net_m = 0, net_d = 0;
    std::string net_out;
    net->add_option("--base", net_b)->required();
    net->add_option("--m", net_m)->required();
    net->add_option("--dim", net_d)->required();
    net->add_option("--out", net_out);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Exact discrepancy of a scheme over [N]^d");
    std::string ev_scheme, ev_report;
    disc::Coord ev_n = 0;
    bool ev_pos = false;
    ev->add_option("--scheme", ev_scheme)->required();
    ev->add_option("--extent", ev_n)->required();
    ev->add_flag("--positive-only", ev_pos);
    ev->add_option("--report", ev_report);

    // query
    auto* qu = app.add_subcommand("query", "Response time and per-disk counts of one range query");
    std::string qu_scheme, qu_box;
    qu->add_option("--scheme", qu_scheme)->required();
    qu->add_option("--box", qu_box, "l1:h1,l2:h2,...")->required();

    // export-map
    auto* ex = app.add_subcommand("export-map", "Write the block-to-disk map of [N]^d as CSV");
    std::string ex_scheme, ex_csv;
    disc::Coord ex_n = 0;
    ex->add_option("--scheme", ex_scheme)->required();
    ex->add_option("--extent", ex_n)->required();
    ex->add_option("--csv", ex_csv)->required();

    // witness
    auto* wi = app.add_subcommand("witness", "Lower-bound certificate box for a scheme");
    std::string wi_scheme;
    wi->add_option("--scheme", wi_scheme)->required();

    // sweep
    auto* sw = app.add_subcommand("sweep", "Discrepancy table over (d, M, mode)");
    std::string sw_dims, sw_disks, sw_modes, sw_csv;
    std::uint32_t sw_k = 1;
    std::uint64_t sw_seed = 0;
    sw->add_option("--dims", sw_dims, "D1,D2,...")->required();
    sw->add_option("--disks", sw_disks, "lo..hi")->required();
    sw->add_option("--modes", sw_modes, "comma-separated modes")->required();
    sw->add_option("--extent-multiplier", sw_k, "N = k*M")->required();
    sw->add_option("--seed", sw_seed, "Seed for random mode");
    sw->add_option("--csv", sw_csv)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto budget = budget_from(max_cells);

        if (*gen) {
            sg::GenerateOptions opts;
            opts.seed = gen_seed;
            for (const auto& s : split(gen_skews, ',')) opts.skews.push_back(parse_u32(s, "skew"));
            const auto scheme = sg::generate_scheme(gen_m, gen_d, dc::coloring::parse_mode(gen_mode), opts);
            print_warnings(scheme);
            sg::write_scheme(scheme, gen_out);
            std::cout << "wrote " << gen_out << " (M=" << scheme.disks() << ", d=" << scheme.dim()
                      << ", mode=" << dc::coloring::to_string(scheme.mode) << ")\n";
            return 0;
        }
        if (*ver) {
            const auto scheme = sg::read_scheme(ver_scheme);
            const auto outcome = sg::verify_scheme(scheme);
            for (const auto& m : outcome.messages) std::cout << m << '\n';
            std::cout << (outcome.ok() ? "PASS" : "FAIL") << '\n';
            return outcome.ok() ? 0 : 1;
        }
        if (*net) {
            const auto built = dc::nets::build_net(net_b, net_m, net_d);
            const auto check = dc::nets::verify_net(built, 0);
            if (check.passed) {
                std::cout << "pass: (0," << net_m << "," << net_d << ")-net in base " << net_b << ", "
                          << check.intervals_checked << " elementary intervals checked\n";
            } else {
                std::cout << "fail: first violation " << dc::nets::to_string(*check.violation) << " holds "
                          << check.violation_count << " points\n";
            }
            if (!net_out.empty()) {
                std::ofstream out(net_out, std::ios::binary);
                out << sg::dump(sg::net_to_json(built));
            }
            return check.passed ? 0 : 1;
        }
        if (*ev) {
            const auto scheme = sg::read_scheme(ev_scheme);
            print_warnings(scheme);
            const auto report = disc::disc_report(scheme, ev_n, ev_pos, budget);
            if (report.disc) {
                std::cout << "disc  = " << report.disc->to_string() << "  witness "
                          << report.disc_witness->box.to_string() << " color " << report.disc_witness->color << '\n';
            }
            std::cout << "disc+ = " << report.disc_plus.to_string() << "  witness "
                      << report.disc_plus_witness.box.to_string() << " color " << report.disc_plus_witness.color
                      << '\n';
            if (!ev_report.empty()) {
                std::ofstream out(ev_report, std::ios::binary);
                out << sg::dump(sg::report_to_json(report));
            }
            return 0;
        }
        if (*qu) {
            const auto scheme = sg::read_scheme(qu_scheme);
            const auto box = disc::parse_box(qu_box);
            if (box.dim() != scheme.dim()) {
                throw dc::Error(dc::ErrorKind::invalid_parameter, "box dimension does not match scheme");
            }
            const disc::PeriodicCounter counter(scheme.coloring, budget);
            const auto counts = counter.counts_in_box(box);
            std::cout << "response time " << counter.response_time(box) << " (ideal "
                      << disc::ScaledValue{static_cast<std::int64_t>(box.cardinality()), scheme.disks()}.to_string()
                      << ")\n";
            for (std::size_t c = 0; c < counts.size(); ++c) std::cout << "disk " << c + 1 << ": " << counts[c] << '\n';
            return 0;
        }
        if (*ex) {
            const auto scheme = sg::read_scheme(ex_scheme);
            std::ofstream out(ex_csv, std::ios::binary);
            if (!out) throw dc::Error(dc::ErrorKind::invalid_parameter, "cannot write " + ex_csv);
            sg::export_map(scheme, ex_n, out);
            return 0;
        }
        if (*wi) {
            const auto scheme = sg::read_scheme(wi_scheme);
            const auto cert = disc::witness_pipeline(scheme.coloring);
            std::cout << "subgrid [1.." << cert.subgrid << "]^" << cert.d << ", color class " << cert.color << " ("
                      << cert.points << " points)\n";
            std::cout << "geometric box " << cert.geometric_box.to_string() << " deviation "
                      << cert.geometric_deviation.to_string() << '\n';
            if (cert.used_complement) std::cout << "negative grid deviation; using its complement\n";
            if (cert.chain_value.num > 0) {
                std::cout << "chain box " << cert.chain_box.to_string() << " color " << cert.chain_color << " value "
                          << cert.chain_value.to_string() << '\n';
            } else {
                std::cout << "chain gave no positive box\n";
            }
            if (cert.refined) std::cout << "exhaustive subgrid search improved the chain box\n";
            std::cout << "box " << cert.box.to_string() << " color " << cert.box_color << " value "
                      << cert.value.to_string() << '\n';
            return cert.value.num > 0 ? 0 : 1;
        }
        if (*sw) {
            sg::SweepSpec spec;
            for (const auto& s : split(sw_dims, ',')) spec.dims.push_back(parse_u32(s, "dimension"));
            const auto dots = sw_disks.find("..");
            if (dots == std::string::npos) {
                spec.disks_lo = spec.disks_hi = parse_u32(sw_disks, "disk range");
            } else {
                spec.disks_lo = parse_u32(sw_disks.substr(0, dots), "disk range");
                spec.disks_hi = parse_u32(sw_disks.substr(dots + 2), "disk range");
            }
            for (const auto& s : split(sw_modes, ',')) spec.modes.push_back(dc::coloring::parse_mode(s));
            spec.extent_multiplier = sw_k;
            spec.seed = sw_seed;
            spec.budget = budget;
            sg::SweepResult result;
            sg::append_sweep_csv(sw_csv, spec, &result);
            for (const auto& s : result.skipped) std::cerr << "skipped " << s << '\n';
            std::cout << result.rows.size() << " rows appended to " << sw_csv << '\n';
            return 0;
        }
    } catch (const dc::Error& e) {
        std::cerr << "error (" << dc::to_string(e.kind()) << "): " << e.what() << '\n';
        return 2;
    }
    return 0;
}
