#pragma once

// End-to-end scheme construction, file formats and the experiment sweep.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "decluster/coloring.hpp"
#include "decluster/discrepancy.hpp"
#include "decluster/factorize.hpp"
#include "decluster/nets.hpp"

namespace decluster::schemegen {

using coloring::Mode;
using coloring::Scheme;

struct GenerateOptions {
    std::optional<std::uint64_t> seed;  // random mode; defaults to 0
    std::vector<std::uint32_t> skews;    // cyclic mode
};

/// Builds a scheme and checks it with verify_latin before returning.
///   paper      base-M (0, d-1, d)-net, needs d <= q1 + 1
///   smallbase  base-p (0, k(d-1), d)-net for M = p^k, needs d <= p + 1
///   cyclic, random, checkerboard (M = 2) baselines
/// M = 2 routes paper/smallbase to checkerboard; M = 1 yields the trivial
/// scheme with a warning.
Scheme generate_scheme(std::uint32_t M, std::uint32_t d, Mode mode, const GenerateOptions& options = {});

/// The net a paper/smallbase scheme was built from (verified).
nets::DigitalNet scheme_net(std::uint32_t M, std::uint32_t d, Mode mode);

// --- JSON ------------------------------------------------------------------

inline constexpr int scheme_format_version = 1;

nlohmann::json net_to_json(const nets::DigitalNet& net);
nlohmann::json provenance_to_json(const nets::NetProvenance& prov);
nets::NetProvenance provenance_from_json(const nlohmann::json& j);

nlohmann::json scheme_to_json(const Scheme& scheme);
/// Validates version, anchor ranges and the latin property.
Scheme scheme_from_json(const nlohmann::json& j);

/// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string dump(const nlohmann::json& j);

void write_scheme(const Scheme& scheme, const std::string& path);
Scheme read_scheme(const std::string& path);

nlohmann::json report_to_json(const discrepancy::DiscReport& report);

/// CSV with header x1,...,xd,disk, blocks of [N]^d in lexicographic order.
void export_map(const Scheme& scheme, discrepancy::Coord extent, std::ostream& out);

struct VerifyOutcome {
    bool latin_ok = false;
    bool regenerated_ok = false;  // provenance rebuilds an identical anchor map
    bool net_ok = true;           // provenance net passes verify_net(t=0)
    std::vector<std::string> messages;

    bool ok() const { return latin_ok && regenerated_ok && net_ok; }
};

/// Re-checks a loaded scheme against its own provenance.
VerifyOutcome verify_scheme(const Scheme& scheme);

// --- Sweep -----------------------------------------------------------------

struct SweepRow {
    std::uint32_t M = 0;
    std::uint32_t d = 0;
    discrepancy::Coord N = 0;
    Mode mode = Mode::cyclic;
    std::int64_t disc_num = 0;
    std::int64_t disc_plus_num = 0;
    double runtime_ms = 0.0;
};

struct SweepSpec {
    std::vector<std::uint32_t> dims;
    std::uint32_t disks_lo = 3;
    std::uint32_t disks_hi = 3;
    std::vector<Mode> modes;
    std::uint32_t extent_multiplier = 1;
    std::uint64_t seed = 0;
    discrepancy::Budget budget = discrepancy::Budget::from_env();
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> skipped;  // cells whose preconditions fail, with the reason
};

inline constexpr const char* sweep_header = "M,d,N,mode,disc_num,disc_plus_num";

std::string to_csv(const SweepRow& row);

/// Evaluates every (d, M, mode) cell at N = k * M in a fixed order. Rows go to
/// `sink` (if given) one at a time as they complete.
SweepResult run_sweep(const SweepSpec& spec, std::ostream* sink = nullptr);

/// Appends rows to a CSV file, writing the header if the file is new or empty.
void append_sweep_csv(const std::string& path, const SweepSpec& spec, SweepResult* result = nullptr);

}  // namespace decluster::schemegen
