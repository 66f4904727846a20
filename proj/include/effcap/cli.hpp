// SPDX-License-Identifier: Apache-2.0
#ifndef EFFCAP_CLI_HPP
#define EFFCAP_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "effcap/capacity.hpp"
#include "effcap/channels.hpp"

namespace effcap::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitDegradedFit = 2;
inline constexpr int kExitUsage = 64;

struct GlobalOpts {
    std::uint64_t seed = 1;
    bool seed_given = false;  // true when --seed was passed (overrides a sweep spec's seed)
    int jobs = 1;
    std::string out;  // output path; empty = stdout
    bool quiet = false;
};

enum class SweepVariable { mean_snr_db, theta };

struct SweepRange {
    double start = 0.0;
    double stop = 0.0;
    int steps = 0;
};

// One sweep job. For mean_snr_db sweeps the QoS exponent `a` is fixed and the
// channel is rescaled per step; for theta sweeps the channel is fixed at
// `mean_snr_db` and A = theta*T*B/ln2 varies per step (theta = 0 rows report
// the ergodic limit).
struct SweepSpec {
    channels::ChannelParams channel;
    SweepVariable variable = SweepVariable::mean_snr_db;
    SweepRange range;
    double a = 1.0;
    double t = 1.0;
    double b = 1.0;
    double mean_snr_db = 0.0;
    std::vector<capacity::Method> methods;
    std::size_t mc_samples = 1000000;
    std::uint64_t seed = 1;
    double mse_target = 1e-8;
};

/// Throws effcap::parse_error on malformed/incomplete specs.
SweepSpec sweep_spec_from_json(const std::string& text);

struct SweepArtifacts {
    std::string csv;       // RFC-4180, LF endings, header x,<method>[,<method>_stderr]
    std::string metadata;  // JSON: resolved orders, achieved MSEs, seed, version, notes
    bool any_value = false;  // false = every cell failed (total failure)
};

/// Evaluates all rows (cells in parallel up to `jobs`, deterministic output).
SweepArtifacts run_sweep(const SweepSpec& spec, int jobs);

struct PdfDumpSpec {
    double gmin = 1e-3;
    double gmax = 1e2;
    int points = 200;
    bool log_spacing = true;
    bool want_exact = true;
    bool want_mg = true;
    bool want_mog = true;
    double mse_target = 1e-8;
};

// Subcommand drivers. Each takes raw JSON text (the caller reads files),
// writes CSV/JSON per the interface contract, and returns an exit code.
int cmd_fit(const std::string& channel_json, const std::string& family, double mse_target,
            const GlobalOpts& g);
int cmd_sweep(const std::string& spec_json, const GlobalOpts& g);
int cmd_validate(const std::string& channel_json, std::vector<double> a_values,
                 std::size_t mc_samples, const GlobalOpts& g);
int cmd_pdf_dump(const std::string& channel_json, const PdfDumpSpec& dump, const GlobalOpts& g);

}  // namespace effcap::cli

#endif
