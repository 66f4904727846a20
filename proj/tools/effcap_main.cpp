// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "effcap/cli.hpp"
#include "effcap/error.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw effcap::parse_error("cannot read input file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace effcap;

    CLI::App app{"effective capacity of composite fading links: model fitting, sweeps, validation"};
    app.require_subcommand(1);

    cli::GlobalOpts g;
    auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (default 1)");
    app.add_option("--jobs", g.jobs, "parallel sweep workers (default 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "write the primary output to this path instead of stdout");
    app.add_flag("--quiet", g.quiet, "suppress the JSON report on stderr");

    std::string fit_channel, fit_family;
    double fit_target = 1e-8;
    auto* fit = app.add_subcommand("fit", "fit an MG or MoG model to a channel");
    fit->fallthrough();
    fit->add_option("channel-json", fit_channel, "channel JSON file")->required();
    fit->add_option("--family", fit_family, "model family: mg | mog")->required();
    fit->add_option("--mse-target", fit_target, "canonical-grid MSE target (default 1e-8)");

    std::string sweep_spec;
    auto* sweep = app.add_subcommand("sweep", "evaluate effective capacity over a sweep spec");
    sweep->fallthrough();
    sweep->add_option("spec-json", sweep_spec, "sweep spec JSON file")->required();

    std::string val_channel;
    std::vector<double> val_a;
    std::size_t val_mc = 1000000;
    auto* val = app.add_subcommand("validate", "cross-validate all four methods on one channel");
    val->fallthrough();
    val->add_option("channel-json", val_channel, "channel JSON file")->required();
    val->add_option("--a-values", val_a, "QoS exponents A (default 0.5,1,2,5; 0 = ergodic row)")
        ->delimiter(',');
    val->add_option("--mc-samples", val_mc, "Monte Carlo draws (minimum 1000)");

    std::string dump_channel;
    cli::PdfDumpSpec dspec;
    std::vector<std::string> which;
    bool linear = false;
    auto* dump = app.add_subcommand("pdf-dump", "dump exact/fitted SNR densities as CSV");
    dump->fallthrough();
    dump->add_option("channel-json", dump_channel, "channel JSON file")->required();
    dump->add_option("--gmin", dspec.gmin, "grid lower end (default 1e-3)");
    dump->add_option("--gmax", dspec.gmax, "grid upper end (default 1e2)");
    dump->add_option("--points", dspec.points, "grid size (default 200)");
    dump->add_flag("--linear", linear, "linear gamma grid (default log-spaced)");
    dump->add_option("--which", which, "density subset of exact,mg,mog (default all)")
        ->delimiter(',');
    dump->add_option("--mse-target", dspec.mse_target, "fit MSE target (default 1e-8)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kExitOk : cli::kExitUsage;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        if (*fit) return cli::cmd_fit(read_file(fit_channel), fit_family, fit_target, g);
        if (*sweep) return cli::cmd_sweep(read_file(sweep_spec), g);
        if (*val) return cli::cmd_validate(read_file(val_channel), val_a, val_mc, g);
        if (*dump) {
            if (!which.empty()) {
                dspec.want_exact = dspec.want_mg = dspec.want_mog = false;
                for (const auto& w : which) {
                    if (w == "exact")
                        dspec.want_exact = true;
                    else if (w == "mg")
                        dspec.want_mg = true;
                    else if (w == "mog")
                        dspec.want_mog = true;
                    else
                        throw parse_error("pdf-dump: --which accepts exact, mg, mog");
                }
            }
            dspec.log_spacing = !linear;
            return cli::cmd_pdf_dump(read_file(dump_channel), dspec, g);
        }
    } catch (const parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli::kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli::kExitValidationFailure;
    }
    return cli::kExitUsage;
}
