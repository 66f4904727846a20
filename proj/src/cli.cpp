// SPDX-License-Identifier: Apache-2.0
#include "effcap/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "effcap/error.hpp"
#include "effcap/json_io.hpp"
#include "effcap/mixfit.hpp"

namespace effcap::cli {
namespace {

using capacity::ECEstimate;
using capacity::Method;
using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* method_name(Method m) {
    switch (m) {
        case Method::mg: return "mg";
        case Method::mog: return "mog";
        case Method::numeric_exact: return "numeric_exact";
        case Method::monte_carlo: return "monte_carlo";
    }
    return "?";
}

Method method_from_name(const std::string& s) {
    std::string k;
    for (char c : s)
        if (c != '_' && c != '-') k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (k == "mg") return Method::mg;
    if (k == "mog") return Method::mog;
    if (k == "numericexact") return Method::numeric_exact;
    if (k == "montecarlo") return Method::monte_carlo;
    throw parse_error("sweep: unknown method \"" + s + "\"");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw parse_error("cannot open output file: " + out_path);
    f << text;
}

void emit_report(const std::string& json_line, const GlobalOpts& g) {
    if (!g.quiet) std::fprintf(stderr, "%s\n", json_line.c_str());
}

double need_number(const ordered_json& j, const char* key, const char* what) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw parse_error(std::string(what) + ": missing or non-numeric \"" + key + "\"");
    return it->get<double>();
}

// Exact gamma-mixture rescale: the unit-mean fit carried to mean c has
// phi -> phi c^{-vartheta}, xi -> xi / c (density g -> f(g/c)/c termwise).
mixfit::MGModel scale_mg(const mixfit::MGModel& m, double c) {
    mixfit::MGModel out = m;
    for (auto& t : out.terms) {
        t.phi *= std::pow(c, -t.vartheta);
        t.xi /= c;
    }
    return out;
}

ECEstimate ergodic_mc(const std::vector<double>& samples) {
    long double s1 = 0.0L, s2 = 0.0L;
    for (double g : samples) {
        long double v = std::log1p(static_cast<long double>(g)) / 0.693147180559945309417232121458L;
        s1 += v;
        s2 += v * v;
    }
    const auto n = static_cast<long double>(samples.size());
    const long double mean = s1 / n;
    const long double var = std::max(0.0L, s2 / n - mean * mean);
    ECEstimate e;
    e.value = static_cast<double>(mean);
    e.method = Method::monte_carlo;
    e.std_error = static_cast<double>(std::sqrt(var / n));
    return e;
}

struct Cell {
    double value = kNaN;
    std::optional<double> std_error;
    std::string note;
};

struct FitBundle {
    bool has_mg = false;
    bool has_mog = false;
    mixfit::MGSelection mg;
    mixfit::MoGSelection mog;
    std::vector<double> unit_samples;  // Monte Carlo draws at unit mean SNR
};

// One (row, method) evaluation. `gbar` scales the unit-mean artifacts; A = 0
// maps to the ergodic limit.
Cell eval_cell(Method m, double A, double gbar, const channels::ChannelParams& q,
               const FitBundle& fits) {
    Cell cell;
    try {
        switch (m) {
            case Method::mg: {
                const auto scaled = scale_mg(fits.mg.model, gbar);
                if (A > 0) {
                    cell.value = capacity::ec_mg(scaled, A).value;
                } else {
                    cell.value = capacity::ergodic_capacity(
                        [&](double g) { return mixfit::mg_pdf(scaled, g); });
                }
                break;
            }
            case Method::mog: {
                mixfit::MoGModel scaled = fits.mog.model;
                scaled.gamma_bar *= gbar;
                if (A > 0) {
                    cell.value = capacity::ec_mog(scaled, A).value;
                } else {
                    cell.value = capacity::ergodic_capacity(
                        [&](double g) { return mixfit::mog_pdf(scaled, g); });
                }
                break;
            }
            case Method::numeric_exact: {
                auto pdf = [&](double g) { return channels::composite_pdf(g, q); };
                cell.value = A > 0 ? capacity::ec_numeric(pdf, A).value
                                   : capacity::ergodic_capacity(pdf);
                break;
            }
            case Method::monte_carlo: {
                std::vector<double> scaled(fits.unit_samples.size());
                std::transform(fits.unit_samples.begin(), fits.unit_samples.end(),
                               scaled.begin(), [gbar](double g) { return g * gbar; });
                const ECEstimate e =
                    A > 0 ? capacity::ec_monte_carlo(scaled, A) : ergodic_mc(scaled);
                cell.value = e.value;
                cell.std_error = e.std_error;
                break;
            }
        }
    } catch (const std::exception& e) {
        cell.value = kNaN;
        cell.std_error.reset();
        cell.note = e.what();
    }
    return cell;
}

}  // namespace

SweepSpec sweep_spec_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw parse_error("sweep: malformed JSON");
    if (!j.is_object() || !j.contains("channel"))
        throw parse_error("sweep: missing \"channel\" object");

    SweepSpec s;
    s.channel = json_io::channel_from_json(j["channel"].dump());

    const std::string var = j.value("sweep_variable", std::string{});
    if (var == "mean_snr_db")
        s.variable = SweepVariable::mean_snr_db;
    else if (var == "theta")
        s.variable = SweepVariable::theta;
    else
        throw parse_error("sweep: sweep_variable must be \"mean_snr_db\" or \"theta\"");

    auto r = j.find("range");
    if (r == j.end() || !r->is_object()) throw parse_error("sweep: missing \"range\" object");
    s.range.start = need_number(*r, "start", "sweep range");
    s.range.stop = need_number(*r, "stop", "sweep range");
    s.range.steps = static_cast<int>(need_number(*r, "steps", "sweep range"));
    if (s.range.steps < 2) throw parse_error("sweep: range.steps must be >= 2");
    if (!(s.range.start < s.range.stop))
        throw parse_error("sweep: range.start must be < range.stop");

    auto q = j.find("qos");
    if (s.variable == SweepVariable::mean_snr_db) {
        if (q == j.end() || !q->is_object())
            throw parse_error("sweep: mean_snr_db sweeps need a \"qos\" object (A, or theta/T/B)");
        if (q->contains("A")) {
            s.a = need_number(*q, "A", "qos");
        } else {
            const double theta = need_number(*q, "theta", "qos");
            const double t = q->value("T", 1.0);
            const double b = q->value("B", 1.0);
            try {
                s.a = capacity::a_from_qos(theta, t, b).A;
            } catch (const std::domain_error& e) {
                throw parse_error(std::string("sweep qos: ") + e.what());
            }
        }
        if (!(s.a >= 0) || !std::isfinite(s.a))
            throw parse_error("sweep: qos exponent A must be finite and >= 0");
    } else {
        if (q != j.end()) {
            if (!q->is_object()) throw parse_error("sweep: \"qos\" must be an object");
            if (q->contains("A") || q->contains("theta"))
                throw parse_error("sweep: theta is the swept variable; fix only qos.T and qos.B");
            s.t = q->value("T", 1.0);
            s.b = q->value("B", 1.0);
        }
        if (!(s.t > 0) || !(s.b > 0)) throw parse_error("sweep: qos T and B must be positive");
        if (!j.contains("mean_snr_db"))
            throw parse_error("sweep: theta sweeps need a fixed \"mean_snr_db\"");
        s.mean_snr_db = need_number(j, "mean_snr_db", "sweep");
        if (s.range.start < 0) throw parse_error("sweep: theta must be >= 0");
    }

    auto m = j.find("methods");
    if (m == j.end() || !m->is_array() || m->empty())
        throw parse_error("sweep: missing or empty \"methods\" array");
    for (const auto& e : *m) {
        if (!e.is_string()) throw parse_error("sweep: methods entries must be strings");
        const Method mm = method_from_name(e.get<std::string>());
        if (std::find(s.methods.begin(), s.methods.end(), mm) == s.methods.end())
            s.methods.push_back(mm);
    }

    if (j.contains("mc_samples")) {
        const double v = need_number(j, "mc_samples", "sweep");
        if (!(v >= 0) || v != std::floor(v)) throw parse_error("sweep: mc_samples must be a non-negative integer");
        s.mc_samples = static_cast<std::size_t>(v);
    }
    const bool wants_mc =
        std::find(s.methods.begin(), s.methods.end(), Method::monte_carlo) != s.methods.end();
    if (wants_mc && s.mc_samples < 1000)
        throw parse_error("sweep: mc_samples must be >= 1000 when monte_carlo is requested");

    if (j.contains("seed")) {
        const double v = need_number(j, "seed", "sweep");
        if (!(v >= 0) || v != std::floor(v)) throw parse_error("sweep: seed must be a non-negative integer");
        s.seed = static_cast<std::uint64_t>(v);
    }
    if (j.contains("mse_target")) {
        s.mse_target = need_number(j, "mse_target", "sweep");
        if (!(s.mse_target > 0)) throw parse_error("sweep: mse_target must be positive");
    }
    return s;
}

SweepArtifacts run_sweep(const SweepSpec& spec, int jobs) {
    if (jobs < 1) jobs = 1;
    const bool snr_sweep = spec.variable == SweepVariable::mean_snr_db;
    const int n = spec.range.steps;

    const auto has = [&](Method m) {
        return std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end();
    };

    // All fits and draws happen once at unit mean SNR; rows rescale them
    // exactly (gamma is linear in omega, so are the model families).
    const auto unit = channels::scale_to_mean(spec.channel, 1.0);

    ordered_json meta;
    meta["tool"] = "effcap";
    meta["version"] = kVersion;
    meta["seed"] = spec.seed;
    meta["sweep_variable"] = snr_sweep ? "mean_snr_db" : "theta";
    meta["steps"] = n;
    {
        auto& ms = meta["methods"] = ordered_json::array();
        for (Method m : spec.methods) ms.push_back(method_name(m));
    }
    if (snr_sweep)
        meta["qos_a"] = spec.a;
    else {
        meta["qos_t"] = spec.t;
        meta["qos_b"] = spec.b;
        meta["mean_snr_db"] = spec.mean_snr_db;
    }
    meta["mse_target"] = spec.mse_target;

    FitBundle fits;
    if (has(Method::mg)) {
        fits.has_mg = true;
        fits.mg = mixfit::select_mg_order(unit, spec.mse_target, 50);
        meta["fits"]["mg"] = {{"order", fits.mg.order},
                              {"mse", fits.mg.mse},
                              {"met", fits.mg.met},
                              {"scaling", "unit-mean fit rescaled per row (xi ~ 1/omega)"}};
    }
    if (has(Method::mog)) {
        fits.has_mog = true;
        fits.mog = mixfit::select_mog_order(unit, spec.mse_target, 20, spec.seed, 1000000);
        meta["fits"]["mog"] = {{"order", fits.mog.order},
                               {"mse", fits.mog.mse},
                               {"met", fits.mog.met},
                               {"scaling", "unit-mean fit rescaled per row (gamma_bar)"}};
    }
    if (has(Method::monte_carlo)) {
        fits.unit_samples = channels::sample_composite(unit, spec.mc_samples, spec.seed);
        meta["mc_samples"] = spec.mc_samples;
    }

    struct Row {
        double x = 0.0;
        std::vector<Cell> cells;
    };
    std::vector<Row> rows(static_cast<std::size_t>(n));

    const double fixed_gbar = std::pow(10.0, spec.mean_snr_db / 10.0);
    auto eval_row = [&](int i) {
        Row& row = rows[static_cast<std::size_t>(i)];
        row.x = spec.range.start +
                (spec.range.stop - spec.range.start) * i / static_cast<double>(n - 1);
        const double gbar = snr_sweep ? std::pow(10.0, row.x / 10.0) : fixed_gbar;
        const double a = snr_sweep ? spec.a : capacity::a_from_qos(row.x, spec.t, spec.b).A;
        channels::ChannelParams q = unit;
        q.omega *= gbar;
        row.cells.reserve(spec.methods.size());
        for (Method m : spec.methods) row.cells.push_back(eval_cell(m, a, gbar, q, fits));
    };

    if (jobs == 1 || n == 1) {
        for (int i = 0; i < n; ++i) eval_row(i);
    } else {
        std::vector<std::thread> pool;
        const int workers = std::min(jobs, n);
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (int i = t; i < n; i += workers) eval_row(i);
            });
        for (auto& th : pool) th.join();
    }

    SweepArtifacts art;
    std::string& csv = art.csv;
    csv = "x";
    for (Method m : spec.methods) csv += std::string(",") + method_name(m);
    for (Method m : spec.methods)
        if (m == Method::monte_carlo) csv += std::string(",") + method_name(m) + "_stderr";
    csv += "\n";

    auto& notes = meta["notes"] = ordered_json::array();
    for (int i = 0; i < n; ++i) {
        const Row& row = rows[static_cast<std::size_t>(i)];
        csv += fmt12(row.x);
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            csv += "," + fmt12(row.cells[c].value);
            if (std::isfinite(row.cells[c].value)) art.any_value = true;
            if (!row.cells[c].note.empty())
                notes.push_back("row " + std::to_string(i) + " (x=" + fmt12(row.x) + ") " +
                                method_name(spec.methods[c]) + ": " + row.cells[c].note);
        }
        for (std::size_t c = 0; c < row.cells.size(); ++c)
            if (spec.methods[c] == Method::monte_carlo)
                csv += "," + fmt12(row.cells[c].std_error.value_or(kNaN));
        csv += "\n";
    }

    art.metadata = meta.dump();
    return art;
}

int cmd_fit(const std::string& channel_json, const std::string& family, double mse_target,
            const GlobalOpts& g) {
    const auto p = json_io::channel_from_json(channel_json);
    std::string fam;
    for (char c : family) fam += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (fam != "mg" && fam != "mog")
        throw parse_error("fit: --family must be \"mg\" or \"mog\"");
    if (!(mse_target > 0)) throw parse_error("fit: --mse-target must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    std::string model_json;
    int order = 0;
    double mse = 0.0;
    bool met = false;
    if (fam == "mg") {
        const auto sel = mixfit::select_mg_order(p, mse_target, 50);
        model_json = json_io::to_json(sel.model);
        order = sel.order;
        mse = sel.mse;
        met = sel.met;
    } else {
        const auto sel = mixfit::select_mog_order(p, mse_target, 20, g.seed, 1000000);
        model_json = json_io::to_json(sel.model);
        order = sel.order;
        mse = sel.mse;
        met = sel.met;
    }
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t0)
                               .count();

    ordered_json rep;
    rep["family"] = fam;
    rep["order"] = order;
    rep["mse"] = mse;
    rep["mse_target"] = mse_target;
    rep["target_met"] = met;
    rep["gate"] = "mse<=" + fmt12(mse_target) + ": " + (met ? "true" : "false");
    rep["wall_ms"] = wall_ms;
    rep["seed"] = g.seed;
    if (!met)
        rep["warning"] = "target not reachable within the order cap; best-effort model emitted";

    emit(model_json + "\n", g.out);
    emit_report(rep.dump(), g);
    return met ? kExitOk : kExitDegradedFit;
}

int cmd_sweep(const std::string& spec_json, const GlobalOpts& g) {
    SweepSpec spec = sweep_spec_from_json(spec_json);
    if (g.seed_given) spec.seed = g.seed;
    const SweepArtifacts art = run_sweep(spec, g.jobs);
    emit(art.csv, g.out);
    emit_report(art.metadata, g);
    return art.any_value ? kExitOk : kExitValidationFailure;
}

int cmd_validate(const std::string& channel_json, std::vector<double> a_values,
                 std::size_t mc_samples, const GlobalOpts& g) {
    if (mc_samples < 1000) throw parse_error("validate: mc-samples minimum is 1000");
    const auto p = json_io::channel_from_json(channel_json);
    if (a_values.empty()) a_values = {0.5, 1.0, 2.0, 5.0};
    for (double a : a_values)
        if (!std::isfinite(a) || a < 0)
            throw parse_error("validate: A values must be finite and >= 0");

    const auto mg = mixfit::select_mg_order(p, 1e-8, 50);
    const auto mog =
        mixfit::select_mog_order(p, 1e-8, 20, g.seed, std::max<std::size_t>(mc_samples, 10000));
    const auto samples = channels::sample_composite(p, mc_samples, g.seed);
    const auto pdf = [&](double x) { return channels::composite_pdf(x, p); };

    std::ostringstream out;
    out << "fit mg: order=" << mg.order << " mse=" << fmt12(mg.mse)
        << " met=" << (mg.met ? "true" : "false") << "\n";
    out << "fit mog: order=" << mog.order << " mse=" << fmt12(mog.mse)
        << " met=" << (mog.met ? "true" : "false") << "\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %-16s %-16s %-16s %-16s %-12s %-12s\n", "A", "ec_mg",
                  "ec_mog", "ec_numeric", "ec_mc", "mc_stderr", "max_gap");
    out << line;

    std::vector<std::string> failures;
    for (double a : a_values) {
        double v_mg, v_mog, v_num;
        ECEstimate mc;
        std::string label;
        if (a > 0) {
            label = fmt12(a);
            v_mg = capacity::ec_mg(mg.model, a).value;
            v_mog = capacity::ec_mog(mog.model, a).value;
            v_num = capacity::ec_numeric(pdf, a).value;
            mc = capacity::ec_monte_carlo(samples, a);
        } else {
            label = "ergodic(theta->0)";
            v_mg = capacity::ergodic_capacity(
                [&](double x) { return mixfit::mg_pdf(mg.model, x); });
            v_mog = capacity::ergodic_capacity(
                [&](double x) { return mixfit::mog_pdf(mog.model, x); });
            v_num = capacity::ergodic_capacity(pdf);
            mc = ergodic_mc(samples);
        }
        const double d_mg = std::fabs(v_mg - v_num);
        const double d_mog = std::fabs(v_mog - v_num);
        const double d_mc = std::fabs(mc.value - v_num);
        const double max_gap =
            std::max({d_mg, d_mog, d_mc, std::fabs(v_mg - v_mog), std::fabs(v_mg - mc.value),
                      std::fabs(v_mog - mc.value)});
        std::snprintf(line, sizeof line, "%-18s %-16s %-16s %-16s %-16s %-12s %-12s\n",
                      label.c_str(), fmt12(v_mg).c_str(), fmt12(v_mog).c_str(),
                      fmt12(v_num).c_str(), fmt12(mc.value).c_str(),
                      fmt12(mc.std_error.value_or(kNaN)).c_str(), fmt12(max_gap).c_str());
        out << line;

        if (d_mc > 3.0 * mc.std_error.value_or(0.0))
            failures.push_back("A=" + label + ": |ec_mc - ec_numeric| = " + fmt12(d_mc) +
                               " exceeds 3*stderr = " + fmt12(3.0 * mc.std_error.value_or(0.0)));
        if (mg.met && d_mg > 1e-3)
            failures.push_back("A=" + label + ": |ec_mg - ec_numeric| = " + fmt12(d_mg) +
                               " exceeds 1e-3 with the MG fit at gate");
        if (mog.met && d_mog > 1e-2)
            failures.push_back("A=" + label + ": |ec_mog - ec_numeric| = " + fmt12(d_mog) +
                               " exceeds 1e-2 with the MoG fit at gate");
    }

    for (const auto& f : failures) out << "fail: " << f << "\n";
    out << "overall: " << (failures.empty() ? "PASS" : "FAIL") << "\n";
    emit(out.str(), g.out);
    return failures.empty() ? kExitOk : kExitValidationFailure;
}

int cmd_pdf_dump(const std::string& channel_json, const PdfDumpSpec& dump, const GlobalOpts& g) {
    const auto p = json_io::channel_from_json(channel_json);
    if (!(dump.gmin > 0) || !(dump.gmax > dump.gmin))
        throw parse_error("pdf-dump: need 0 < gmin < gmax");
    if (dump.points < 2) throw parse_error("pdf-dump: points must be >= 2");
    if (!dump.want_exact && !dump.want_mg && !dump.want_mog)
        throw parse_error("pdf-dump: nothing selected (want exact, mg and/or mog)");
    if (!(dump.mse_target > 0)) throw parse_error("pdf-dump: --mse-target must be positive");

    bool degraded = false;
    mixfit::MGSelection mg;
    mixfit::MoGSelection mog;
    ordered_json rep;
    rep["tool"] = "effcap";
    rep["version"] = kVersion;
    if (dump.want_mg) {
        mg = mixfit::select_mg_order(p, dump.mse_target, 50);
        degraded |= !mg.met;
        rep["fits"]["mg"] = {{"order", mg.order}, {"mse", mg.mse}, {"met", mg.met}};
    }
    if (dump.want_mog) {
        mog = mixfit::select_mog_order(p, dump.mse_target, 20, g.seed, 1000000);
        degraded |= !mog.met;
        rep["fits"]["mog"] = {{"order", mog.order}, {"mse", mog.mse}, {"met", mog.met}};
    }

    std::string csv = "gamma";
    if (dump.want_exact) csv += ",exact";
    if (dump.want_mg) csv += ",mg";
    if (dump.want_mog) csv += ",mog";
    csv += "\n";
    const double lg0 = std::log(dump.gmin);
    const double lg1 = std::log(dump.gmax);
    for (int i = 0; i < dump.points; ++i) {
        const double f = i / static_cast<double>(dump.points - 1);
        const double gamma = dump.log_spacing ? std::exp(lg0 + (lg1 - lg0) * f)
                                              : dump.gmin + (dump.gmax - dump.gmin) * f;
        csv += fmt12(gamma);
        if (dump.want_exact) csv += "," + fmt12(channels::composite_pdf(gamma, p));
        if (dump.want_mg) csv += "," + fmt12(mixfit::mg_pdf(mg.model, gamma));
        if (dump.want_mog) csv += "," + fmt12(mixfit::mog_pdf(mog.model, gamma));
        csv += "\n";
    }

    emit(csv, g.out);
    emit_report(rep.dump(), g);
    return degraded ? kExitDegradedFit : kExitOk;
}

}  // namespace effcap::cli
