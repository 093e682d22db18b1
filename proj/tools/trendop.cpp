// trendop: command-line driver for synthetic generation, operator analysis,
// spectral reconstruction and period tables.
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure.

#include "trendop/data.hpp"
#include "trendop/error.hpp"
#include "trendop/io.hpp"
#include "trendop/models.hpp"
#include "trendop/pipeline.hpp"
#include "trendop/spectral.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace trendop;

namespace {

constexpr const char *out_env = "TRENDOP_OUT";

struct Overrides {
    std::string config;
    std::string model;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    std::string drift;
    std::optional<double> delta;
    std::optional<int> Q, lag, step, knn, modes;
    std::string duplicates;
    std::string out;
    bool write_operator = false;
    bool write_embedding = false;
};

void add_model_flags(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--model", o.model, "Synthetic model: M, A, F or Fprime");
    cmd->add_option("--steps", o.steps, "Number of simulated steps");
    cmd->add_option("--seed", o.seed, "Seed for the initial regime value");
    cmd->add_option("--drift", o.drift, "Drift law for M/A: linear, quadratic, custom");
    cmd->add_option("--delta", o.delta, "Tent-map transition parameter for F/Fprime");
    cmd->add_option("--out", o.out, std::string("Output directory (default $") + out_env +
                                        " or ./trendop_out)");
}

void add_analysis_flags(CLI::App *cmd, Overrides &o) {
    add_model_flags(cmd, o);
    cmd->add_option("--Q", o.Q, "Number of delays");
    cmd->add_option("--lag", o.lag, "Delay lag in samples");
    cmd->add_option("--step", o.step, "Operator forward step s");
    cmd->add_option("--knn", o.knn, "Neighbour rank K for the bandwidths");
    cmd->add_option("--modes", o.modes, "Number of leading eigenpairs");
    cmd->add_option("--duplicates", o.duplicates,
                    "Coincident embedded points: error (default) or merge");
    cmd->add_flag("--write-operator", o.write_operator, "Also write the Markov matrix");
    cmd->add_flag("--write-embedding", o.write_embedding, "Also write the delay matrix");
}

fs::path default_out() {
    if (const char *env = std::getenv(out_env); env != nullptr && *env != '\0')
        return env;
    return "trendop_out";
}

/// Config file, then flag overrides. The output directory falls back to the
/// environment only when neither the file nor a flag names one.
pipeline::RunConfig resolve(const Overrides &o) {
    pipeline::RunConfig cfg;
    bool config_has_dir = false;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error &e) {
            throw ValidationError(o.config + ": " + e.what());
        }
        cfg = pipeline::config_from_json(j, fs::path(o.config).parent_path());
        config_has_dir = j.contains("output") && j["output"].contains("dir");
    }
    if (!o.model.empty()) {
        const auto kind = models::kind_from_string(o.model);
        if (o.config.empty()) {
            cfg = pipeline::model_config(kind);
        } else {
            cfg.source = pipeline::Source::synthetic;
            cfg.model = models::default_config(kind);
        }
    } else if (o.config.empty()) {
        cfg = pipeline::model_config(models::Kind::F);
    }
    const bool touches_model = o.steps || o.seed || !o.drift.empty() || o.delta;
    if (touches_model && cfg.source != pipeline::Source::synthetic)
        throw ValidationError("--steps/--seed/--drift/--delta need a synthetic input");
    if (o.steps) cfg.model.n_steps = *o.steps;
    if (o.seed) cfg.model.seed = *o.seed;
    if (!o.drift.empty()) cfg.model.drift = models::drift_from_string(o.drift);
    if (o.delta) cfg.model.delta = *o.delta;
    if (o.Q) cfg.Q = *o.Q;
    if (o.lag) cfg.lag = *o.lag;
    if (o.step) cfg.step = *o.step;
    if (o.knn) cfg.knn = *o.knn;
    if (o.modes) cfg.modes = *o.modes;
    if (!o.duplicates.empty()) cfg.duplicates = op::duplicate_policy_from_string(o.duplicates);
    cfg.write_operator = cfg.write_operator || o.write_operator;
    cfg.write_embedding = cfg.write_embedding || o.write_embedding;
    if (!o.out.empty())
        cfg.out_dir = o.out;
    else if (!config_has_dir)
        cfg.out_dir = default_out();
    return cfg;
}

std::string fmt(double x) {
    if (std::isinf(x))
        return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void print_report(const std::vector<spectral::ModeReport> &modes, std::ostream &os) {
    os << "  j  eigenvalue                     |lambda|    period      amplitude   kind\n";
    for (const auto &m : modes) {
        char line[160];
        const std::string ev = fmt(m.eigenvalue.real()) + (m.eigenvalue.imag() < 0 ? "" : "+") +
                               fmt(m.eigenvalue.imag()) + "i";
        std::snprintf(line, sizeof line, "%3d  %-30s %-11s %-11s %-11s %s\n", m.index + 1,
                      ev.c_str(), fmt(std::abs(m.eigenvalue)).c_str(), fmt(m.period).c_str(),
                      fmt(m.amplitude).c_str(), spectral::to_string(m.kind));
        os << line;
    }
}

void print_notices(const pipeline::Analysis &a) {
    for (const auto &n : a.notices)
        std::cerr << "warning: " << n << '\n';
}

void print_written(const std::vector<fs::path> &paths) {
    for (const auto &p : paths)
        std::cout << "wrote " << p.string() << '\n';
}

int cmd_synth(const Overrides &o) {
    pipeline::RunConfig cfg = resolve(o);
    if (cfg.source != pipeline::Source::synthetic)
        throw ValidationError("synth: the configuration does not describe a synthetic model");
    const auto traj = models::simulate(cfg.model);
    print_written(models::write_trajectory(traj, cfg.out_dir));
    return 0;
}

int cmd_analyze(const Overrides &o) {
    const pipeline::RunConfig cfg = resolve(o);
    const auto a = pipeline::analyze(cfg);
    print_notices(a);
    print_written(pipeline::write_analysis(a, cfg.out_dir));
    print_report(a.modes, std::cout);
    return 0;
}

std::set<int> parse_indices(const std::vector<int> &one_based) {
    if (one_based.empty())
        throw ValidationError("reconstruct: --indices is required");
    std::set<int> out;
    for (int j : one_based) {
        if (j < 1)
            throw ValidationError("reconstruct: mode indices are 1-based, got " +
                                  std::to_string(j));
        out.insert(j - 1);
    }
    return out;
}

int cmd_reconstruct(const Overrides &o, const std::vector<int> &indices,
                    const std::string &target_path) {
    const pipeline::RunConfig cfg = resolve(o);
    const std::set<int> wanted = parse_indices(indices);
    const auto a = pipeline::analyze(cfg);
    print_notices(a);
    std::optional<TimeSeries> target;
    if (!target_path.empty()) {
        target = data::read_timeseries(target_path);
        if (target->length() != a.series.length())
            throw ValidationError("reconstruct: target has " +
                                  std::to_string(target->length()) +
                                  " samples but the analysed series has " +
                                  std::to_string(a.series.length()));
    }
    pipeline::Reconstruction r;
    try {
        r = pipeline::reconstruct(a, wanted, target ? &*target : nullptr);
    } catch (const Error &e) {
        rethrow_with_stage(e, "reconstruct");
    }
    for (int j : r.added)
        std::cerr << "warning: added mode " << j + 1
                  << " to close the index set under conjugation\n";
    auto written = pipeline::write_analysis(a, cfg.out_dir);
    auto proj = pipeline::write_reconstruction(a, r, cfg.out_dir);
    written.insert(written.end(), proj.begin(), proj.end());
    print_written(written);
    return 0;
}

int cmd_periods(const std::string &from) {
    const fs::path dir = from.empty() ? default_out() : fs::path(from);
    const fs::path eig = dir / "eigenvalues.tsv";
    if (!fs::is_regular_file(eig))
        throw ValidationError("periods: no eigenvalue table at '" + eig.string() +
                              "'; run analyze first");
    const auto table = io::read_table(eig);
    int s = 1;
    double dt = 1.0;
    if (const auto *v = table.find_meta("step"))
        s = std::stoi(*v);
    if (const auto *v = table.find_meta("dt"))
        dt = std::stod(*v);
    const fs::path out = dir / "periods.tsv";
    io::TableWriter w(out);
    w.meta("step", static_cast<double>(s));
    w.meta("dt", dt);
    w.header({"j", "re", "im", "modulus", "period"});
    std::cout << "  j  |lambda|    period\n";
    for (const auto &row : table.rows) {
        if (row.size() < 3)
            throw ValidationError("periods: malformed row in " + eig.string());
        const spectral::cplx lambda(row[1], row[2]);
        const double period = spectral::period_or_infinity(lambda, s, dt);
        w.row({row[0], row[1], row[2], std::abs(lambda), period});
        char line[96];
        std::snprintf(line, sizeof line, "%3d  %-11s %s\n", static_cast<int>(row[0]),
                      fmt(std::abs(lambda)).c_str(), fmt(period).c_str());
        std::cout << line;
    }
    std::cout << "wrote " << out.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Trend and cycle extraction with delay-embedded transfer operators"};
    app.require_subcommand(1);

    Overrides synth_o, analyze_o, recon_o;
    std::vector<int> indices;
    std::string target;
    std::string periods_from;

    auto *synth = app.add_subcommand("synth", "Simulate a synthetic model and write its series");
    add_model_flags(synth, synth_o);

    auto *analyze = app.add_subcommand("analyze", "Build the operator and report its spectrum");
    add_analysis_flags(analyze, analyze_o);

    auto *recon = app.add_subcommand("reconstruct", "Project a series onto selected modes");
    add_analysis_flags(recon, recon_o);
    recon->add_option("--indices", indices, "1-based mode indices")->delimiter(',')->required();
    recon->add_option("--target", target, "Series to project (default: the analysed input)")
        ->check(CLI::ExistingFile);

    auto *periods = app.add_subcommand("periods", "Re-emit periods from an eigenvalue table");
    periods->add_option("--from,--out", periods_from, "Directory written by analyze");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*synth) return cmd_synth(synth_o);
        if (*analyze) return cmd_analyze(analyze_o);
        if (*recon) return cmd_reconstruct(recon_o, indices, target);
        if (*periods) return cmd_periods(periods_from);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
