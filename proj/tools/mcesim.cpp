// mcesim: command-line driver for MCE two-qubit channel simulations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mce/drivers.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "config file (key = value lines)");
    cmd->add_option("--set", o.overrides, "override a config key, key=value (repeatable)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "RNG seed (overrides the config)");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

mce::SimConfig load(const CommonOptions& o) {
    mce::KeyValues kv;
    if (!o.config_path.empty()) kv = mce::read_key_values(o.config_path);
    for (const auto& s : o.overrides) mce::apply_override(kv, s);
    if (o.seed) kv["seed"] = std::to_string(*o.seed);
    return mce::config_from_key_values(kv);
}

std::ofstream open_out(const CommonOptions& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    const fs::path p = fs::path(o.out_dir) / name;
    std::ofstream out(p);
    if (!out) throw mce::Error("cannot write " + p.string());
    std::cout << "wrote " << p.string() << '\n';
    return out;
}

std::string g17(double v) { return mce::detail::format_double(v); }

int cmd_simulate(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto r = mce::run_simulate(cfg);
    auto out = open_out(o, "simulate.csv");
    mce::write_simulate_csv(out, cfg, r);
    if (r.trajectory.failed)
        std::cout << "step failure at t=" << g17(r.trajectory.last_good_time) << ": " << r.trajectory.failure << '\n';
    if (r.divergence.diverged)
        std::cout << "diagnostics diverged at t=" << g17(r.divergence.time) << '\n';
    else
        std::cout << "max |norm-1| = " << g17(r.divergence.max_norm_error)
                  << ", max energy drift = " << g17(r.divergence.max_energy_drift) << '\n';
    return r.trajectory.failed ? 1 : 0;
}

void report_channel(const mce::ChannelResult& r) {
    std::cout << "initial peak F = " << g17(r.peak.peak_value) << " at t = " << g17(r.peak.peak_time) << '\n';
    if (r.series.failed) std::cout << "trajectory failure: " << r.series.failure << '\n';
    if (r.divergence.diverged) std::cout << "diagnostics diverged at t=" << g17(r.divergence.time) << '\n';
}

int cmd_channel(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto r = mce::run_channel(cfg, o.threads);
    {
        auto out = open_out(o, "channel.csv");
        mce::write_channel_csv(out, cfg, r);
    }
    if (cfg.dump_channels) {
        auto out = open_out(o, "channels.txt");
        mce::write_channel_dump(out, cfg, r);
    }
    report_channel(r);
    return r.series.failed ? 1 : 0;
}

int cmd_oracle(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto r = mce::run_oracle_compare(cfg, o.threads);
    auto out = open_out(o, "oracle_compare.csv");
    mce::write_oracle_csv(out, cfg, r);
    std::cout << "oracle " << r.oracle << ": max |dF| = " << g17(r.max_deviation) << " up to t = "
              << g17(r.oracle_peak.trough_time) << " (bound " << g17(cfg.oracle.bound) << ") "
              << (r.pass ? "PASS" : "FAIL") << '\n';
    return r.pass ? 0 : 1;
}

int cmd_bath(const CommonOptions& o) {
    const auto cfg = load(o);
    auto out = open_out(o, "bath.txt");
    mce::write_bath(out, mce::make_bath(cfg));
    return 0;
}

int cmd_sweep(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto points = mce::run_sweep(cfg, o.threads);
    for (const auto& p : points) {
        const auto one = mce::with_sweep_value(cfg, cfg.sweep.parameter, p.value);
        auto out = open_out(o, "sweep_" + cfg.sweep.parameter + "_" + g17(p.value) + ".csv");
        mce::write_channel_csv(out, one, p.result);
    }
    {
        auto out = open_out(o, "sweep_summary.csv");
        mce::write_sweep_summary(out, cfg, points);
    }
    const mce::SweepPoint* best = nullptr;
    for (const auto& p : points) {
        std::cout << cfg.sweep.parameter << " = " << g17(p.value) << ": peak F = " << g17(p.result.peak.peak_value)
                  << " at t = " << g17(p.result.peak.peak_time) << '\n';
        if (!best || p.result.peak.peak_value > best->result.peak.peak_value) best = &p;
    }
    if (best) std::cout << "argmax " << cfg.sweep.parameter << " = " << g17(best->value) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MCE simulator for two qubits coupled to bosonic modes"};
    app.require_subcommand(1);
    CommonOptions opts;
    struct Entry {
        const char* name;
        const char* help;
        int (*fn)(const CommonOptions&);
    };
    const Entry entries[] = {
        {"simulate", "single trajectory: norm, energy and reduced state", cmd_simulate},
        {"channel", "channel reconstruction: Choi fidelity and concurrence", cmd_channel},
        {"oracle-compare", "MCE fidelity against an exact propagator", cmd_oracle},
        {"bath", "write the mode frequencies and couplings", cmd_bath},
        {"sweep", "channel runs over sweep.values of sweep.parameter", cmd_sweep},
    };
    int (*chosen)(const CommonOptions&) = nullptr;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_common(sub, opts);
        sub->callback([&chosen, fn = e.fn] { chosen = fn; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        return chosen(opts);
    } catch (const mce::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const mce::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
