#pragma once

// Experiment drivers behind the command-line tool: single trajectories,
// channel reconstruction, oracle comparison, bath export and sweeps.
// Times handed out by the drivers are in rescaled units (see SimConfig::time_unit).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mce/baths.hpp"
#include "mce/channels.hpp"
#include "mce/config.hpp"
#include "mce/dynamics.hpp"
#include "mce/oracle.hpp"

namespace mce {

inline Bath make_bath(const SimConfig& cfg) {
    if (cfg.bath_from_file) {
        std::ifstream in(cfg.bath_file);
        if (!in) throw ConfigError("cannot open bath file '" + cfg.bath_file + "'");
        return read_bath(in);
    }
    return build_bath(cfg.bath, cfg.g1, cfg.g2);
}

inline HamiltonianSpec make_spec(const SimConfig& cfg) {
    const Bath bath = make_bath(cfg);
    HamiltonianSpec s;
    s.variant = cfg.variant;
    s.epsilon = cfg.epsilon;
    s.delta = {cfg.delta1, cfg.delta2};
    s.frequencies = bath.frequencies;
    s.couplings = bath.couplings;
    s.pauli_plus = cfg.pauli_plus;
    s.validate();
    return s;
}

/// Integrator and time grid converted from rescaled to physical time.
inline IntegratorConfig physical_integrator(const SimConfig& cfg) {
    IntegratorConfig ic = cfg.integrator;
    ic.dt /= cfg.time_unit();
    return ic;
}

inline TimeGrid physical_time(const SimConfig& cfg) {
    TimeGrid tg = cfg.time;
    tg.t_max /= cfg.time_unit();
    return tg;
}

inline McEEvolver make_evolver(const SimConfig& cfg) {
    GridInit grid = cfg.grid;
    grid.seed = cfg.seed;
    return McEEvolver(make_spec(cfg), grid, physical_integrator(cfg), physical_time(cfg));
}

inline ThermalSampler make_sampler(const SimConfig& cfg, const HamiltonianSpec& spec) {
    ThermalSampler s;
    s.beta = cfg.temperature.beta;
    s.frequencies = spec.frequencies;
    s.n_samples = cfg.temperature.n_samples;
    s.seed = cfg.seed;
    return s;
}

inline QubitAmplitudes initial_qubit(const SimConfig& cfg) {
    if (cfg.initial_amplitudes.empty()) return basis_amplitudes(QubitBasisIndex(cfg.initial_state));
    QubitAmplitudes q;
    for (int l = 0; l < 4; ++l) q(l) = cplx(cfg.initial_amplitudes[2 * l], cfg.initial_amplitudes[2 * l + 1]);
    const double norm = q.norm();
    if (!(norm > 0.0)) throw ConfigError("initial.amplitudes are all zero");
    return q / norm;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateResult {
    Trajectory trajectory;  // times rescaled
    DivergenceReport divergence;
    double init_residual = 0.0;
    double init_condition = 1.0;
};

inline SimulateResult run_simulate(const SimConfig& cfg) {
    const HamiltonianSpec spec = make_spec(cfg);
    CoherentVector field = CoherentVector::Zero(spec.modes());
    if (!cfg.temperature.zero_temperature()) field = sample_thermal_one(make_sampler(cfg, spec), 0);
    GridInit grid = cfg.grid;
    grid.seed = cfg.seed;
    const IntegratorConfig ic = physical_integrator(cfg);
    const GridInitResult init = init_grid(grid, initial_qubit(cfg), field, 0, ic.gram_reg);
    SimulateResult r;
    r.init_residual = init.residual;
    r.init_condition = init.condition;
    r.trajectory = McEPropagator(spec, ic).propagate(init.state, physical_time(cfg));
    for (auto& p : r.trajectory.points) p.t *= cfg.time_unit();
    r.trajectory.last_good_time *= cfg.time_unit();
    r.divergence = detect_divergence(r.trajectory.points, cfg.divergence_tol);
    return r;
}

// ---------------------------------------------------------------------------
// channel

struct ChannelResult {
    ChannelSeries series;  // times rescaled
    std::vector<double> fidelity;
    std::vector<double> concurrence4;  // output of |4><4|
    std::vector<double> concurrence2;  // output of |2><2|
    InitialPeak peak;
    DivergenceReport divergence;  // on the input-averaged norm and energy
};

inline double output_concurrence(const QuantumChannel4& ch, int label) {
    const QubitAmplitudes b = basis_amplitudes(QubitBasisIndex(label));
    return concurrence(ch.apply(b * b.adjoint())).value;
}

inline ChannelResult analyse_channels(ChannelSeries series, double tol) {
    ChannelResult r;
    r.series = std::move(series);
    r.fidelity = r.series.fidelities();
    std::vector<TrajectoryPoint> avg;
    for (std::size_t k = 0; k < r.series.channels.size(); ++k) {
        r.concurrence4.push_back(output_concurrence(r.series.channels[k], 4));
        r.concurrence2.push_back(output_concurrence(r.series.channels[k], 2));
        TrajectoryPoint p;
        p.t = r.series.times[k];
        p.norm = r.series.norm_mean[k];
        p.energy = r.series.energy_mean[k];
        avg.push_back(p);
    }
    r.peak = find_initial_peak(r.series.times, r.fidelity);
    r.divergence = detect_divergence(avg, tol);
    return r;
}

inline ChannelResult run_channel(const SimConfig& cfg, unsigned threads = 1) {
    const McEEvolver ev = make_evolver(cfg);
    ChannelSeries s;
    if (cfg.temperature.zero_temperature())
        s = reconstruct_channels(ev, CoherentVector::Zero(ev.spec().modes()), cfg.tomography, 0, threads);
    else
        s = thermal_channels(ev, make_sampler(cfg, ev.spec()), cfg.tomography, threads);
    for (double& t : s.times) t *= cfg.time_unit();
    return analyse_channels(std::move(s), cfg.divergence_tol);
}

// ---------------------------------------------------------------------------
// oracle-compare

struct OracleCompareResult {
    std::string oracle;  // "sector" or "fock"
    ChannelResult mce;
    std::vector<double> oracle_fidelity;
    InitialPeak oracle_peak;
    double max_deviation = 0.0;  // over [0, first oracle trough]
    double max_deviation_all = 0.0;
    bool pass = false;
};

inline OracleKind resolve_oracle(const SimConfig& cfg, const HamiltonianSpec& spec) {
    if (!cfg.temperature.zero_temperature())
        throw UnsupportedRegimeError("oracle comparison needs zero temperature (temperature.beta = inf)");
    const bool sector_ok = spec.variant == Variant::RotatingWave && spec.delta[0] == 0.0 && spec.delta[1] == 0.0;
    switch (cfg.oracle.kind) {
    case OracleKind::Sector:
        if (!sector_ok)
            throw UnsupportedRegimeError("sector oracle needs hamiltonian.variant = rwa and delta1 = delta2 = 0");
        return OracleKind::Sector;
    case OracleKind::Fock: return OracleKind::Fock;
    default: return sector_ok ? OracleKind::Sector : OracleKind::Fock;
    }
}

inline OracleCompareResult run_oracle_compare(const SimConfig& cfg, unsigned threads = 1) {
    const McEEvolver ev = make_evolver(cfg);
    const HamiltonianSpec& spec = ev.spec();
    const OracleKind kind = resolve_oracle(cfg, spec);
    const CoherentVector vacuum = CoherentVector::Zero(spec.modes());
    const std::vector<double> times = ev.output_times();

    ChannelSeries oracle_series;
    OracleCompareResult r;
    if (kind == OracleKind::Sector) {
        r.oracle = "sector";
        oracle_series = reconstruct_channels(RwaSectorSolver(spec, times), vacuum, Tomography::Full);
    } else {
        r.oracle = "fock";
        FockTruncation tr;
        tr.n_max = cfg.oracle.n_max;
        tr.modes = static_cast<int>(spec.modes());
        if (cfg.oracle.total_cap >= 0) tr.total_cap = cfg.oracle.total_cap;
        oracle_series = reconstruct_channels(FockEvolver(spec, tr, times), vacuum, Tomography::Full);
    }
    ChannelSeries s = reconstruct_channels(ev, vacuum, cfg.tomography, 0, threads);
    for (double& t : s.times) t *= cfg.time_unit();
    for (double& t : oracle_series.times) t *= cfg.time_unit();
    r.mce = analyse_channels(std::move(s), cfg.divergence_tol);
    r.oracle_fidelity = oracle_series.fidelities();
    r.oracle_peak = find_initial_peak(oracle_series.times, r.oracle_fidelity);

    const std::size_t len = std::min(r.mce.fidelity.size(), r.oracle_fidelity.size());
    for (std::size_t k = 0; k < len; ++k) {
        const double d = std::abs(r.mce.fidelity[k] - r.oracle_fidelity[k]);
        if (k <= r.oracle_peak.trough_index) r.max_deviation = std::max(r.max_deviation, d);
        r.max_deviation_all = std::max(r.max_deviation_all, d);
    }
    const bool covered = len > r.oracle_peak.trough_index;
    r.pass = covered && !r.mce.series.failed && r.max_deviation < cfg.oracle.bound;
    return r;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepPoint {
    double value = 0.0;
    ChannelResult result;
};

inline std::vector<SweepPoint> run_sweep(const SimConfig& cfg, unsigned threads = 1) {
    if (cfg.sweep.parameter.empty()) throw ConfigError("sweep needs sweep.parameter and sweep.values");
    std::vector<SweepPoint> out;
    for (double v : cfg.sweep.values) out.push_back({v, run_channel(with_sweep_value(cfg, cfg.sweep.parameter, v), threads)});
    return out;
}

// ---------------------------------------------------------------------------
// Writers

namespace detail {

inline std::string fmt17(double v) { return format_double(v); }

inline void write_row(std::ostream& os, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << fmt17(values[i]);
    os << '\n';
}

} // namespace detail

inline void write_simulate_csv(std::ostream& os, const SimConfig& cfg, const SimulateResult& r) {
    write_config_header(os, cfg);
    os << "t,norm,energy";
    for (int l = 1; l <= 4; ++l)
        for (int n = 1; n <= 4; ++n) os << ",rho_" << l << n << "_re,rho_" << l << n << "_im";
    os << '\n';
    for (const auto& p : r.trajectory.points) {
        std::vector<double> row{p.t, p.norm, p.energy};
        for (int l = 0; l < 4; ++l)
            for (int n = 0; n < 4; ++n) {
                row.push_back(p.rho(l, n).real());
                row.push_back(p.rho(l, n).imag());
            }
        detail::write_row(os, row);
    }
    os << "# init_residual = " << detail::fmt17(r.init_residual) << '\n';
    if (r.trajectory.failed)
        os << "# failed at t = " << detail::fmt17(r.trajectory.last_good_time) << ": " << r.trajectory.failure << '\n';
    if (r.divergence.diverged)
        os << "# diverged at t = " << detail::fmt17(r.divergence.time) << " (tol " << detail::fmt17(cfg.divergence_tol)
           << ")\n";
}

inline void write_channel_csv(std::ostream& os, const SimConfig& cfg, const ChannelResult& r) {
    write_config_header(os, cfg);
    const bool thermal = !r.series.fidelity_stderr.empty();
    os << "t,F,C_from_state_4,C_from_state_2,norm_mean,energy_mean" << (thermal ? ",F_stderr" : "") << '\n';
    for (std::size_t k = 0; k < r.fidelity.size(); ++k) {
        std::vector<double> row{r.series.times[k], r.fidelity[k], r.concurrence4[k], r.concurrence2[k],
                                r.series.norm_mean[k], r.series.energy_mean[k]};
        if (thermal) row.push_back(r.series.fidelity_stderr[k]);
        detail::write_row(os, row);
    }
    os << "# peak F = " << detail::fmt17(r.peak.peak_value) << " at t = " << detail::fmt17(r.peak.peak_time) << '\n';
    if (r.series.failed) os << "# failed: " << r.series.failure << '\n';
    if (r.divergence.diverged)
        os << "# diverged at t = " << detail::fmt17(r.divergence.time) << " (tol " << detail::fmt17(cfg.divergence_tol)
           << ")\n";
}

/// Choi matrix (16 x 16, index 4a + j), one block per output time.
inline void write_channel_dump(std::ostream& os, const SimConfig& cfg, const ChannelResult& r) {
    for (std::size_t k = 0; k < r.series.channels.size(); ++k) {
        os << "channel t=" << detail::fmt17(r.series.times[k]) << " beta=" << detail::fmt17(cfg.temperature.beta) << '\n';
        const auto choi = r.series.channels[k].choi();
        for (Eigen::Index i = 0; i < choi.rows(); ++i) {
            for (Eigen::Index j = 0; j < choi.cols(); ++j)
                os << (j ? " " : "") << detail::fmt17(choi(i, j).real()) << ' ' << detail::fmt17(choi(i, j).imag());
            os << '\n';
        }
    }
}

inline void write_oracle_csv(std::ostream& os, const SimConfig& cfg, const OracleCompareResult& r) {
    write_config_header(os, cfg);
    os << "t,F_mce,F_oracle,abs_dF\n";
    const std::size_t len = std::min(r.mce.fidelity.size(), r.oracle_fidelity.size());
    for (std::size_t k = 0; k < len; ++k)
        detail::write_row(os, {r.mce.series.times[k], r.mce.fidelity[k], r.oracle_fidelity[k],
                               std::abs(r.mce.fidelity[k] - r.oracle_fidelity[k])});
    os << "# oracle = " << r.oracle << '\n';
    os << "# window end (first oracle trough) t = " << detail::fmt17(r.oracle_peak.trough_time) << '\n';
    os << "# max |dF| in window = " << detail::fmt17(r.max_deviation) << ", overall = "
       << detail::fmt17(r.max_deviation_all) << '\n';
    os << "# " << (r.pass ? "PASS" : "FAIL") << " (bound " << detail::fmt17(cfg.oracle.bound) << ")\n";
}

inline void write_sweep_summary(std::ostream& os, const SimConfig& cfg, const std::vector<SweepPoint>& points) {
    write_config_header(os, cfg);
    os << cfg.sweep.parameter << ",peak_F,peak_t,trough_t,max_F,F_stderr_at_peak,failed\n";
    for (const auto& p : points) {
        double max_f = 0.0;
        for (double f : p.result.fidelity) max_f = std::max(max_f, f);
        const auto& se = p.result.series.fidelity_stderr;
        const double err = se.empty() ? 0.0 : se[p.result.peak.peak_index];
        detail::write_row(os, {p.value, p.result.peak.peak_value, p.result.peak.peak_time, p.result.peak.trough_time,
                               max_f, err, p.result.series.failed ? 1.0 : 0.0});
    }
}

} // namespace mce
