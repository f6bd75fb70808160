#pragma once

// Two-qubit channel tomography from trajectory backends, CZ Choi fidelity,
// Wootters concurrence and thermal (P-representation) averaging.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mce/dynamics.hpp"
#include "mce/errors.hpp"
#include "mce/hilbert.hpp"
#include "mce/parallel.hpp"
#include "mce/rng.hpp"

namespace mce {

using ChoiMatrix = Eigen::Matrix<cplx, 16, 16>;

/// action[j][k] = Gamma(|j><k|) (0-based rows).
///
/// A symmetrized channel only knows Gamma(|j><k|) + Gamma(|k><j|); it stores
/// half of that sum in both slots.
struct QuantumChannel4 {
    std::array<std::array<Eigen::Matrix4cd, 4>, 4> action{};
    bool symmetrized = false;

    static QuantumChannel4 zero() {
        QuantumChannel4 ch;
        for (auto& row : ch.action)
            for (auto& m : row) m.setZero();
        return ch;
    }

    static QuantumChannel4 identity() { return from_unitary(Eigen::Matrix4cd::Identity()); }

    static QuantumChannel4 from_unitary(const Eigen::Matrix4cd& u) {
        QuantumChannel4 ch;
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) ch.action[j][k] = u.col(j) * u.col(k).adjoint();
        return ch;
    }

    Eigen::Matrix4cd apply(const Eigen::Matrix4cd& x) const {
        Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) out += x(j, k) * action[j][k];
        return out;
    }

    /// (1/4) sum_jk Gamma(|j><k|) (x) |j><k|.
    ChoiMatrix choi() const {
        ChoiMatrix c = ChoiMatrix::Zero();
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) c(4 * a + j, 4 * b + k) = 0.25 * action[j][k](a, b);
        return c;
    }

    QuantumChannel4& operator+=(const QuantumChannel4& o) {
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) action[j][k] += o.action[j][k];
        return *this;
    }
    QuantumChannel4& operator*=(double s) {
        for (auto& row : action)
            for (auto& m : row) m *= s;
        return *this;
    }
};

inline QuantumChannel4 cz_channel() {
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
    u(3, 3) = -1.0;
    return QuantumChannel4::from_unitary(u);
}

/// Full: 4 basis + 6 (|j>+|k>)/sqrt2 + 6 (|j>+i|k>)/sqrt2 inputs.
/// Symmetric: the first 10 only.
enum class Tomography { Full, Symmetric };

struct TomographyInput {
    QubitAmplitudes amplitudes;
    std::string label;
};

inline std::vector<TomographyInput> tomography_inputs(Tomography mode) {
    std::vector<TomographyInput> out;
    for (int j = 0; j < 4; ++j) out.push_back({basis_amplitudes(QubitBasisIndex(j + 1)), "|" + std::to_string(j + 1) + ">"});
    const double s = 1.0 / std::sqrt(2.0);
    auto pairs = [&](cplx phase, const std::string& tag) {
        for (int j = 0; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                QubitAmplitudes a = QubitAmplitudes::Zero();
                a(j) = s;
                a(k) = s * phase;
                out.push_back({a, "(|" + std::to_string(j + 1) + ">" + tag + "|" + std::to_string(k + 1) + ">)/sqrt2"});
            }
    };
    pairs(1.0, "+");
    if (mode == Tomography::Full) pairs(I, "+i");
    return out;
}

/// Assemble a channel from the reduced outputs of tomography_inputs(mode), in order.
inline QuantumChannel4 channel_from_outputs(Tomography mode, const std::vector<DensityMatrix4>& outputs) {
    const std::size_t expected = mode == Tomography::Full ? 16 : 10;
    if (outputs.size() != expected) throw DimensionError("channel_from_outputs: wrong number of outputs");
    QuantumChannel4 ch = QuantumChannel4::zero();
    ch.symmetrized = mode == Tomography::Symmetric;
    for (int j = 0; j < 4; ++j) ch.action[j][j] = outputs[static_cast<std::size_t>(j)];
    std::size_t p = 4;
    std::array<std::array<std::size_t, 4>, 4> plus_index{};
    for (int j = 0; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k) plus_index[j][k] = p++;
    for (int j = 0; j < 4; ++j)
        for (int k = j + 1; k < 4; ++k) {
            // S = Gamma(jk + kj), T = Gamma(i kj - i jk)
            const Eigen::Matrix4cd sym = 2.0 * outputs[plus_index[j][k]] - ch.action[j][j] - ch.action[k][k];
            if (mode == Tomography::Symmetric) {
                ch.action[j][k] = 0.5 * sym;
                ch.action[k][j] = 0.5 * sym;
            } else {
                const Eigen::Matrix4cd anti = 2.0 * outputs[plus_index[j][k] + 6] - ch.action[j][j] - ch.action[k][k];
                ch.action[j][k] = 0.5 * (sym + I * anti);
                ch.action[k][j] = 0.5 * (sym - I * anti);
            }
        }
    return ch;
}

struct ChoiFidelity {
    double value = 0.0;
    double imaginary = 0.0;  // residue of the discarded imaginary part
};

/// <phi_CZ| rho_Gamma |phi_CZ> = (1/16) sum_jk f(j) f(k) <j|Gamma(|j><k|)|k>.
/// For symmetrized channels the off-diagonal part is estimated from the
/// Hermitian combination, exact whenever <j|Gamma(|k><j|)|k> = 0.
inline ChoiFidelity choi_fidelity(const QuantumChannel4& ch) {
    cplx sum = 0.0;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            const double weight = (ch.symmetrized && j != k) ? 2.0 : 1.0;
            sum += weight * cz_sign(j) * cz_sign(k) * ch.action[j][k](j, k);
        }
    sum /= 16.0;
    return {sum.real(), sum.imag()};
}

struct ConcurrenceResult {
    double value = 0.0;
    double raw_trace = 1.0;
    double min_eigenvalue = 0.0;
    bool physical = true;
};

/// Wootters concurrence of rho / Tr(rho).
inline ConcurrenceResult concurrence(const DensityMatrix4& rho_in, double tol = 1e-8) {
    ConcurrenceResult r;
    r.raw_trace = rho_in.trace().real();
    if (!(r.raw_trace > 0.0)) {
        r.physical = false;
        return r;
    }
    DensityMatrix4 rho = rho_in / r.raw_trace;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<DensityMatrix4> es(rho);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.physical = r.min_eigenvalue >= -tol;

    const Eigen::Vector4d clipped = es.eigenvalues().cwiseMax(0.0);
    const DensityMatrix4 sqrt_rho = es.eigenvectors() * clipped.cwiseSqrt().cast<cplx>().asDiagonal() *
                                    es.eigenvectors().adjoint();
    DensityMatrix4 yy = DensityMatrix4::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const DensityMatrix4 tilde = yy * rho.conjugate() * yy;
    DensityMatrix4 m = sqrt_rho * tilde * sqrt_rho;
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<DensityMatrix4> es2(m, Eigen::EigenvaluesOnly);
    Eigen::Vector4d lam = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(lam.data(), lam.data() + 4, std::greater<>());
    r.value = std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
    return r;
}

// ---------------------------------------------------------------------------
// Thermal sampling

struct ThermalSampler {
    double beta = 10.0;
    Eigen::VectorXd frequencies;
    int n_samples = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(beta > 0.0)) throw ConfigError("temperature.beta must be > 0");
        if (n_samples < 1) throw ConfigError("temperature.n_samples must be >= 1");
        if (frequencies.size() < 1) throw DimensionError("ThermalSampler: no modes");
    }

    /// Bose occupation 1/(exp(beta w) - 1) of every mode.
    Eigen::VectorXd occupations() const {
        Eigen::VectorXd n(frequencies.size());
        for (Eigen::Index m = 0; m < n.size(); ++m) {
            if (!(frequencies(m) > 0.0))
                throw DomainError("thermal occupation diverges for a zero-frequency mode");
            n(m) = 1.0 / std::expm1(beta * frequencies(m));
        }
        return n;
    }
};

/// Draw from the P-function of the thermal state; sample i uses stream (seed, i).
inline CoherentVector sample_thermal_one(const ThermalSampler& sampler, std::uint64_t index) {
    const Eigen::VectorXd occ = sampler.occupations();
    RandomStream rng(sampler.seed ^ 0x7468726d616cULL, index);
    CoherentVector a(occ.size());
    for (Eigen::Index m = 0; m < a.size(); ++m) a(m) = rng.complex_normal(std::sqrt(0.5 * occ(m)));
    return a;
}

inline std::vector<CoherentVector> sample_thermal(const ThermalSampler& sampler) {
    sampler.validate();
    std::vector<CoherentVector> out;
    out.reserve(static_cast<std::size_t>(sampler.n_samples));
    for (int i = 0; i < sampler.n_samples; ++i) out.push_back(sample_thermal_one(sampler, static_cast<std::uint64_t>(i)));
    return out;
}

// ---------------------------------------------------------------------------
// Reconstruction drivers

/// Channels on a common time grid with per-time mean diagnostics over the inputs.
struct ChannelSeries {
    std::vector<double> times;
    std::vector<QuantumChannel4> channels;
    std::vector<double> norm_mean;
    std::vector<double> energy_mean;
    std::vector<double> fidelity_stderr;  // thermal runs: standard error of F over samples
    bool failed = false;
    std::string failure;

    std::vector<double> fidelities() const {
        std::vector<double> f;
        f.reserve(channels.size());
        for (const auto& c : channels) f.push_back(choi_fidelity(c).value);
        return f;
    }
};

/// Evolves every tomography input through `evolver` (signature
/// Trajectory(const QubitAmplitudes&, const CoherentVector&, std::uint64_t))
/// and assembles the channel at each output time. If a trajectory stops early
/// the series is cut at the last time all inputs reached.
template <class Evolver>
ChannelSeries reconstruct_channels(const Evolver& evolver, const CoherentVector& field, Tomography mode = Tomography::Full,
                                   std::uint64_t stream = 0, unsigned threads = 1) {
    const auto inputs = tomography_inputs(mode);
    std::vector<Trajectory> runs(inputs.size());
    parallel_for(inputs.size(), threads, [&](std::size_t i) {
        try {
            runs[i] = evolver(inputs[i].amplitudes, field, stream);
        } catch (const Error& e) {
            throw Error("trajectory for input " + inputs[i].label + " failed: " + e.what());
        }
    });
    ChannelSeries out;
    std::size_t len = runs.front().points.size();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        len = std::min(len, runs[i].points.size());
        if (runs[i].failed && !out.failed) {
            out.failed = true;
            out.failure = "input " + inputs[i].label + ": " + runs[i].failure;
        }
    }
    for (std::size_t t = 0; t < len; ++t) {
        std::vector<DensityMatrix4> outs;
        double norm = 0.0, energy = 0.0;
        for (const auto& r : runs) {
            outs.push_back(r.points[t].rho);
            norm += r.points[t].norm;
            energy += r.points[t].energy;
        }
        out.times.push_back(runs.front().points[t].t);
        out.channels.push_back(channel_from_outputs(mode, outs));
        out.norm_mean.push_back(norm / static_cast<double>(runs.size()));
        out.energy_mean.push_back(energy / static_cast<double>(runs.size()));
    }
    return out;
}

template <class Evolver>
QuantumChannel4 reconstruct_channel(const Evolver& evolver, const CoherentVector& field, double t,
                                    Tomography mode = Tomography::Full) {
    const ChannelSeries s = reconstruct_channels(evolver, field, mode);
    for (std::size_t k = 0; k < s.times.size(); ++k)
        if (std::abs(s.times[k] - t) < 1e-9 * std::max(1.0, std::abs(t))) return s.channels[k];
    throw Error("reconstruct_channel: time " + std::to_string(t) + " is not on the backend output grid");
}

/// Uniform average of the zero-temperature reconstruction over sampled fields.
/// Sample i uses field stream i and grid stream i.
template <class Evolver>
ChannelSeries thermal_channels(const Evolver& evolver, const ThermalSampler& sampler, Tomography mode = Tomography::Full,
                               unsigned threads = 1) {
    sampler.validate();
    const auto n = static_cast<std::size_t>(sampler.n_samples);
    std::vector<ChannelSeries> parts(n);
    parallel_for(n, threads, [&](std::size_t i) {
        parts[i] = reconstruct_channels(evolver, sample_thermal_one(sampler, i), mode, i, 1);
    });
    std::size_t len = parts.front().channels.size();
    for (const auto& p : parts) len = std::min(len, p.channels.size());
    ChannelSeries out;
    for (const auto& p : parts)
        if (p.failed && !out.failed) {
            out.failed = true;
            out.failure = p.failure;
        }
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t t = 0; t < len; ++t) {
        double sum = 0.0, sum2 = 0.0;
        for (const auto& p : parts) {
            const double f = choi_fidelity(p.channels[t]).value;
            sum += f;
            sum2 += f * f;
        }
        const double mean = sum * inv;
        const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / static_cast<double>(n - 1)) : 0.0;
        out.fidelity_stderr.push_back(std::sqrt(var * inv));

        QuantumChannel4 avg = QuantumChannel4::zero();
        avg.symmetrized = mode == Tomography::Symmetric;
        double norm = 0.0, energy = 0.0;
        for (const auto& p : parts) {
            avg += p.channels[t];
            norm += p.norm_mean[t];
            energy += p.energy_mean[t];
        }
        avg *= inv;
        out.times.push_back(parts.front().times[t]);
        out.channels.push_back(avg);
        out.norm_mean.push_back(norm * inv);
        out.energy_mean.push_back(energy * inv);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trace analysis

struct InitialPeak {
    std::size_t peak_index = 0;
    std::size_t trough_index = 0;
    double peak_time = 0.0;
    double peak_value = 0.0;
    double trough_time = 0.0;
    bool complete = false;  // a trough was found after the peak
};

/// First maximum above `floor` that is followed by a fall of at least `drop`;
/// the trough is the minimum before the trace recovers by `drop` again.
/// Without such a fall the global maximum is returned.
inline InitialPeak find_initial_peak(const std::vector<double>& times, const std::vector<double>& values,
                                     double floor = 0.25, double drop = 0.05) {
    InitialPeak p;
    if (values.empty()) return p;
    std::size_t best = 0;
    bool armed = false;
    std::size_t k = 0;
    for (; k < values.size(); ++k) {
        if (values[k] > values[best]) best = k;
        if (values[k] > floor + drop) armed = true;
        if (armed && values[best] - values[k] > drop) break;
    }
    p.peak_index = best;
    p.peak_value = values[best];
    p.peak_time = times[best];
    if (k == values.size()) {
        p.trough_index = values.size() - 1;
        p.trough_time = times.back();
        return p;
    }
    std::size_t low = k;
    for (; k < values.size(); ++k) {
        if (values[k] < values[low]) low = k;
        if (values[k] - values[low] > drop) break;
    }
    p.trough_index = low;
    p.trough_time = times[low];
    p.complete = true;
    return p;
}

} // namespace mce
