#pragma once

// Multi-configurational Ehrenfest propagation.
//
// The wavefunction is sum_{l,j} c_{l,j} |l> (x) |z_j> with c_{l,j} = d_{l,j} exp(i S_j).
// Centers follow the amplitude-weighted mean field of their own configuration;
// amplitudes solve the Schroedinger equation projected on the moving grid:
//
//   i Omega' d' = R_H + Omega' diag(S') D - i (Omega' o T) D
//   T_jk = z_j^H z_k' - Re(z_k^H z_k')
//   S_k' = -Im(z_k^H z_k') - E_k        (E_k: mean-field energy of config k)
//
// where Omega'_jk = exp(-i S_j) <z_j|z_k> exp(i S_k) and
// R_H[j,l] = sum_k Omega'_jk sum_h H~^{lh}_{jk} d_{h,k}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "mce/errors.hpp"
#include "mce/hamiltonian.hpp"
#include "mce/hilbert.hpp"
#include "mce/rng.hpp"

namespace mce {

enum class IntegratorMethod { RK4, RK45 };

struct IntegratorConfig {
    double dt = 0.01;
    IntegratorMethod method = IntegratorMethod::RK4;
    double abs_tol = 1e-8;
    double rel_tol = 1e-8;
    double gram_reg = 1e-10;

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("integrator.dt must be > 0");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("integrator tolerances must be > 0");
        if (!(gram_reg >= 0.0 && gram_reg <= 1e-3)) throw ConfigError("integrator.gram_reg must lie in [0, 1e-3]");
    }
};

struct GridInit {
    int size = 1;            // N
    double comp = 1.0;       // sampling width is 1/comp per quadrature
    bool conjugate_pairs = false;
    std::uint64_t seed = 0;

    void validate() const {
        if (size < 1) throw ConfigError("grid.N must be >= 1");
        if (!(comp > 0.0)) throw ConfigError("grid.comp must be > 0");
    }
};

/// Configurations with amplitude norm^2 below this have their centers frozen.
inline constexpr double kDegenerateNorm2 = 1e-14;

struct GramSolution {
    Eigen::MatrixXcd x;
    double rcond = 1.0;
    bool regularized = false;
};

/// Solve Omega x = rhs for Hermitian PSD Omega. A Tikhonov shift
/// gram_reg * tr(Omega)/N is added once the reciprocal condition estimate
/// drops below gram_reg.
inline GramSolution solve_gram(const Eigen::MatrixXcd& omega, const Eigen::MatrixXcd& rhs, double gram_reg) {
    GramSolution out;
    Eigen::LLT<Eigen::MatrixXcd> llt(omega);
    out.rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (llt.info() == Eigen::Success && out.rcond >= gram_reg && out.rcond > 1e-300) {
        out.x = llt.solve(rhs);
        return out;
    }
    if (gram_reg <= 0.0) throw GramSolveError("Gram matrix singular and regularization disabled", out.rcond);
    const double n = static_cast<double>(omega.rows());
    const double lambda = gram_reg * omega.trace().real() / n;
    Eigen::MatrixXcd shifted = omega;
    shifted.diagonal().array() += lambda;
    llt.compute(shifted);
    if (llt.info() != Eigen::Success) throw GramSolveError("regularized Gram factorization failed", out.rcond);
    out.x = llt.solve(rhs);
    out.regularized = true;
    if (!out.x.allFinite()) throw GramSolveError("regularized Gram solve produced non-finite values", out.rcond);
    return out;
}

struct Diagnostics {
    double norm = 0.0;
    double energy = 0.0;
};

struct McEDerivative {
    Eigen::MatrixXcd centers;     // M x N
    Eigen::MatrixXcd amplitudes;  // N x 4
    Eigen::VectorXd phases;       // N
};

/// Vectorized right-hand sides for a fixed Hamiltonian.
class McEKernel {
public:
    McEKernel(const HamiltonianSpec& spec, double gram_reg)
        : terms_(spec), gram_reg_(gram_reg), omega_c_(spec.frequencies.cast<cplx>()),
          g_(spec.couplings.cast<cplx>()) {
        qubit_t_ = terms_.qubit.transpose().cast<cplx>();
        for (std::size_t q = 0; q < 2; ++q) {
            ket_t_[q] = terms_.ket[q].transpose().cast<cplx>();
            bra_t_[q] = terms_.bra[q].transpose().cast<cplx>();
        }
    }

    const HamiltonianTerms& terms() const noexcept { return terms_; }

    /// dz/dt for every configuration (M x N).
    Eigen::MatrixXcd center_rates(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& d) const {
        check(z, d);
        const Eigen::VectorXd w = d.rowwise().squaredNorm();
        // rates = -i (w z + sum_q g_q conj<K_q>)
        Eigen::MatrixXcd drive = Eigen::MatrixXcd::Zero(2, z.cols());
        for (std::size_t q = 0; q < 2; ++q) {
            const Eigen::VectorXcd e = d.conjugate().cwiseProduct(d * ket_t_[q]).rowwise().sum();
            drive.row(static_cast<Eigen::Index>(q)) = e.conjugate().transpose();
        }
        for (Eigen::Index j = 0; j < z.cols(); ++j)
            if (w(j) >= kDegenerateNorm2) drive.col(j) /= w(j);
        Eigen::MatrixXcd rates = omega_c_.asDiagonal() * z;
        rates.noalias() += g_ * drive;
        rates *= -I;
        for (Eigen::Index j = 0; j < z.cols(); ++j)
            if (w(j) < kDegenerateNorm2) rates.col(j).setZero();
        return rates;
    }

    McEDerivative derivative(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& d, const Eigen::VectorXd& s) const {
        check(z, d);
        McEDerivative out;
        out.centers = center_rates(z, d);
        const Shared sh = shared(z, s);
        const Eigen::MatrixXcd p = z.adjoint() * out.centers;
        out.phases = phase_rates_impl(d, sh, p);
        out.amplitudes = amplitude_rates_impl(sh, p, d, out.phases);
        return out;
    }

    /// d'(N x 4) for given center and phase rates.
    Eigen::MatrixXcd amplitude_rates(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& d, const Eigen::VectorXd& s,
                                     const Eigen::MatrixXcd& z_dot, const Eigen::VectorXd& s_dot) const {
        check(z, d);
        if (z_dot.rows() != z.rows() || z_dot.cols() != z.cols())
            throw DimensionError("amplitude_rhs: center derivative shape mismatch");
        if (s.size() != z.cols() || s_dot.size() != z.cols()) throw DimensionError("amplitude_rhs: phase size mismatch");
        const Shared sh = shared(z, s);
        return amplitude_rates_impl(sh, z.adjoint() * z_dot, d, s_dot);
    }

    /// Phase rates S_k' = -Im(z_k^H z_k') - E_k for the given center rates.
    Eigen::VectorXd phase_rates(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& d,
                                const Eigen::MatrixXcd& z_dot) const {
        check(z, d);
        const Shared sh = shared(z, Eigen::VectorXd::Zero(z.cols()));
        return phase_rates_impl(d, sh, z.adjoint() * z_dot);
    }

    Diagnostics diagnostics(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& d, const Eigen::VectorXd& s) const {
        check(z, d);
        const Shared sh = shared(z, s);
        const Eigen::MatrixXcd od = sh.omega * d;
        const Eigen::MatrixXcd rh = hamiltonian_action(sh, od, d);
        Diagnostics out;
        out.norm = d.conjugate().cwiseProduct(od).sum().real();
        out.energy = d.conjugate().cwiseProduct(rh).sum().real();
        return out;
    }

private:
    struct Shared {
        Eigen::MatrixXcd omega;  // phased Gram matrix
        Eigen::MatrixXcd w;      // z_j^H diag(omega) z_k
        Eigen::MatrixXcd a;      // N x 2, sum_m z_mj g_mq
    };

    static void check(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& d) {
        if (d.rows() != z.cols() || d.cols() != kQubitDim) throw DimensionError("amplitudes must be N x 4");
    }

    Shared shared(const Eigen::MatrixXcd& z, const Eigen::VectorXd& s) const {
        Shared sh;
        const Eigen::Index n = z.cols();
        const Eigen::MatrixXcd inner = z.adjoint() * z;
        sh.omega.resize(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double hk = 0.5 * inner(k, k).real();
            for (Eigen::Index j = 0; j < n; ++j)
                sh.omega(j, k) = std::exp(inner(j, k) + cplx(-hk - 0.5 * inner(j, j).real(), s(k) - s(j)));
        }
        sh.w = z.adjoint() * (omega_c_.asDiagonal() * z);
        sh.a = z.transpose() * g_;
        return sh;
    }

    Eigen::VectorXd phase_rates_impl(const Eigen::MatrixXcd& d, const Shared& sh, const Eigen::MatrixXcd& p) const {
        const Eigen::MatrixXcd dc = d.conjugate();
        const Eigen::VectorXd w = d.rowwise().squaredNorm();
        Eigen::VectorXcd e = dc.cwiseProduct(d * qubit_t_).rowwise().sum();
        e += sh.w.diagonal().cwiseProduct(w.cast<cplx>());
        for (std::size_t q = 0; q < 2; ++q) {
            const auto qi = static_cast<Eigen::Index>(q);
            e += sh.a.col(qi).cwiseProduct(dc.cwiseProduct(d * ket_t_[q]).rowwise().sum());
            e += sh.a.col(qi).conjugate().cwiseProduct(dc.cwiseProduct(d * bra_t_[q]).rowwise().sum());
        }
        Eigen::VectorXd rates(d.rows());
        for (Eigen::Index k = 0; k < d.rows(); ++k) {
            const double energy = w(k) < kDegenerateNorm2 ? 0.0 : e(k).real() / w(k);
            rates(k) = -p(k, k).imag() - energy;
        }
        return rates;
    }

    Eigen::MatrixXcd hamiltonian_action(const Shared& sh, const Eigen::MatrixXcd& od, const Eigen::MatrixXcd& d) const {
        Eigen::MatrixXcd rh = od * qubit_t_;
        rh.noalias() += sh.omega.cwiseProduct(sh.w) * d;
        for (std::size_t q = 0; q < 2; ++q) {
            const auto qi = static_cast<Eigen::Index>(q);
            const Eigen::MatrixXcd ket_side = sh.omega * (sh.a.col(qi).asDiagonal() * d);
            rh.noalias() += ket_side * ket_t_[q];
            const Eigen::MatrixXcd bra_side = sh.a.col(qi).conjugate().asDiagonal() * od;
            rh.noalias() += bra_side * bra_t_[q];
        }
        return rh;
    }

    Eigen::MatrixXcd amplitude_rates_impl(const Shared& sh, const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& d,
                                          const Eigen::VectorXd& s_dot) const {
        Eigen::MatrixXcd t = p;
        for (Eigen::Index k = 0; k < t.cols(); ++k) t.col(k).array() -= p(k, k).real();
        const Eigen::MatrixXcd od = sh.omega * d;
        Eigen::MatrixXcd r = hamiltonian_action(sh, od, d);
        r.noalias() += sh.omega * (s_dot.cast<cplx>().asDiagonal() * d);
        r.noalias() -= I * (sh.omega.cwiseProduct(t) * d);
        return -I * solve_gram(sh.omega, r, gram_reg_).x;
    }

    HamiltonianTerms terms_;
    double gram_reg_;
    Eigen::VectorXcd omega_c_;
    Eigen::MatrixXcd g_;
    Eigen::Matrix4cd qubit_t_;
    std::array<Eigen::Matrix4cd, 2> ket_t_;
    std::array<Eigen::Matrix4cd, 2> bra_t_;
};

// ---------------------------------------------------------------------------
// Single-configuration and single-instant operations

/// dz/dt of one configuration: (dz_m/dt)^* = i * mean_field_gradient.
inline CoherentVector ehrenfest_rhs(const HamiltonianSpec& spec, const Configuration& cfg) {
    if (cfg.center.size() != spec.modes()) throw DimensionError("ehrenfest_rhs: mode count mismatch");
    if (cfg.amplitudes.squaredNorm() < kDegenerateNorm2)
        throw DegenerateConfigurationError("ehrenfest_rhs: configuration amplitudes vanish");
    CoherentVector rate(spec.modes());
    for (Eigen::Index m = 0; m < spec.modes(); ++m) rate(m) = -I * std::conj(mean_field_gradient(spec, cfg, m));
    return rate;
}

/// Amplitude derivatives d'(N x 4) of the stored amplitudes. With zero
/// phases and zero phase rates this is the physical c'.
inline Eigen::MatrixXcd amplitude_rhs(const HamiltonianSpec& spec, const McEState& state,
                                      const Eigen::MatrixXcd& center_derivs, const Eigen::VectorXd& phase_rates,
                                      double gram_reg = 1e-10) {
    const McEKernel kernel(spec, gram_reg);
    return kernel.amplitude_rates(state.centers(), state.amplitudes(), state.phases(), center_derivs, phase_rates);
}

inline Diagnostics diagnostics(const HamiltonianSpec& spec, const McEState& state) {
    const McEKernel kernel(spec, 0.0);
    return kernel.diagnostics(state.centers(), state.amplitudes(), state.phases());
}

// ---------------------------------------------------------------------------
// Grid initialization

struct GridInitResult {
    McEState state;
    double residual = 0.0;   // || grid state - target ||
    double condition = 1.0;  // 1 / rcond of the Gram matrix
    bool regularized = false;
};

/// Sample N centers around field_center and project |qubit_amps> (x) |field_center>
/// onto the grid by a least-squares Gram solve, then normalize. `residual` is
/// the distance of the unnormalized projection from the target.
inline GridInitResult init_grid(const GridInit& init, const QubitAmplitudes& qubit_amps,
                                const CoherentVector& field_center, std::uint64_t stream = 0,
                                double gram_reg = 1e-10) {
    init.validate();
    if (std::abs(qubit_amps.squaredNorm() - 1.0) > 1e-12)
        throw DomainError("init_grid: qubit amplitudes must be normalized");
    const Eigen::Index m = field_center.size();
    const Eigen::Index n = init.size;
    if (m < 1) throw DimensionError("init_grid: field center has no modes");

    Eigen::MatrixXcd centers(m, n);
    if (n == 1) {
        centers.col(0) = field_center;
    } else {
        RandomStream rng(init.seed, stream);
        const double sigma = 1.0 / init.comp;
        Eigen::Index j = 0;
        if (init.conjugate_pairs) {
            for (; j + 1 < n; j += 2) {
                Eigen::VectorXcd offset(m);
                for (Eigen::Index k = 0; k < m; ++k) offset(k) = rng.complex_normal(sigma);
                centers.col(j) = field_center + offset;
                centers.col(j + 1) = field_center + offset.conjugate();
            }
        }
        for (; j < n; ++j) {
            Eigen::VectorXcd offset(m);
            for (Eigen::Index k = 0; k < m; ++k) offset(k) = rng.complex_normal(sigma);
            centers.col(j) = field_center + offset;
        }
    }

    const Eigen::MatrixXcd omega = gram_matrix(centers);
    Eigen::VectorXcd target(n);
    for (Eigen::Index j = 0; j < n; ++j) target(j) = coherent_overlap(centers.col(j), field_center);

    GramSolution sol;
    try {
        sol = solve_gram(omega, target, gram_reg);
    } catch (const GramSolveError& e) {
        throw InitError(std::string("init_grid: ") + e.what(), e.rcond() > 0 ? 1.0 / e.rcond() : INFINITY);
    }
    Eigen::VectorXcd x = sol.x;
    const double n2 = (x.adjoint() * omega * x)(0, 0).real();
    const double res2 = n2 - 2.0 * x.dot(target).real() + 1.0;
    // the grid state is qubit_amps (x) (projected field); rescale the field part to unit norm
    if (n2 > 0.0) x /= std::sqrt(n2);

    Eigen::MatrixXcd amps = x * qubit_amps.transpose();
    GridInitResult out{McEState(std::move(centers), std::move(amps), Eigen::VectorXd::Zero(n)),
                       std::sqrt(std::max(0.0, res2)), sol.rcond > 0 ? 1.0 / sol.rcond : INFINITY, sol.regularized};
    return out;
}

// ---------------------------------------------------------------------------
// Time stepping

namespace detail {

using OdeState = std::vector<double>;

inline std::size_t packed_size(Eigen::Index m, Eigen::Index n) {
    return static_cast<std::size_t>(2 * m * n + 2 * n * kQubitDim + n);
}

inline OdeState pack(const Eigen::MatrixXcd& z, const Eigen::MatrixXcd& d, const Eigen::VectorXd& s) {
    const Eigen::Index m = z.rows(), n = z.cols();
    OdeState y(packed_size(m, n));
    auto* c = reinterpret_cast<cplx*>(y.data());
    Eigen::Map<Eigen::MatrixXcd>(c, m, n) = z;
    Eigen::Map<Eigen::MatrixXcd>(c + m * n, n, kQubitDim) = d;
    Eigen::Map<Eigen::VectorXd>(y.data() + 2 * (m * n + n * kQubitDim), n) = s;
    return y;
}

struct PackedView {
    Eigen::Map<const Eigen::MatrixXcd> z;
    Eigen::Map<const Eigen::MatrixXcd> d;
    Eigen::Map<const Eigen::VectorXd> s;
};

inline PackedView view(const OdeState& y, Eigen::Index m, Eigen::Index n) {
    const auto* c = reinterpret_cast<const cplx*>(y.data());
    return {Eigen::Map<const Eigen::MatrixXcd>(c, m, n), Eigen::Map<const Eigen::MatrixXcd>(c + m * n, n, kQubitDim),
            Eigen::Map<const Eigen::VectorXd>(y.data() + 2 * (m * n + n * kQubitDim), n)};
}

} // namespace detail

struct TrajectoryPoint {
    double t = 0.0;
    DensityMatrix4 rho = DensityMatrix4::Zero();
    double norm = 0.0;
    double energy = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    bool failed = false;
    std::string failure;
    double last_good_time = 0.0;
};

/// Output times: every `output_stride` steps of size dt up to t_max.
struct TimeGrid {
    double t_max = 1.0;
    int output_stride = 1;

    void validate() const {
        if (!(t_max > 0.0)) throw ConfigError("time.t_max must be > 0");
        if (output_stride < 1) throw ConfigError("time.output_stride must be >= 1");
    }
    long steps(double dt) const { return std::lround(t_max / dt); }
    std::vector<double> output_times(double dt) const {
        std::vector<double> out;
        const long n = steps(dt);
        for (long k = 0; k <= n; k += output_stride) out.push_back(static_cast<double>(k) * dt);
        return out;
    }
};

/// Owns the kernel and integrator for one trajectory.
class McEPropagator {
public:
    McEPropagator(const HamiltonianSpec& spec, IntegratorConfig icfg)
        : kernel_(spec, icfg.gram_reg), icfg_(icfg) {
        icfg_.validate();
    }

    const McEKernel& kernel() const noexcept { return kernel_; }

    /// Advance by one dt.
    McEState step(const McEState& state) const {
        const Eigen::Index m = state.modes(), n = state.size();
        auto y = detail::pack(state.centers(), state.amplitudes(), state.phases());
        advance(y, m, n, state.time(), icfg_.dt);
        const auto v = detail::view(y, m, n);
        return McEState(v.z, v.d, v.s, state.time() + icfg_.dt);
    }

    TrajectoryPoint observe(const McEState& state) const {
        TrajectoryPoint p;
        p.t = state.time();
        p.rho = reduce_to_qubits(state);
        const Diagnostics d = kernel_.diagnostics(state.centers(), state.amplitudes(), state.phases());
        p.norm = d.norm;
        p.energy = d.energy;
        return p;
    }

    /// Integrate to grid.t_max, recording every output_stride steps. A failed
    /// step ends the trajectory; the points recorded so far are kept.
    Trajectory propagate(McEState state, const TimeGrid& grid) const {
        grid.validate();
        Trajectory out;
        const long steps = grid.steps(icfg_.dt);
        const Eigen::Index m = state.modes(), n = state.size();
        const double t0 = state.time();
        auto y = detail::pack(state.centers(), state.amplitudes(), state.phases());
        out.points.push_back(observe(state));
        out.last_good_time = t0;
        for (long k = 1; k <= steps; ++k) {
            const double t = t0 + static_cast<double>(k - 1) * icfg_.dt;
            try {
                advance(y, m, n, t, icfg_.dt);
                for (double v : y)
                    if (!std::isfinite(v)) throw DomainError("non-finite state after step");
            } catch (const Error& e) {
                out.failed = true;
                out.failure = e.what();
                return out;
            }
            out.last_good_time = t0 + static_cast<double>(k) * icfg_.dt;
            if (k % grid.output_stride == 0) {
                const auto v = detail::view(y, m, n);
                out.points.push_back(observe(McEState(v.z, v.d, v.s, out.last_good_time)));
            }
        }
        return out;
    }

private:
    void advance(detail::OdeState& y, Eigen::Index m, Eigen::Index n, double t, double dt) const {
        namespace ode = boost::numeric::odeint;
        auto system = [&](const detail::OdeState& x, detail::OdeState& dxdt, double) {
            const auto v = detail::view(x, m, n);
            const McEDerivative der = kernel_.derivative(v.z, v.d, v.s);
            dxdt.resize(x.size());
            auto* c = reinterpret_cast<cplx*>(dxdt.data());
            Eigen::Map<Eigen::MatrixXcd>(c, m, n) = der.centers;
            Eigen::Map<Eigen::MatrixXcd>(c + m * n, n, kQubitDim) = der.amplitudes;
            Eigen::Map<Eigen::VectorXd>(dxdt.data() + 2 * (m * n + n * kQubitDim), n) = der.phases;
        };
        if (icfg_.method == IntegratorMethod::RK4) {
            ode::runge_kutta4<detail::OdeState> stepper;
            stepper.do_step(system, y, t, dt);
        } else {
            auto stepper = ode::make_controlled(icfg_.abs_tol, icfg_.rel_tol, ode::runge_kutta_dopri5<detail::OdeState>());
            ode::integrate_adaptive(stepper, system, y, t, t + dt, dt);
        }
    }

    McEKernel kernel_;
    IntegratorConfig icfg_;
};

inline McEState step(const HamiltonianSpec& spec, const McEState& state, const IntegratorConfig& icfg) {
    return McEPropagator(spec, icfg).step(state);
}

// ---------------------------------------------------------------------------
// Conservation checks

struct DivergenceReport {
    bool diverged = false;
    double time = 0.0;             // first output time breaking the tolerance
    double max_norm_error = 0.0;   // max |Tr rho - 1| before divergence (or overall)
    double max_energy_drift = 0.0; // max |E - E0| / max(|E0|, 1) likewise
};

/// Scan norm and energy against their initial values. Energy drift is
/// measured relative to max(|E0|, 1).
inline DivergenceReport detect_divergence(const std::vector<TrajectoryPoint>& points, double tol) {
    DivergenceReport r;
    if (points.empty()) return r;
    const double e0 = points.front().energy;
    const double scale = std::max(std::abs(e0), 1.0);
    for (const auto& p : points) {
        const double dn = std::abs(p.norm - 1.0);
        const double de = std::abs(p.energy - e0) / scale;
        if (!std::isfinite(dn) || !std::isfinite(de) || dn > tol || de > tol) {
            r.diverged = true;
            r.time = p.t;
            return r;
        }
        r.max_norm_error = std::max(r.max_norm_error, dn);
        r.max_energy_drift = std::max(r.max_energy_drift, de);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Trajectory backend used by channel reconstruction

/// Evolves a pure qubit state with a coherent field on a freshly sampled grid.
/// All inputs evolved with the same stream index share the same initial grid.
class McEEvolver {
public:
    McEEvolver(HamiltonianSpec spec, GridInit grid, IntegratorConfig icfg, TimeGrid time)
        : spec_(std::move(spec)), grid_(grid), propagator_(spec_, icfg), icfg_(icfg), time_(time) {
        grid_.validate();
        time_.validate();
    }

    const HamiltonianSpec& spec() const noexcept { return spec_; }
    std::vector<double> output_times() const { return time_.output_times(icfg_.dt); }

    Trajectory operator()(const QubitAmplitudes& qubit, const CoherentVector& field, std::uint64_t stream) const {
        const GridInitResult init = init_grid(grid_, qubit, field, stream, icfg_.gram_reg);
        return propagator_.propagate(init.state, time_);
    }

private:
    HamiltonianSpec spec_;
    GridInit grid_;
    McEPropagator propagator_;
    IntegratorConfig icfg_;
    TimeGrid time_;
};

} // namespace mce
